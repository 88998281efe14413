#include "droplet/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <string>

#include "droplet/errors.hpp"

namespace droplet {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per size and kept for the life of the process.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex plan_mutex;

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<fftw_complex> spec(static_cast<std::size_t>(n / 2 + 1));
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_r2c_1d(n, real.data(), spec.data(), flags);
  p.backward = fftw_plan_dft_c2r_1d(n, spec.data(), real.data(), flags);
  return cache.emplace(n, p).first->second;
}

void check_grid(std::size_t n) {
  if (n < 4 || n % 2 != 0) {
    throw ValidationError("periodic grid needs an even number of nodes >= 4, got " +
                          std::to_string(n));
  }
}

}  // namespace

FourierCoeffs::FourierCoeffs(int n_nodes)
    : a(static_cast<std::size_t>(n_nodes / 2 + 1), 0.0),
      b(static_cast<std::size_t>(n_nodes / 2 + 1), 0.0) {}

FourierCoeffs to_coeffs(std::span<const double> samples) {
  check_grid(samples.size());
  const int n = static_cast<int>(samples.size());
  const int h = n / 2;
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<fftw_complex> out(static_cast<std::size_t>(h + 1));
  fftw_execute_dft_r2c(plans_for(n).forward, in.data(), out.data());

  FourierCoeffs c(n);
  const double inv = 1.0 / n;
  c.a[0] = out[0][0] * inv;
  for (int k = 1; k < h; ++k) {
    c.a[k] = 2.0 * out[k][0] * inv;
    c.b[k] = -2.0 * out[k][1] * inv;
  }
  c.a[h] = out[h][0] * inv;
  return c;
}

std::vector<double> to_samples(const FourierCoeffs& c) {
  const int n = c.n_nodes();
  check_grid(static_cast<std::size_t>(n));
  const int h = n / 2;
  std::vector<fftw_complex> in(static_cast<std::size_t>(h + 1));
  in[0][0] = c.a[0];
  in[0][1] = 0.0;
  for (int k = 1; k < h; ++k) {
    in[k][0] = 0.5 * c.a[k];
    in[k][1] = -0.5 * c.b[k];
  }
  in[h][0] = c.a[h];
  in[h][1] = 0.0;
  std::vector<double> out(static_cast<std::size_t>(n));
  fftw_execute_dft_c2r(plans_for(n).backward, in.data(), out.data());
  return out;
}

std::vector<double> pack(const FourierCoeffs& c, int max_mode) {
  std::vector<double> p(static_cast<std::size_t>(packed_size(max_mode)), 0.0);
  p[0] = c.a[0];
  const int top = std::min(max_mode, c.nyquist());
  for (int k = 1; k <= top; ++k) {
    p[2 * k - 1] = c.a[k];
    p[2 * k] = c.b[k];
  }
  return p;
}

FourierCoeffs unpack(std::span<const double> packed, int n_nodes) {
  FourierCoeffs c(n_nodes);
  c.a[0] = packed[0];
  const int max_mode = static_cast<int>(packed.size() - 1) / 2;
  const int top = std::min(max_mode, c.nyquist() - 1);
  for (int k = 1; k <= top; ++k) {
    c.a[k] = packed[2 * k - 1];
    c.b[k] = packed[2 * k];
  }
  return c;
}

PeriodicField::PeriodicField(std::vector<double> samples, FourierCoeffs coeffs)
    : samples_(std::move(samples)), coeffs_(std::move(coeffs)) {}

PeriodicField PeriodicField::from_samples(std::vector<double> samples) {
  for (double s : samples) {
    if (!std::isfinite(s)) throw ValidationError("periodic field sample is not finite");
  }
  FourierCoeffs c = to_coeffs(samples);
  return PeriodicField(std::move(samples), std::move(c));
}

PeriodicField PeriodicField::from_coeffs(FourierCoeffs coeffs) {
  if (coeffs.a.size() != coeffs.b.size()) {
    throw ValidationError("cosine and sine coefficient arrays differ in length");
  }
  coeffs.b[0] = 0.0;
  coeffs.b[static_cast<std::size_t>(coeffs.nyquist())] = 0.0;
  std::vector<double> s = to_samples(coeffs);
  return PeriodicField(std::move(s), std::move(coeffs));
}

PeriodicField PeriodicField::zero(int n_nodes) { return from_coeffs(FourierCoeffs(n_nodes)); }

double PeriodicField::max_abs() const {
  double m = 0.0;
  for (double s : samples_) m = std::max(m, std::abs(s));
  return m;
}

void PeriodicField::evaluate(double theta, double& value, double& slope) const {
  const int h = coeffs_.nyquist();
  const std::complex<double> step(std::cos(theta), std::sin(theta));
  std::complex<double> e = step;
  value = coeffs_.a[0];
  slope = 0.0;
  for (int k = 1; k <= h; ++k) {
    const double ak = coeffs_.a[k];
    const double bk = coeffs_.b[k];
    value += ak * e.real() + bk * e.imag();
    slope += k * (bk * e.real() - ak * e.imag());
    e *= step;
  }
}

double PeriodicField::operator()(double theta) const {
  double v = 0.0, d = 0.0;
  evaluate(theta, v, d);
  return v;
}

PeriodicField PeriodicField::derivative() const {
  FourierCoeffs d(size());
  const int h = coeffs_.nyquist();
  for (int k = 1; k < h; ++k) {
    d.a[k] = k * coeffs_.b[k];
    d.b[k] = -k * coeffs_.a[k];
  }
  return from_coeffs(std::move(d));
}

PeriodicField PeriodicField::resampled(int m) const {
  if (m == size()) return *this;
  FourierCoeffs r(m);
  const int top = m > size() ? coeffs_.nyquist() : m / 2 - 1;
  for (int k = 0; k <= top; ++k) {
    r.a[k] = coeffs_.a[k];
    r.b[k] = coeffs_.b[k];
  }
  return from_coeffs(std::move(r));
}

PeriodicField PeriodicField::without_mode(int k) const {
  FourierCoeffs c = coeffs_;
  if (k >= 0 && k <= c.nyquist()) {
    c.a[k] = 0.0;
    c.b[k] = 0.0;
  }
  return from_coeffs(std::move(c));
}

PeriodicField PeriodicField::band_limited(int kmax) const {
  FourierCoeffs c = coeffs_;
  for (int k = std::max(kmax, 0); k <= c.nyquist(); ++k) {
    c.a[k] = 0.0;
    c.b[k] = 0.0;
  }
  return from_coeffs(std::move(c));
}

namespace {

PeriodicField combine(const PeriodicField& x, const PeriodicField& y, double sy) {
  if (x.size() != y.size()) throw ValidationError("periodic fields live on different grids");
  std::vector<double> s(static_cast<std::size_t>(x.size()));
  for (int j = 0; j < x.size(); ++j) s[j] = x[j] + sy * y[j];
  return PeriodicField::from_samples(std::move(s));
}

}  // namespace

PeriodicField operator+(const PeriodicField& x, const PeriodicField& y) { return combine(x, y, 1.0); }
PeriodicField operator-(const PeriodicField& x, const PeriodicField& y) { return combine(x, y, -1.0); }

PeriodicField operator*(double s, const PeriodicField& x) {
  std::vector<double> v(x.samples().begin(), x.samples().end());
  for (double& e : v) e *= s;
  return PeriodicField::from_samples(std::move(v));
}

double inner(const PeriodicField& f, const PeriodicField& g) {
  if (f.size() != g.size()) throw ValidationError("periodic fields live on different grids");
  const int m = 2 * f.size();
  const PeriodicField fu = f.resampled(m);
  const PeriodicField gu = g.resampled(m);
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += fu[j] * gu[j];
  return s / m;
}

double l2_norm(const PeriodicField& f) { return std::sqrt(inner(f, f)); }

}  // namespace droplet
