#include "droplet/solver.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "droplet/errors.hpp"

namespace droplet {

using kernels::cplx;

HarmonicField HarmonicField::polynomial(HarmonicBasis basis, std::vector<double> coeffs) {
  HarmonicField h;
  h.is_polynomial_ = true;
  h.basis_ = basis;
  h.coeffs_ = std::move(coeffs);
  return h;
}

HarmonicField HarmonicField::cauchy(std::vector<cplx> nodes, std::vector<cplx> weights,
                                    std::vector<cplx> boundary_values) {
  HarmonicField h;
  h.is_polynomial_ = false;
  h.nodes_ = std::move(nodes);
  h.weights_ = std::move(weights);
  h.boundary_ = std::move(boundary_values);
  return h;
}

std::vector<double> HarmonicField::values(std::span<const Vec2> x, Exec exec) const {
  if (is_polynomial_) return kernels::harmonic_values(coeffs_, basis_.r_star, x, exec);
  std::vector<cplx> f(x.size()), df(x.size());
  kernels::cauchy_evaluate(nodes_, weights_, boundary_, x, f, df, exec);
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = f[j].real();
  return out;
}

std::vector<Vec2> HarmonicField::gradients(std::span<const Vec2> x, Exec exec) const {
  if (is_polynomial_) return kernels::harmonic_gradients(coeffs_, basis_.r_star, x, exec);
  std::vector<cplx> f(x.size()), df(x.size());
  kernels::cauchy_evaluate(nodes_, weights_, boundary_, x, f, df, exec);
  std::vector<Vec2> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = Vec2(df[j].real(), -df[j].imag());
  return out;
}

double HarmonicField::value(const Vec2& x) const { return values(std::span(&x, 1), Exec::serial)[0]; }

Vec2 HarmonicField::gradient(const Vec2& x) const {
  return gradients(std::span(&x, 1), Exec::serial)[0];
}

namespace {

std::vector<Vec2> boundary_points(const ShapeFunction& shape) {
  std::vector<Vec2> p(static_cast<std::size_t>(shape.size()));
  for (int j = 0; j < shape.size(); ++j) p[j] = shape.point(j);
  return p;
}

struct Curve {
  std::vector<cplx> z, dz, ddz;
};

// ζ(θ) = R(θ) e^{iθ} and its first two parameter derivatives.
Curve parametrize(const ShapeFunction& shape) {
  const int n = shape.size();
  const PeriodicField d1 = shape.rho().derivative();
  const PeriodicField d2 = d1.derivative();
  Curve c;
  c.z.resize(n);
  c.dz.resize(n);
  c.ddz.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = kTwoPi * j / n;
    const cplx e(std::cos(t), std::sin(t));
    const double r = shape.radius(j);
    c.z[j] = r * e;
    c.dz[j] = cplx(d1[j], r) * e;
    c.ddz[j] = cplx(d2[j] - r, 2.0 * d1[j]) * e;
  }
  return c;
}

double tail_magnitude(const PeriodicField& f) {
  const FourierCoeffs& c = f.coeffs();
  const int n = f.size();
  double m = 0.0;
  for (int k = (3 * n) / 8; k <= c.nyquist(); ++k) m = std::max(m, std::hypot(c.a[k], c.b[k]));
  return m;
}

[[noreturn]] void ill_conditioned(double residual, double tol, double scale) {
  std::ostringstream msg;
  msg << "ill-conditioned domain: residual " << residual << " exceeds " << tol
      << " x |g| = " << tol * scale << " (perturbation too large for the discretization)";
  throw SolverError(msg.str());
}

HarmonicExtension extend_collocation(const ShapeFunction& shape, std::span<const double> g,
                                     const SolverOptions& options, double scale) {
  const int n = shape.size();
  HarmonicBasis basis{n / 2 - 1, options.scale_factor * shape.max_radius()};
  const std::vector<Vec2> pts = boundary_points(shape);
  const Eigen::MatrixXd a =
      kernels::collocation_matrix(pts, basis.max_mode, basis.r_star, options.exec);
  const Eigen::Map<const Eigen::VectorXd> rhs(g.data(), n);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd c = qr.solve(rhs);

  HarmonicExtension out;
  out.residual = (a * c - rhs).lpNorm<Eigen::Infinity>();
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  const double smallest = diag(diag.size() - 1);
  out.cond_estimate =
      smallest > 0.0 ? diag(0) / smallest : std::numeric_limits<double>::infinity();
  if (!std::isfinite(out.residual) || out.residual > options.residual_tol * scale) {
    ill_conditioned(out.residual, options.residual_tol, scale);
  }
  out.basis = basis;
  out.harmonic_coeffs.assign(c.data(), c.data() + c.size());
  out.field = HarmonicField::polynomial(basis, out.harmonic_coeffs);

  const std::vector<Vec2> grad = out.field.gradients(pts, options.exec);
  const BoundaryFrame frame = boundary_frame(shape);
  std::vector<double> dn(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) dn[j] = grad[j].dot(frame.normal[j]);
  out.normal_derivative = PeriodicField::from_samples(std::move(dn));
  return out;
}

HarmonicExtension extend_boundary_integral(const ShapeFunction& shape, std::span<const double> g,
                                           const SolverOptions& options, double scale) {
  const int n = shape.size();
  const Curve c = parametrize(shape);
  const Eigen::MatrixXd a = kernels::nystrom_matrix(c.z, c.dz, c.ddz, options.exec);
  const Eigen::Map<const Eigen::VectorXd> rhs(g.data(), n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd mu_v = lu.solve(rhs);

  HarmonicExtension out;
  const double rcond = lu.rcond();
  out.cond_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();

  const PeriodicField mu =
      PeriodicField::from_samples(std::vector<double>(mu_v.data(), mu_v.data() + n));
  const double nystrom_residual = (a * mu_v - rhs).lpNorm<Eigen::Infinity>();
  // μ = 2g − 2Kμ with K smoothing, so the high modes of μ − 2g expose an
  // under-resolved kernel while data content near Nyquist does not count.
  std::vector<double> smooth(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) smooth[j] = mu[j] - 2.0 * g[j];
  out.residual = std::max(nystrom_residual, tail_magnitude(PeriodicField::from_samples(std::move(smooth))));
  if (!std::isfinite(out.residual) || out.residual > options.residual_tol * scale) {
    ill_conditioned(out.residual, options.residual_tol, scale);
  }

  const PeriodicField dmu = mu.derivative();
  const PeriodicField conj = PeriodicField::from_samples(
      kernels::conjugate_trace(c.z, c.dz, mu.samples(), dmu.samples(), options.exec));
  const PeriodicField dconj = conj.derivative();

  std::vector<double> dn(static_cast<std::size_t>(n));
  std::vector<cplx> values(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    dn[j] = dconj[j] / std::abs(c.dz[j]);
    values[j] = cplx(g[j], conj[j]);
  }
  out.normal_derivative = PeriodicField::from_samples(std::move(dn));

  // Taylor coefficients of f at the origin, C_k = (1/2πi)∮ f ζ^{−k−1} dζ,
  // rescaled to the (z/r_*)^k basis.
  out.basis = HarmonicBasis{n / 2 - 1, options.scale_factor * shape.max_radius()};
  out.harmonic_coeffs.assign(static_cast<std::size_t>(packed_size(out.basis.max_mode)), 0.0);
  std::vector<cplx> term(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) term[j] = values[j] * c.dz[j] / (cplx(0.0, 1.0) * c.z[j]);
  for (int k = 0; k <= out.basis.max_mode; ++k) {
    cplx sum(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      sum += term[j];
      term[j] *= out.basis.r_star / c.z[j];
    }
    sum /= static_cast<double>(n);
    if (k == 0) {
      out.harmonic_coeffs[0] = sum.real();
    } else {
      out.harmonic_coeffs[2 * k - 1] = sum.real();
      out.harmonic_coeffs[2 * k] = -sum.imag();
    }
  }

  std::vector<cplx> weights(c.dz);
  out.field = HarmonicField::cauchy(c.z, std::move(weights), std::move(values));
  return out;
}

}  // namespace

HarmonicExtension harmonic_extend(const ShapeFunction& shape, std::span<const double> g,
                                  const SolverOptions& options) {
  if (static_cast<int>(g.size()) != shape.size()) {
    throw ValidationError("boundary data length does not match the shape grid");
  }
  double scale = 0.0;
  for (double v : g) scale = std::max(scale, std::abs(v));
  scale = std::max(scale, 1e-300);
  if (options.method == SolverOptions::Method::collocation) {
    return extend_collocation(shape, g, options, scale);
  }
  return extend_boundary_integral(shape, g, options, scale);
}

double SolveResult::u_bar(const Vec2& x) const {
  return w.value(x) + 0.25 * (base_radius * base_radius - x.squaredNorm());
}

Vec2 SolveResult::grad_u_bar(const Vec2& x) const { return w.gradient(x) - 0.5 * x; }

std::vector<double> boundary_flux(const SolveResult& result, const ShapeFunction& on) {
  const PeriodicField dn = result.dn_w.resampled(on.size());
  const PeriodicField d = derivative(on);
  std::vector<double> flux(static_cast<std::size_t>(on.size()));
  for (int j = 0; j < on.size(); ++j) {
    const double r = on.radius(j);
    // x·ν = R² / sqrt(R² + R'²)
    flux[j] = dn[j] - 0.5 * r * r / std::hypot(r, d[j]);
  }
  return flux;
}

SolveResult solve_base(const ShapeFunction& shape, double V0, const SolverOptions& options) {
  if (!(V0 > 0.0)) throw ValidationError("volume V0 must be positive");
  const double r_e = shape.base_radius();
  const int n = shape.size();

  // w = −p on the boundary, p = (r_e² − |x|²)/4.
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double r = shape.radius(j);
    g[j] = 0.25 * (r * r - r_e * r_e);
  }
  HarmonicExtension ext = harmonic_extend(shape, g, options);

  SolveResult out;
  out.base_radius = r_e;
  out.w = std::move(ext.field);
  out.dn_w = std::move(ext.normal_derivative);
  out.basis = ext.basis;
  out.harmonic_coeffs = std::move(ext.harmonic_coeffs);
  out.residual = ext.residual;
  out.cond_estimate = ext.cond_estimate;
  out.flux = boundary_flux(out, shape);
  out.flux_field = PeriodicField::from_samples(out.flux);

  // I = ∫w + ∫p. On the 2N grid every integrand below is resolved exactly.
  const int m = 2 * n;
  const ShapeFunction fine = shape.resampled(m);
  double particular = 0.0;
  for (int j = 0; j < m; ++j) {
    const double r2 = fine.radius(j) * fine.radius(j);
    particular += 0.125 * r_e * r_e * r2 - r2 * r2 / 16.0;
  }
  double harmonic = 0.0;
  if (options.method == SolverOptions::Method::collocation) {
    std::vector<Vec2> pts(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) pts[j] = fine.point(j);
    for (double v : kernels::harmonic_radial_integrals(out.harmonic_coeffs, out.basis.r_star, pts,
                                                       options.exec)) {
      harmonic += v;
    }
  } else {
    // Green's second identity with Δ(|x|²/4) = 1:
    //   ∫w = ∮ w (x·n)/2 − (|x|²/4) ∂_n w ds, with (x·n) ds = R² dθ and
    //   ∂_n w ds = ∂_n w · |ζ'| dθ.
    const PeriodicField d = derivative(shape);
    std::vector<double> dn_ds(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) dn_ds[j] = out.dn_w[j] * std::hypot(shape.radius(j), d[j]);
    const PeriodicField dn_fine = PeriodicField::from_samples(std::move(dn_ds)).resampled(m);
    for (int j = 0; j < m; ++j) {
      const double r2 = fine.radius(j) * fine.radius(j);
      const double gj = 0.25 * (r2 - r_e * r_e);
      harmonic += 0.5 * gj * r2 - 0.25 * r2 * dn_fine[j];
    }
  }
  out.I = (particular + harmonic) * kTwoPi / m;

  if (!(out.I > 0.0) || !std::isfinite(out.I)) {
    std::ostringstream msg;
    msg << "domain integral of the base solution is not positive (I = " << out.I << ")";
    throw SolverError(msg.str());
  }
  for (double f : out.flux) {
    if (!std::isfinite(f)) throw SolverError("non-finite boundary flux");
  }
  out.lambda = V0 / out.I;
  return out;
}

FourierCoeffs dtn_disk(const FourierCoeffs& h, double r_e) {
  FourierCoeffs out = h;
  for (int k = 0; k <= out.nyquist(); ++k) {
    out.a[k] *= k / r_e;
    out.b[k] *= k / r_e;
  }
  return out;
}

}  // namespace droplet
