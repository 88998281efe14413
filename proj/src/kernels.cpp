#include "droplet/kernels.hpp"

#include <omp.h>

#include <atomic>
#include <complex>
#include <cstdlib>
#include <string>

namespace droplet {

namespace {

std::atomic<Exec> g_exec{Exec::parallel};

using kernels::cplx;

cplx as_complex(const Vec2& x, double scale) { return {x.x() / scale, x.y() / scale}; }

// C_k = c_k − i s_k so that c_k Re z^k + s_k Im z^k = Re(C_k z^k).
cplx packed_coeff(std::span<const double> c, int k) { return {c[2 * k - 1], -c[2 * k]}; }

int modes_of(std::span<const double> coeffs) { return static_cast<int>(coeffs.size() - 1) / 2; }

}  // namespace

Exec default_exec() { return g_exec.load(); }
void set_default_exec(Exec e) { g_exec.store(e); }

int apply_thread_env() {
  const char* env = std::getenv("DROPLET_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  const int n = std::atoi(env);
  if (n > 0) omp_set_num_threads(n);
  return n > 0 ? n : 0;
}

namespace kernels {

Eigen::MatrixXd collocation_matrix(std::span<const Vec2> points, int max_mode, double r_star,
                                   Exec exec) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(rows, 2 * max_mode + 1);
  auto fill_row = [&](Eigen::Index j) {
    const cplx z = as_complex(points[static_cast<std::size_t>(j)], r_star);
    cplx zk(1.0, 0.0);
    a(j, 0) = 1.0;
    for (int k = 1; k <= max_mode; ++k) {
      zk *= z;
      a(j, 2 * k - 1) = zk.real();
      a(j, 2 * k) = zk.imag();
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < rows; ++j) fill_row(j);
  } else {
    for (Eigen::Index j = 0; j < rows; ++j) fill_row(j);
  }
  return a;
}

std::vector<double> harmonic_values(std::span<const double> coeffs, double r_star,
                                    std::span<const Vec2> points, Exec exec) {
  const int kmax = modes_of(coeffs);
  const auto n = static_cast<long>(points.size());
  std::vector<double> out(points.size());
  auto eval = [&](long j) {
    const cplx z = as_complex(points[j], r_star);
    // Horner in z for Σ C_k z^k.
    cplx acc(0.0, 0.0);
    for (int k = kmax; k >= 1; --k) acc = (acc + packed_coeff(coeffs, k)) * z;
    out[j] = coeffs[0] + acc.real();
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < n; ++j) eval(j);
  } else {
    for (long j = 0; j < n; ++j) eval(j);
  }
  return out;
}

std::vector<Vec2> harmonic_gradients(std::span<const double> coeffs, double r_star,
                                     std::span<const Vec2> points, Exec exec) {
  const int kmax = modes_of(coeffs);
  const auto n = static_cast<long>(points.size());
  std::vector<Vec2> out(points.size());
  auto eval = [&](long j) {
    const cplx z = as_complex(points[j], r_star);
    // f'(ζ) = (1/r_star) Σ k C_k z^{k−1}; ∇w = (Re f', −Im f').
    cplx acc(0.0, 0.0);
    for (int k = kmax; k >= 1; --k) acc = acc * z + static_cast<double>(k) * packed_coeff(coeffs, k);
    acc /= r_star;
    out[j] = Vec2(acc.real(), -acc.imag());
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < n; ++j) eval(j);
  } else {
    for (long j = 0; j < n; ++j) eval(j);
  }
  return out;
}

std::vector<double> harmonic_radial_integrals(std::span<const double> coeffs, double r_star,
                                              std::span<const Vec2> points, Exec exec) {
  const int kmax = modes_of(coeffs);
  const auto n = static_cast<long>(points.size());
  std::vector<double> out(points.size());
  auto eval = [&](long j) {
    const cplx z = as_complex(points[j], r_star);
    const double r2 = points[j].squaredNorm();
    // ∫₀^R (r/r*)^k e^{ikθ} r dr = R² z^k / (k + 2).
    cplx zk(1.0, 0.0);
    double s = 0.5 * coeffs[0];
    for (int k = 1; k <= kmax; ++k) {
      zk *= z;
      s += (packed_coeff(coeffs, k) * zk).real() / (k + 2);
    }
    out[j] = r2 * s;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < n; ++j) eval(j);
  } else {
    for (long j = 0; j < n; ++j) eval(j);
  }
  return out;
}

Eigen::MatrixXd nystrom_matrix(std::span<const cplx> zeta, std::span<const cplx> dzeta,
                               std::span<const cplx> ddzeta, Exec exec) {
  const auto n = static_cast<Eigen::Index>(zeta.size());
  Eigen::MatrixXd a(n, n);
  const double w = 1.0 / static_cast<double>(n);
  auto fill_row = [&](Eigen::Index t) {
    for (Eigen::Index s = 0; s < n; ++s) {
      const double k = s == t ? (ddzeta[t] / (2.0 * dzeta[t])).imag()
                              : (dzeta[s] / (zeta[s] - zeta[t])).imag();
      a(t, s) = w * k;
    }
    a(t, t) += 0.5;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index t = 0; t < n; ++t) fill_row(t);
  } else {
    for (Eigen::Index t = 0; t < n; ++t) fill_row(t);
  }
  return a;
}

std::vector<double> conjugate_trace(std::span<const cplx> zeta, std::span<const cplx> dzeta,
                                    std::span<const double> mu, std::span<const double> dmu,
                                    Exec exec) {
  const auto n = static_cast<long>(zeta.size());
  std::vector<double> out(zeta.size());
  auto eval = [&](long t) {
    // (μ(s) − μ(t)) ζ'(s)/(ζ(s) − ζ(t)) is smooth, with value μ'(t) at s = t.
    double acc = dmu[t];
    for (long s = 0; s < n; ++s) {
      if (s == t) continue;
      acc += (mu[s] - mu[t]) * (dzeta[s] / (zeta[s] - zeta[t])).real();
    }
    out[t] = -acc / static_cast<double>(n);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long t = 0; t < n; ++t) eval(t);
  } else {
    for (long t = 0; t < n; ++t) eval(t);
  }
  return out;
}

void cauchy_evaluate(std::span<const cplx> nodes, std::span<const cplx> weights,
                     std::span<const cplx> values, std::span<const Vec2> points,
                     std::span<cplx> f, std::span<cplx> df, Exec exec) {
  const auto m = static_cast<long>(points.size());
  const std::size_t n = nodes.size();
  auto eval = [&](long p) {
    const cplx z(points[p].x(), points[p].y());
    cplx num(0.0, 0.0), den(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx d = nodes[j] - z;
      if (d == cplx(0.0, 0.0)) {
        f[p] = values[j];
        df[p] = cplx(std::nan(""), std::nan(""));
        return;
      }
      const cplx q = weights[j] / d;
      num += values[j] * q;
      den += q;
    }
    const cplx fz = num / den;
    cplx dnum(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx d = nodes[j] - z;
      dnum += (values[j] - fz) * weights[j] / (d * d);
    }
    f[p] = fz;
    df[p] = dnum / den;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long p = 0; p < m; ++p) eval(p);
  } else {
    for (long p = 0; p < m; ++p) eval(p);
  }
}

}  // namespace kernels
}  // namespace droplet
