#pragma once

// Data-parallel inner loops of the solver. Every kernel has a serial
// reference path and an OpenMP path selected by Exec; both must produce the
// same numbers (the loops carry no reductions, so results are bitwise equal).

#include <Eigen/Core>
#include <complex>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "droplet/shape.hpp"

namespace droplet {

enum class Exec { serial, parallel };

/// Process-wide default; Exec::parallel unless changed. DROPLET_THREADS caps
/// the OpenMP team size (see set_thread_cap).
Exec default_exec();
void set_default_exec(Exec e);
/// Applies DROPLET_THREADS from the environment, if set. Returns the cap in
/// effect (0 = OpenMP default).
int apply_thread_env();

/// Runs fn(i) for i in [0, n), across threads when exec is parallel. The first
/// exception thrown by any iteration is rethrown after the loop.
template <class Fn>
void for_each_index(long n, Exec exec, Fn&& fn) {
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  std::mutex m;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(m);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

namespace kernels {

/// Rows [1, Re z^k, Im z^k, ...] for z = x/r_star read as a complex number,
/// k = 1..max_mode. Shape: points.size() × (2 max_mode + 1).
Eigen::MatrixXd collocation_matrix(std::span<const Vec2> points, int max_mode, double r_star,
                                   Exec exec);

/// Values of the harmonic polynomial w = c0 + Σ c_k Re z^k + s_k Im z^k.
std::vector<double> harmonic_values(std::span<const double> coeffs, double r_star,
                                    std::span<const Vec2> points, Exec exec);

/// Cartesian gradients of the same polynomial.
std::vector<Vec2> harmonic_gradients(std::span<const double> coeffs, double r_star,
                                     std::span<const Vec2> points, Exec exec);

/// ∫₀^{R_j} w(r, θ_j) r dr for each boundary point (R_j, θ_j), in closed form.
std::vector<double> harmonic_radial_integrals(std::span<const double> coeffs, double r_star,
                                              std::span<const Vec2> points, Exec exec);

using cplx = std::complex<double>;

/// Nyström matrix of μ/2 + (1/2π)∫ μ(s) Im[ζ'(s)/(ζ(s) − ζ(t))] ds for the
/// interior Dirichlet problem on the curve ζ(θ) sampled at N equispaced nodes.
/// The diagonal uses the smooth limit Im[ζ''/(2ζ')].
Eigen::MatrixXd nystrom_matrix(std::span<const cplx> zeta, std::span<const cplx> dzeta,
                               std::span<const cplx> ddzeta, Exec exec);

/// Boundary trace of Im f for f(z) = (1/2πi)∮ μ(ζ)/(ζ − z) dζ, given the real
/// density μ and its parameter derivative μ′.
std::vector<double> conjugate_trace(std::span<const cplx> zeta, std::span<const cplx> dzeta,
                                    std::span<const double> mu, std::span<const double> dmu,
                                    Exec exec);

/// Barycentric Cauchy interpolation of an analytic function from its boundary
/// values: f(z) and f′(z) at each point. Points that coincide with a node
/// return the node value and a NaN derivative.
void cauchy_evaluate(std::span<const cplx> nodes, std::span<const cplx> weights,
                     std::span<const cplx> values, std::span<const Vec2> points,
                     std::span<cplx> f, std::span<cplx> df, Exec exec);

}  // namespace kernels
}  // namespace droplet
