#include "droplet/dynamics.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "droplet/coords.hpp"
#include "droplet/errors.hpp"

namespace droplet {

// ---------------------------------------------------------------- ContactLaw

ContactLaw ContactLaw::power(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("power-law exponent must be positive");
  ContactLaw law;
  law.p_ = p;
  law.validate();
  return law;
}

ContactLaw ContactLaw::table(std::vector<double> s, std::vector<double> f) {
  if (s.size() != f.size() || s.size() < 3) {
    throw ValidationError("tabulated contact law needs at least 3 (s, F) pairs of equal length");
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) throw ValidationError("contact law knots must be strictly increasing");
    if (!(f[i] > f[i - 1])) throw ValidationError("tabulated contact law must be strictly increasing");
  }
  if (s.front() > kRangeLow || s.back() < kRangeHigh) {
    throw ValidationError("contact law knots must cover the validated range [0.2, 5]");
  }
  const auto one = std::find_if(s.begin(), s.end(), [](double x) { return std::abs(x - 1.0) < 1e-14; });
  if (one == s.end() || std::abs(f[static_cast<std::size_t>(one - s.begin())]) > 1e-14) {
    throw ValidationError("tabulated contact law must contain the knot (1, 0)");
  }

  // Fritsch–Carlson monotone slopes.
  const std::size_t n = s.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = s[i + 1] - s[i];
    delta[i] = (f[i + 1] - f[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double e = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (e * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(e) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return e;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);

  ContactLaw law;
  law.knots_ = std::move(s);
  law.values_ = std::move(f);
  law.slopes_ = std::move(d);
  law.validate();
  return law;
}

std::size_t ContactLaw::interval(double s) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, knots_.size() - 2);
}

namespace {

void check_range(double s) {
  if (!(s >= ContactLaw::kRangeLow && s <= ContactLaw::kRangeHigh)) {
    std::ostringstream msg;
    msg << "contact law evaluated at s = " << s << ", outside its validated range ["
        << ContactLaw::kRangeLow << ", " << ContactLaw::kRangeHigh << "]";
    throw RangeError(msg.str());
  }
}

}  // namespace

double ContactLaw::operator()(double s) const {
  check_range(s);
  if (is_power()) return std::pow(s, p_) - 1.0;
  const std::size_t i = interval(s);
  const double h = knots_[i + 1] - knots_[i];
  const double t = (s - knots_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
         (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
}

double ContactLaw::derivative(double s) const {
  check_range(s);
  if (is_power()) return p_ * std::pow(s, p_ - 1.0);
  const std::size_t i = interval(s);
  const double h = knots_[i + 1] - knots_[i];
  const double t = (s - knots_[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * values_[i] + (-6 * t2 + 6 * t) * values_[i + 1]) / h +
         (3 * t2 - 4 * t + 1) * slopes_[i] + (3 * t2 - 2 * t) * slopes_[i + 1];
}

void ContactLaw::validate() const {
  if (std::abs((*this)(1.0)) > 1e-14) throw ValidationError("contact law must satisfy F(1) = 0");
  constexpr int samples = 1000;
  for (int i = 0; i <= samples; ++i) {
    const double s = kRangeLow + (kRangeHigh - kRangeLow) * i / samples;
    if (!(derivative(s) > 0.0)) {
      std::ostringstream msg;
      msg << "contact law is not strictly increasing on [0.2, 5]: F'(" << s << ") = " << derivative(s);
      throw ValidationError(msg.str());
    }
  }
}

// ------------------------------------------------------------ DynamicsConfig

double DynamicsConfig::base_radius() const { return std::cbrt(4.0 * V0 / std::numbers::pi); }

double DynamicsConfig::time_step() const {
  const double r_e = base_radius();
  const double k = n_nodes / 2;
  double cfl = cfl_c * r_e / (law.derivative(1.0) * k);
  if (metric == MetricMode::paper) cfl /= r_e;
  return dt ? std::min(*dt, cfl) : cfl;
}

void DynamicsConfig::validate() const {
  if (!(V0 > 0.0) || !std::isfinite(V0)) throw ValidationError("V0 must be positive and finite");
  AngularGrid check(n_nodes);
  if (dt && !(*dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(cfl_c > 0.0)) throw ValidationError("cfl_c must be positive");
  if (!(final_time >= 0.0) || !std::isfinite(final_time)) {
    throw ValidationError("final time must be non-negative and finite");
  }
  if (snapshot_stride < 1) throw ValidationError("snapshot_stride must be at least 1");
}

// ------------------------------------------------------------------ velocity

Velocity velocity(const ShapeFunction& shape, const DynamicsConfig& config) {
  const SolveResult sol = solve_base(shape, config.V0, config.solver);
  const int n = shape.size();
  const ShapeFunction on = config.dealias ? shape.resampled(2 * n) : shape;
  const std::vector<double> flux = config.dealias ? boundary_flux(sol, on) : sol.flux;
  const BoundaryFrame frame = boundary_frame(on, config.metric);

  std::vector<double> g(flux.size());
  for (std::size_t j = 0; j < flux.size(); ++j) {
    g[j] = frame.metric[j] * config.law(-sol.lambda * flux[j]);
  }
  PeriodicField field = PeriodicField::from_samples(std::move(g));
  if (config.dealias) field = field.resampled(n);

  Velocity v;
  v.g = std::move(field);
  v.lambda = sol.lambda;
  v.I = sol.I;
  v.cond = sol.cond_estimate;
  v.residual = sol.residual;
  return v;
}

double radial_rhs(double r, const DynamicsConfig& config) {
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  const double s = 4.0 * config.V0 / (std::numbers::pi * r * r * r);
  const double f = config.law(s);
  return config.metric == MetricMode::paper ? r * f : f;
}

// -------------------------------------------------------------------- evolve

std::string to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::none: return "none";
    case HaltReason::star_shape_loss: return "star-shape-loss";
    case HaltReason::solver_ill_conditioned: return "solver-ill-conditioned";
    case HaltReason::contact_law_range: return "contact-law-range";
    case HaltReason::non_finite: return "non-finite";
  }
  return "unknown";
}

namespace {

std::vector<double> axpy(std::span<const double> x, double a, std::span<const double> y) {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] + a * y[j];
  return out;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

TrajectoryRecord evolve(const ShapeFunction& shape0, const DynamicsConfig& config) {
  config.validate();
  const double r_e = config.base_radius();
  if (std::abs(shape0.base_radius() - r_e) > 1e-12 * r_e) {
    std::ostringstream msg;
    msg << "initial shape base radius " << shape0.base_radius()
        << " does not match the equilibrium radius " << r_e << " implied by V0";
    throw ValidationError(msg.str());
  }
  const int n = config.n_nodes;
  const ShapeFunction start(r_e, shape0.resampled(n).rho().band_limited(n / 2));

  TrajectoryRecord rec;
  const double dt0 = config.time_step();
  rec.steps = config.final_time > 0.0
                  ? std::max(1, static_cast<int>(std::ceil(config.final_time / dt0 - 1e-9)))
                  : 0;
  rec.dt = rec.steps > 0 ? config.final_time / rec.steps : 0.0;
  const double dt = rec.dt;

  std::vector<double> rho(start.samples().begin(), start.samples().end());
  auto make_shape = [&](std::vector<double> s) {
    if (!all_finite(s)) throw std::domain_error("non-finite shape value");
    return ShapeFunction::from_samples(r_e, std::move(s));
  };

  try {
    for (int step = 0; step <= rec.steps; ++step) {
      const double t = step * dt;
      const ShapeFunction current = make_shape(rho);
      const Velocity k1 = velocity(current, config);
      if (!all_finite(k1.g.samples())) throw std::domain_error("non-finite velocity");
      if (step % config.snapshot_stride == 0 || step == rec.steps) {
        rec.snapshots.push_back(
            Snapshot{step == rec.steps ? config.final_time : t, current, k1.lambda, k1.I,
                     k1.g.max_abs(), k1.cond});
      }
      if (step == rec.steps) break;

      const Velocity k2 = velocity(make_shape(axpy(rho, 0.5 * dt, k1.g.samples())), config);
      const Velocity k3 = velocity(make_shape(axpy(rho, 0.5 * dt, k2.g.samples())), config);
      const Velocity k4 = velocity(make_shape(axpy(rho, dt, k3.g.samples())), config);
      for (std::size_t j = 0; j < rho.size(); ++j) {
        rho[j] += dt / 6.0 * (k1.g[j] + 2.0 * k2.g[j] + 2.0 * k3.g[j] + k4.g[j]);
      }
    }
  } catch (const std::domain_error& e) {
    rec.halt = HaltReason::non_finite;
    rec.halt_message = e.what();
  } catch (const ValidationError& e) {
    rec.halt = HaltReason::star_shape_loss;
    rec.halt_message = e.what();
  } catch (const SolverError& e) {
    rec.halt = HaltReason::solver_ill_conditioned;
    rec.halt_message = e.what();
  } catch (const RangeError& e) {
    rec.halt = HaltReason::contact_law_range;
    rec.halt_message = e.what();
  }
  return rec;
}

// ---------------------------------------------------------- find_equilibrium

namespace {

// Unknowns: packed coefficients of modes 0 and 2..K (mode 1 is fixed at zero).
std::vector<int> equilibrium_slots(int max_mode) {
  std::vector<int> slots{0};
  for (int i = 3; i < packed_size(max_mode); ++i) slots.push_back(i);
  return slots;
}

}  // namespace

EquilibriumReport find_equilibrium(const ShapeFunction& shape0, const DynamicsConfig& config,
                                   const EquilibriumOptions& options) {
  config.validate();
  const double r_e = config.base_radius();
  const int n = config.n_nodes;
  const ShapeFunction start(r_e, shape0.resampled(n).rho().band_limited(n / 2));
  if (start.rho().max_abs() > 0.1 * r_e) {
    throw ValidationError("find_equilibrium expects |rho|_inf <= 0.1 r_e");
  }

  const CoordDecomposition dec = decompose(start);
  const int max_mode = n / 2 - 1;
  const std::vector<int> slots = equilibrium_slots(max_mode);
  const auto m = static_cast<Eigen::Index>(slots.size());

  auto to_shape = [&](const Eigen::VectorXd& x) {
    std::vector<double> packed(static_cast<std::size_t>(packed_size(max_mode)), 0.0);
    for (Eigen::Index i = 0; i < m; ++i) packed[slots[i]] = x(i);
    return ShapeFunction::from_coeffs(r_e, unpack(packed, n));
  };
  struct Eval {
    Eigen::VectorXd r;
    double sup = 0.0;
  };
  // Jacobian columns perturb single modes up to N/2 − 1; the kernel-tail
  // diagnostic flags those at ~1e-11 absolute, which is harmless for a
  // Newton matrix, so the columns use a looser solver tolerance.
  DynamicsConfig column_config = config;
  column_config.solver.residual_tol = options.jacobian_residual_tol;
  if (options.exec == Exec::parallel) column_config.solver.exec = Exec::serial;
  auto evaluate = [&](const Eigen::VectorXd& x, const DynamicsConfig& cfg) {
    const Velocity v = velocity(to_shape(x), cfg);
    const std::vector<double> packed = pack(v.g.coeffs(), max_mode);
    Eval e;
    e.r.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) e.r(i) = packed[slots[i]];
    e.sup = v.g.max_abs();
    return e;
  };

  Eigen::VectorXd x(m);
  {
    const std::vector<double> packed = pack(dec.rho_bar.coeffs(), max_mode);
    for (Eigen::Index i = 0; i < m; ++i) x(i) = packed[slots[i]];
  }

  EquilibriumReport rep;
  rep.center = dec.v;
  Eval cur = evaluate(x, config);
  const double h = options.fd_step * r_e;
  for (int iter = 0;; ++iter) {
    rep.iterations = iter;
    rep.residual = cur.sup;
    if (cur.sup <= options.tolerance) {
      rep.converged = true;
      rep.message = "converged";
      break;
    }
    if (iter >= options.max_iterations) {
      rep.message = "maximum iterations reached";
      break;
    }

    Eigen::MatrixXd jac(m, m);
    auto column = [&](Eigen::Index c) {
      Eigen::VectorXd xp = x;
      xp(c) += h;
      jac.col(c) = (evaluate(xp, column_config).r - cur.r) / h;
    };
    try {
      for_each_index(m, options.exec, column);
    } catch (const Error& e) {
      rep.message = std::string("jacobian evaluation failed: ") + e.what();
      break;
    }
    const Eigen::VectorXd step = -jac.partialPivLu().solve(cur.r);

    // Armijo backtracking on ‖r‖₂.
    const double merit = cur.r.norm();
    double alpha = 1.0;
    bool accepted = false;
    Eval trial;
    while (alpha >= 1.0 / 1024.0) {
      try {
        trial = evaluate(x + alpha * step, config);
        if (trial.r.norm() <= (1.0 - 1e-4 * alpha) * merit) {
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // Trial shape left the admissible set; shorten the step.
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      rep.message = "line search failed";
      break;
    }
    x += alpha * step;
    cur = std::move(trial);
  }
  rep.rho_bar = to_shape(x);
  return rep;
}

}  // namespace droplet
