#include "droplet/coords.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "droplet/errors.hpp"

namespace droplet {

Vec2 phi(const ShapeFunction& shape, const Vec2& v) {
  const ShapeFunction moved = recenter(shape, v);
  const FourierCoeffs& c = moved.coeffs();
  return 0.5 * Vec2(c.a[1], c.b[1]);
}

Eigen::Matrix2d phi_jacobian(const ShapeFunction& shape, const Vec2& v, double step) {
  Eigen::Matrix2d j;
  for (int i = 0; i < 2; ++i) {
    Vec2 e = Vec2::Zero();
    e(i) = step;
    j.col(i) = (phi(shape, v + e) - phi(shape, v - e)) / (2.0 * step);
  }
  return j;
}

CoordDecomposition decompose(const ShapeFunction& shape) {
  const double r_e = shape.base_radius();
  if (shape.rho().max_abs() > 0.3 * r_e) {
    throw ValidationError("decompose expects |rho|_inf <= 0.3 r_e");
  }
  constexpr int kMaxIter = 25;
  const double tol = 1e-12 * r_e;
  const double step = 1e-6 * r_e;

  // Φ ≈ ⟨ρ, (cos, sin)⟩ − v/2, so v⁰ = 2⟨ρ, (cos, sin)⟩ = (a₁, b₁).
  CoordDecomposition out;
  out.v = Vec2(shape.coeffs().a[1], shape.coeffs().b[1]);
  try {
    for (int it = 0;; ++it) {
      const Vec2 f = phi(shape, out.v);
      out.residual = f.norm();
      out.newton_iters = it;
      if (out.residual <= tol) break;
      if (it >= kMaxIter) {
        std::ostringstream msg;
        msg << "center decomposition did not converge in " << kMaxIter
            << " Newton iterations (|Phi| = " << out.residual << ")";
        throw DecompositionError(msg.str());
      }
      out.v -= phi_jacobian(shape, out.v, step).partialPivLu().solve(f);
    }
  } catch (const ValidationError& e) {
    throw DecompositionError(std::string("center decomposition left the star-shaped regime: ") +
                             e.what());
  }
  out.rho_bar = recenter(shape, out.v);
  return out;
}

ShapeFunction recompose(const Vec2& v, const ShapeFunction& rho_bar) { return recenter(rho_bar, -v); }

namespace {

// q = ρ̄′/(r_e + ρ̄) on the 2N grid.
std::vector<double> log_radius_slope(const ShapeFunction& rho_bar, int m) {
  const ShapeFunction fine = rho_bar.resampled(m);
  const PeriodicField d = derivative(fine);
  std::vector<double> q(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) q[j] = d[j] / fine.radius(j);
  return q;
}

}  // namespace

Eigen::Matrix2d matrix_M(const ShapeFunction& rho_bar) {
  const int m = 2 * rho_bar.size();
  const std::vector<double> q = log_radius_slope(rho_bar, m);
  double qsc = 0.0, qcc = 0.0, qss = 0.0;
  for (int j = 0; j < m; ++j) {
    const double t = kTwoPi * j / m;
    const double c = std::cos(t), s = std::sin(t);
    qsc += q[j] * s * c;
    qcc += q[j] * c * c;
    qss += q[j] * s * s;
  }
  qsc /= m;
  qcc /= m;
  qss /= m;
  Eigen::Matrix2d mat;
  mat << 1.0 + 2.0 * qsc, -2.0 * qcc, 2.0 * qss, 1.0 - 2.0 * qsc;
  if (mat.determinant() < 0.1) {
    std::ostringstream msg;
    msg << "matrix M(rho_bar) is nearly singular (det = " << mat.determinant()
        << "); shape outside the reduced-coordinate regime";
    throw ValidationError(msg.str());
  }
  return mat;
}

ReducedState reduced_rhs(const ShapeFunction& rho_bar, const DynamicsConfig& config) {
  if (config.metric != MetricMode::geometric) {
    throw ValidationError("reduced (v, rho_bar) dynamics require the geometric metric mode");
  }
  ReducedState out;
  out.g = velocity(rho_bar, config);
  out.M = matrix_M(rho_bar);
  const FourierCoeffs& gc = out.g.g.coeffs();
  out.v_dot = out.M.partialPivLu().solve(Vec2(gc.a[1], gc.b[1]));

  const int n = rho_bar.size();
  const int m = 2 * n;
  const std::vector<double> q = log_radius_slope(rho_bar, m);
  const PeriodicField g_fine = out.g.g.resampled(m);
  std::vector<double> s(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double t = kTwoPi * j / m;
    const double tau_dot_v = -out.v_dot.x() * std::sin(t) + out.v_dot.y() * std::cos(t);
    s[j] = g_fine[j] + q[j] * tau_dot_v;
  }
  out.rho_bar_dot = PeriodicField::from_samples(std::move(s)).resampled(n).without_mode(1);
  return out;
}

double invariance_check(const ShapeFunction& shape, const Vec2& v, double V0,
                        const SolverOptions& options) {
  const SolveResult base = solve_base(shape, V0, options);
  const SolveResult moved = solve_base(recenter(shape, v), V0, options);
  double defect = 0.0;
  for (int j = 0; j < shape.size(); ++j) {
    const Vec2 y = shape.point(j) - v;
    const double angle = std::atan2(y.y(), y.x());
    defect = std::max(defect, std::abs(base.flux[j] - moved.flux_field(angle)));
  }
  return defect;
}

// --------------------------------------------------------------------- track

namespace {

TrackPoint track_point(const Snapshot& snap) {
  TrackPoint p;
  p.t = snap.t;
  try {
    const CoordDecomposition dec = decompose(snap.shape);
    const PeriodicField& rb = dec.rho_bar.rho();
    const FourierCoeffs& c = rb.coeffs();
    p.v = dec.v;
    p.rho_bar_l2 = l2_norm(rb);
    p.rho_bar_max = rb.max_abs();
    p.modes.resize(5);
    p.modes[0] = c.a[0];
    for (int k = 1; k < 5 && k <= c.nyquist(); ++k) p.modes[k] = std::hypot(c.a[k], c.b[k]);
    p.orthogonality = 0.5 * std::hypot(c.a[1], c.b[1]);
    p.ok = true;
  } catch (const Error& e) {
    p.error = e.what();
  }
  return p;
}

}  // namespace

TrackReport track(const TrajectoryRecord& trajectory, Exec exec) {
  TrackReport rep;
  const auto n = static_cast<long>(trajectory.snapshots.size());
  rep.points.resize(trajectory.snapshots.size());
  for_each_index(n, exec, [&](long i) { rep.points[i] = track_point(trajectory.snapshots[i]); });

  std::vector<const TrackPoint*> good;
  for (const TrackPoint& p : rep.points) {
    if (p.ok) good.push_back(&p);
  }
  if (good.empty()) {
    rep.rate_note = "no snapshot could be decomposed";
    return rep;
  }
  rep.v_final = good.back()->v;
  rep.v_inf = rep.v_final;

  if (n < 20) {
    rep.rate_note = "not applicable: fewer than 20 snapshots";
    return rep;
  }
  const double r_e = trajectory.snapshots.front().shape.base_radius();
  const std::size_t first = good.size() - std::max<std::size_t>(good.size() / 3, 3);
  double lo = good[first]->rho_bar_l2, hi = lo;
  for (std::size_t i = first; i < good.size(); ++i) {
    lo = std::min(lo, good[i]->rho_bar_l2);
    hi = std::max(hi, good[i]->rho_bar_l2);
  }
  if (hi < 1e-12 * r_e || lo <= 0.0) {
    rep.rate_note = "not applicable: shape already at equilibrium";
    return rep;
  }

  // Least squares for log ‖ρ̄‖ = c − σ t over the final third.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double count = static_cast<double>(good.size() - first);
  for (std::size_t i = first; i < good.size(); ++i) {
    const double t = good[i]->t, y = std::log(good[i]->rho_bar_l2);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double slope = (count * sty - st * sy) / (count * stt - st * st);
  rep.decay_rate = -slope;
  rep.rate_reliable = std::log10(hi / lo) >= 1.0;
  rep.rate_note = rep.rate_reliable ? "fit over final third"
                                    : "unreliable: |rho_bar| spans less than one decade in the fit window";

  // v̇ decays exponentially; extrapolate ∫_T^∞ v̇ from the last two increments.
  if (good.size() >= 3) {
    const TrackPoint& a = *good[good.size() - 3];
    const TrackPoint& b = *good[good.size() - 2];
    const TrackPoint& c = *good[good.size() - 1];
    const Vec2 d1 = b.v - a.v, d2 = c.v - b.v;
    const double dt1 = b.t - a.t, dt2 = c.t - b.t;
    double s = 0.0;
    if (d1.norm() > 1e-15 * r_e && d2.norm() > 1e-15 * r_e && d1.norm() / dt1 > d2.norm() / dt2) {
      // Rates per unit time, centred at the interval midpoints.
      s = std::log((d1.norm() / dt1) / (d2.norm() / dt2)) / (0.5 * (dt1 + dt2));
    } else if (rep.decay_rate && *rep.decay_rate > 0.0) {
      s = *rep.decay_rate;
    }
    if (s > 0.0) {
      rep.center_rate = s;
      rep.v_inf = c.v + d2 / std::expm1(s * dt2);
    }
  }
  return rep;
}

}  // namespace droplet
