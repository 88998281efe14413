#include "droplet/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "droplet/config.hpp"
#include "droplet/coords.hpp"
#include "droplet/errors.hpp"
#include "droplet/io.hpp"
#include "droplet/linearization.hpp"

namespace droplet {

namespace {

using Clock = std::chrono::steady_clock;

class Checker {
 public:
  explicit Checker(CriterionResult& r) : r_(r) {}

  void at_most(const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %s = %.3e <= %.1e", ok ? "ok  " : "FAIL", name.c_str(), value, tol);
    record(name, value, ok, buf);
  }

  void at_least(const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value >= tol;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %s = %.3e >= %.1e", ok ? "ok  " : "FAIL", name.c_str(), value, tol);
    record(name, value, ok, buf);
  }

  void holds(const std::string& name, bool ok, const std::string& detail = "") {
    r_.checks.push_back(std::string(ok ? "ok   " : "FAIL ") + name + (detail.empty() ? "" : ": " + detail));
    r_.passed = r_.passed && ok;
    r_.metrics[name] = ok;
  }

  void note(const std::string& name, double value) { r_.metrics[name] = value; }

 private:
  void record(const std::string& name, double value, bool ok, const char* line) {
    r_.checks.emplace_back(line);
    r_.passed = r_.passed && ok;
    r_.metrics[name] = std::isfinite(value) ? nlohmann::ordered_json(value) : nlohmann::ordered_json(nullptr);
  }

  CriterionResult& r_;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

DynamicsConfig base_config(int n, Exec exec) {
  DynamicsConfig c;
  c.n_nodes = n;
  c.solver.exec = exec;
  return c;
}

double max_abs_diff(std::span<const double> x, double target) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v - target));
  return m;
}

// Trajectories shared between the stability criteria.
struct Run {
  TrajectoryRecord trajectory;
  TrackReport track;
};

DynamicsConfig stability_config(Exec exec) {
  DynamicsConfig c = base_config(128, exec);
  c.final_time = 4.0;
  const int steps = static_cast<int>(std::ceil(c.final_time / c.time_step()));
  c.snapshot_stride = std::max(1, steps / 96);
  return c;
}

Run run_trajectory(const ShapeFunction& shape0, const DynamicsConfig& c, Exec exec) {
  Run r;
  r.trajectory = evolve(shape0, c);
  r.track = track(r.trajectory, exec);
  return r;
}

struct Context {
  Exec exec;
  std::optional<Run> a6;

  const Run& a6_run() {
    if (!a6) {
      const DynamicsConfig c = stability_config(exec);
      FourierCoeffs h(c.n_nodes);
      h.a[0] = 0.01;
      h.a[2] = 0.02;
      h.a[3] = 0.01;
      a6 = run_trajectory(ShapeFunction::from_coeffs(c.base_radius(), h), c, exec);
    }
    return *a6;
  }
};

// ------------------------------------------------------------------ criteria

void a1(Context& ctx, Checker& chk) {
  const DynamicsConfig c = base_config(256, ctx.exec);
  const double r_e = c.base_radius();
  const SolveResult sol = solve_base(ShapeFunction::circle(r_e, c.n_nodes), c.V0, c.solver);
  chk.at_most("r_e_error", std::abs(r_e - 1.0), 1e-14);
  chk.at_most("flux_error", max_abs_diff(sol.flux, -0.5), 1e-10);
  chk.at_most("lambda_error", std::abs(sol.lambda - 2.0), 1e-10);
  chk.at_most("volume_identity", std::abs(sol.lambda * sol.I - c.V0), 1e-14);
}

void a2(Context& ctx, Checker& chk) {
  const DynamicsConfig c = base_config(256, ctx.exec);
  const double r_e = c.base_radius();
  double flux_err = 0.0, lambda_err = 0.0;
  for (const Vec2& v : {Vec2(0.2, 0.0), Vec2(0.12, -0.16)}) {
    const ShapeFunction shifted = recenter(ShapeFunction::circle(r_e, c.n_nodes), -v);
    const SolveResult sol = solve_base(shifted, c.V0, c.solver);
    flux_err = std::max(flux_err, max_abs_diff(sol.flux, -0.5));
    lambda_err = std::max(lambda_err, std::abs(sol.lambda - 2.0));
  }
  chk.at_most("flux_error", flux_err, 1e-8);
  chk.at_most("lambda_error", lambda_err, 1e-8);
}

void a3(Context& ctx, Checker& chk) {
  SolverOptions opts;
  opts.method = SolverOptions::Method::collocation;
  opts.exec = ctx.exec;
  const int n = 128;
  double worst = 0.0;
  for (const double r_e : {1.0, 2.0}) {
    const ShapeFunction disk = ShapeFunction::circle(r_e, n);
    for (int k = 1; k <= 32; ++k) {
      for (const bool sine : {false, true}) {
        FourierCoeffs h(n);
        (sine ? h.b : h.a)[k] = 1.0;
        const std::vector<double> g = to_samples(h);
        const HarmonicExtension ext = harmonic_extend(disk, g, opts);
        const FourierCoeffs expect = dtn_disk(h, r_e);
        const FourierCoeffs& got = ext.normal_derivative.coeffs();
        double err = 0.0;
        for (int m = 0; m < n / 2; ++m) {
          err = std::max({err, std::abs(got.a[m] - expect.a[m]), std::abs(got.b[m] - expect.b[m])});
        }
        worst = std::max(worst, err / (k / r_e));
      }
    }
  }
  chk.at_most("dtn_rel_error", worst, 1e-10);
}

void a4(Context& ctx, Checker& chk) {
  const DynamicsConfig c = base_config(256, ctx.exec);
  JacobianOptions jo;
  jo.eps = 1e-5;
  jo.richardson = true;
  jo.exec = ctx.exec;
  const int max_mode = 16;
  const SpectrumReport rep = spectrum(c, max_mode, jo);
  const double unit = rep.rate_unit;

  chk.at_most("max_entry_error", rep.max_entry_error, 1e-4 * unit);
  chk.note("coupling_norm", rep.coupling_norm);

  std::vector<double> by_size = rep.numerical_eigenvalues;
  std::sort(by_size.begin(), by_size.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  chk.at_most("kernel_eigenvalues", std::max(std::abs(by_size[0]), std::abs(by_size[1])), 1e-6);
  chk.holds("kernel_dim_2", rep.kernel_dim == 2, "kernel_dim = " + std::to_string(rep.kernel_dim));

  // Distinct eigenvalues must be exactly −unit·{0, 1, ..., max_mode − 1}.
  const double tol = 1e-4 * unit;
  std::vector<double> distinct;
  for (double x : rep.numerical_eigenvalues) {
    if (distinct.empty() || std::abs(distinct.back() - x) > tol) distinct.push_back(x);
  }
  double set_err = distinct.size() == static_cast<std::size_t>(max_mode) ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < distinct.size() && std::isfinite(set_err); ++i) {
    set_err = std::max(set_err, std::abs(distinct[i] + unit * static_cast<double>(i)));
  }
  chk.at_most("eigenvalue_set_error", set_err, tol);
  chk.note("distinct_eigenvalues", static_cast<double>(distinct.size()));

  const double mu0 = -3.0 * rep.fprime1 / rep.base_radius;
  chk.at_most("constant_mode_vs_3F'/r_e", std::abs(rep.constant_mode - mu0), 1e-4);
  chk.at_most("constant_mode_vs_radial_ode", std::abs(rep.constant_mode - rep.radial_derivative), 1e-4);
}

void a5(Context& ctx, Checker& chk) {
  const double eps = 1e-4;
  double di_err = 0.0, dl_err = 0.0;
  for (const double V0 : {std::numbers::pi / 4.0, 2.0 * std::numbers::pi}) {
    DynamicsConfig c = base_config(256, ctx.exec);
    c.V0 = V0;
    const double r_e = c.base_radius();
    FourierCoeffs one(c.n_nodes);
    one.a[0] = 1.0;
    auto solve_at = [&](double s) {
      FourierCoeffs h(c.n_nodes);
      h.a[0] = s;
      return solve_base(ShapeFunction::from_coeffs(r_e, h), V0, c.solver);
    };
    const SolveResult p = solve_at(eps), m = solve_at(-eps);
    const double di_fd = (p.I - m.I) / (2 * eps);
    const double dl_fd = (p.lambda - m.lambda) / (2 * eps);
    const double di = volume_derivative(one, r_e);
    const double dl = lambda_derivative(one, c);
    di_err = std::max(di_err, std::abs(di - di_fd) / std::abs(di_fd));
    dl_err = std::max(dl_err, std::abs(dl - dl_fd) / std::abs(dl_fd));
    chk.note("dI_analytic_r_e=" + format_number(r_e), di);
    chk.note("dlambda_analytic_r_e=" + format_number(r_e), dl);
  }
  chk.at_most("dI_rel_error", di_err, 1e-6);
  chk.at_most("dlambda_rel_error", dl_err, 1e-6);

  const DynamicsConfig c = base_config(256, ctx.exec);
  const double r_e = c.base_radius();
  const double e = 1e-5;
  FourierCoeffs h(c.n_nodes);
  h.a[2] = e;
  const SolveResult p = solve_base(ShapeFunction::from_coeffs(r_e, h), c.V0, c.solver);
  h.a[2] = -e;
  const SolveResult m = solve_base(ShapeFunction::from_coeffs(r_e, h), c.V0, c.solver);
  FourierCoeffs dir(c.n_nodes);
  dir.a[2] = 1.0;
  const std::vector<double> expect = to_samples(flux_derivative(dir, r_e));
  double err = 0.0;
  for (int j = 0; j < c.n_nodes; ++j) err = std::max(err, std::abs((p.flux[j] - m.flux[j]) / (2 * e) - expect[j]));
  chk.at_most("flux_derivative_cos2_error", err, 1e-6);
}

void a6(Context& ctx, Checker& chk) {
  const Run& run = ctx.a6_run();
  const DynamicsConfig c = stability_config(ctx.exec);
  chk.holds("trajectory_completed", run.trajectory.completed(), run.trajectory.halt_message);
  const double expect = (2.0 - 1.0) * c.law.derivative(1.0) / c.base_radius();
  const double rate = run.track.decay_rate.value_or(NAN);
  chk.note("fitted_rate", rate);
  chk.holds("rate_fit_reliable", run.track.rate_reliable, run.track.rate_note);
  chk.at_most("rate_rel_error", std::abs(rate - expect) / expect, 0.05);
  const TrackPoint& last = run.track.points.back();
  chk.at_most("mean_radius_error", last.ok ? std::abs(last.modes[0]) : NAN, 1e-5);
  chk.at_most("lambda_T_error", std::abs(run.trajectory.snapshots.back().lambda - 2.0 / c.base_radius()), 1e-6);
}

void a7(Context& ctx, Checker& chk) {
  const DynamicsConfig c = stability_config(ctx.exec);
  const double r_e = c.base_radius();
  FourierCoeffs h(c.n_nodes);
  h.a[2] = 0.03;
  h.b[3] = 0.03;
  const ShapeFunction shape0 = ShapeFunction::from_coeffs(r_e, h);
  const Run run = run_trajectory(shape0, c, ctx.exec);
  chk.holds("trajectory_completed", run.trajectory.completed(), run.trajectory.halt_message);
  const double rate = ctx.a6_run().track.decay_rate.value_or(NAN);
  chk.note("a6_rate", rate);

  const std::vector<TrackPoint>& pts = run.track.points;
  const bool all_ok = std::all_of(pts.begin(), pts.end(), [](const TrackPoint& p) { return p.ok; });
  chk.holds("all_snapshots_decomposed", all_ok);
  if (!all_ok || !std::isfinite(rate)) return;

  const Vec2 v_inf = run.track.v_inf;
  chk.note("drift", (v_inf - pts.front().v).norm());
  chk.at_most("final_increment", (pts.back().v - pts[pts.size() - 2].v).norm(), 1e-10);

  // Envelope C e^{−0.9 σ t}: C is calibrated on the first quarter of the run
  // and must bound the distance to v_∞ everywhere after it.
  const double T = pts.back().t;
  double C = 0.0;
  for (const TrackPoint& p : pts) {
    if (p.t <= T / 4) C = std::max(C, (p.v - v_inf).norm() * std::exp(0.9 * rate * p.t));
  }
  double excess = 0.0;
  for (const TrackPoint& p : pts) {
    if (p.t <= T / 4) continue;
    const double bound = C * std::exp(-0.9 * rate * p.t) + 1e-12 * r_e;
    excess = std::max(excess, (p.v - v_inf).norm() / bound);
  }
  chk.note("envelope_C", C);
  chk.at_most("envelope_ratio", excess, 1.0);

  // Equivariance: the same data shifted by (0.1, 0).
  const Vec2 shift(0.1, 0.0);
  const Run moved = run_trajectory(recenter(shape0, -shift), c, ctx.exec);
  chk.holds("shifted_trajectory_completed", moved.trajectory.completed(), moved.trajectory.halt_message);
  chk.at_most("v_inf_equivariance", (moved.track.v_inf - v_inf - shift).norm(), 1e-6);
}

void a8(Context& ctx, Checker& chk) {
  DynamicsConfig c = base_config(128, ctx.exec);
  const double r_e = c.base_radius();
  EquilibriumOptions eo;
  eo.exec = ctx.exec;
  int converged = 0;
  double worst_rho = 0.0, worst_round = 0.0, worst_jac = 0.0, worst_iters = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ShapeFunction rho = random_shape(r_e, c.n_nodes, 6, 0.03 * r_e, seed);
    const EquilibriumReport eq = find_equilibrium(rho, c, eo);
    if (eq.converged) ++converged;
    worst_rho = std::max(worst_rho, eq.rho_bar.rho().max_abs());
    worst_iters = std::max(worst_iters, static_cast<double>(eq.iterations));

    const CoordDecomposition dec = decompose(rho);
    const ShapeFunction back = recompose(dec.v, dec.rho_bar);
    double round = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) round = std::max(round, std::abs(back.samples()[j] - rho.samples()[j]));
    worst_round = std::max(worst_round, round);

    const Eigen::Matrix2d jac = phi_jacobian(rho, Vec2::Zero(), 1e-6 * r_e);
    const double dev = (jac + 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
    worst_jac = std::max(worst_jac, dev / (2.0 * rho.rho().max_abs()));
  }
  chk.holds("all_seeds_converged", converged == 10, std::to_string(converged) + "/10");
  chk.at_most("equilibrium_rho_bar", worst_rho, 1e-8);
  chk.note("max_newton_iterations", worst_iters);
  chk.at_most("decompose_round_trip", worst_round, 1e-9);
  chk.at_most("phi_jacobian_deviation_over_2rho", worst_jac, 1.0);
  const Eigen::Matrix2d j0 = phi_jacobian(ShapeFunction::circle(r_e, c.n_nodes), Vec2::Zero(), 1e-6 * r_e);
  chk.at_most("phi_jacobian_at_circle", (j0 + 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-8);
}

struct Entry {
  const char* id;
  const char* title;
  double budget_s;
  void (*fn)(Context&, Checker&);
};

const Entry kEntries[] = {
    {"A1", "equilibrium constants", 1.0, a1},
    {"A2", "translated-disk solver oracle", 1.0, a2},
    {"A3", "disk DTN multiplier k/r_e", 0.0, a3},
    {"A4", "linearization adjudication", 60.0, a4},
    {"A5", "Hadamard constants", 0.0, a5},
    {"A6", "nonlinear stability", 120.0, a6},
    {"A7", "center drift and equivariance", 0.0, a7},
    {"A8", "rigidity probe and coordinates", 60.0, a8},
};

}  // namespace

std::vector<std::string> acceptance_ids() {
  std::vector<std::string> ids;
  for (const Entry& e : kEntries) ids.emplace_back(e.id);
  return ids;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  for (const std::string& id : options.only) {
    const auto ids = acceptance_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
      throw ValidationError("unknown acceptance criterion '" + id + "'");
    }
  }
  Context ctx{options.exec, std::nullopt};
  std::vector<CriterionResult> out;
  for (const Entry& e : kEntries) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), e.id) == options.only.end()) {
      continue;
    }
    CriterionResult r;
    r.id = e.id;
    r.title = e.title;
    r.passed = true;
    Checker chk(r);
    const auto t0 = Clock::now();
    try {
      e.fn(ctx, chk);
    } catch (const std::exception& ex) {
      chk.holds("no_exception", false, ex.what());
    }
    r.seconds = seconds_since(t0);
    if (e.budget_s > 0.0) chk.at_most("runtime_s", r.seconds, e.budget_s);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  bool all = true;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CriterionResult& r : results) {
    all = all && r.passed;
    arr.push_back({{"id", r.id},
                   {"title", r.title},
                   {"passed", r.passed},
                   {"seconds", r.seconds},
                   {"checks", r.checks},
                   {"metrics", r.metrics}});
  }
  j["passed"] = all;
  j["criteria"] = arr;
  return j;
}

std::string format_table(const std::vector<CriterionResult>& results) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %-34s %-6s %9s\n", "id", "criterion", "result", "time[s]");
  out << line;
  for (const CriterionResult& r : results) {
    std::snprintf(line, sizeof line, "%-4s %-34s %-6s %9.2f\n", r.id.c_str(), r.title.c_str(),
                  r.passed ? "PASS" : "FAIL", r.seconds);
    out << line;
    if (!r.passed) {
      for (const std::string& c : r.checks) {
        if (c.rfind("FAIL", 0) == 0) out << "       " << c << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace droplet
