#include "droplet/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "droplet/errors.hpp"

namespace droplet {

using nlohmann::ordered_json;

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string trajectory_csv(const TrajectoryRecord& trajectory, const TrackReport& track) {
  std::ostringstream out;
  out << "t,v1,v2,rho_bar_l2,rho_bar_max,lambda,mode_0,mode_2,mode_3,mode_4,g_max,cond\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < trajectory.snapshots.size(); ++i) {
    const Snapshot& s = trajectory.snapshots[i];
    const TrackPoint& p = track.points[i];
    auto mode = [&](int k) { return p.ok ? p.modes[static_cast<std::size_t>(k)] : nan; };
    const double row[] = {s.t,
                          p.ok ? p.v.x() : nan,
                          p.ok ? p.v.y() : nan,
                          p.ok ? p.rho_bar_l2 : nan,
                          p.ok ? p.rho_bar_max : nan,
                          s.lambda,
                          mode(0),
                          mode(2),
                          mode(3),
                          mode(4),
                          s.g_max,
                          s.cond};
    for (std::size_t c = 0; c < std::size(row); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
  return out.str();
}

std::string to_string(MetricMode mode) { return mode == MetricMode::paper ? "paper" : "geometric"; }

SummaryReport summarize(const TrajectoryRecord& trajectory, const TrackReport& track,
                        const DynamicsConfig& config, double wall_clock_s) {
  SummaryReport s;
  const double r_e = config.base_radius();
  s.base_radius = r_e;
  const double fp = config.law.derivative(1.0);
  s.analytic_slow_rate = config.metric == MetricMode::paper ? fp : fp / r_e;
  if (!trajectory.snapshots.empty()) {
    const Snapshot& last = trajectory.snapshots.back();
    s.final_time = last.t;
    s.final_lambda = last.lambda;
  }
  for (const Snapshot& snap : trajectory.snapshots) {
    s.volume_violation = std::max(s.volume_violation, std::abs(snap.lambda * snap.I - config.V0));
  }
  for (const TrackPoint& p : track.points) {
    if (!p.ok) {
      ++s.decomposition_failures;
      continue;
    }
    s.orthogonality_violation = std::max(s.orthogonality_violation, p.orthogonality);
  }
  s.final_v = track.v_final;
  s.v_inf = track.v_inf;
  s.decay_rate = track.decay_rate;
  s.rate_reliable = track.rate_reliable;
  s.rate_note = track.rate_note;
  if (!track.points.empty() && track.points.back().ok) {
    s.mean_radius_error = std::abs(track.points.back().modes[0]);
  } else {
    s.mean_radius_error = std::numeric_limits<double>::quiet_NaN();
  }
  s.halt_reason = trajectory.completed() ? "" : to_string(trajectory.halt);
  s.halt_message = trajectory.halt_message;
  s.steps = trajectory.steps;
  s.dt = trajectory.dt;
  s.wall_clock_s = wall_clock_s;
  return s;
}

namespace {

ordered_json vec(const Vec2& v) { return ordered_json::array({v.x(), v.y()}); }

ordered_json finite_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

}  // namespace

ordered_json to_json(const SummaryReport& s) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["r_e"] = s.base_radius;
  j["final_time"] = s.final_time;
  j["final_lambda"] = finite_or_null(s.final_lambda);
  j["final_v"] = vec(s.final_v);
  j["v_inf"] = vec(s.v_inf);
  j["decay_rate"] = s.decay_rate ? finite_or_null(*s.decay_rate) : ordered_json(nullptr);
  j["decay_rate_reliable"] = s.rate_reliable;
  j["decay_rate_note"] = s.rate_note;
  j["analytic_slow_rate"] = s.analytic_slow_rate;
  j["max_invariant_violations"] = {
      {"volume_constraint", s.volume_violation},
      {"orthogonality", s.orthogonality_violation},
  };
  j["final_mean_radius_error"] = finite_or_null(s.mean_radius_error);
  j["decomposition_failures"] = s.decomposition_failures;
  j["halt_reason"] = s.halt_reason.empty() ? ordered_json(nullptr) : ordered_json(s.halt_reason);
  j["halt_message"] = s.halt_message.empty() ? ordered_json(nullptr) : ordered_json(s.halt_message);
  j["steps"] = s.steps;
  j["dt"] = s.dt;
  j["wall_clock_s"] = s.wall_clock_s;
  return j;
}

ordered_json to_json(const SpectrumReport& r) {
  ordered_json j;
  j["format_version"] = SpectrumReport::kFormatVersion;
  j["metric_mode"] = to_string(r.metric);
  j["r_e"] = r.base_radius;
  j["F_prime_1"] = r.fprime1;
  j["rate_unit"] = r.rate_unit;
  j["max_mode"] = r.max_mode;
  j["eps"] = r.eps;
  j["richardson"] = r.richardson;
  j["labels"] = r.labels;
  j["analytic"] = r.analytic;
  j["numerical"] = r.numerical;
  j["abs_err"] = r.abs_err;
  j["analytic_eigenvalues"] = r.analytic_eigenvalues;
  j["numerical_eigenvalues"] = r.numerical_eigenvalues;
  j["max_imag"] = r.max_imag;
  j["max_entry_error"] = r.max_entry_error;
  j["coupling_norm"] = r.coupling_norm;
  j["kernel_dim"] = r.kernel_dim;
  j["kernel_tol"] = r.kernel_tol;
  j["kernel_residual"] = r.kernel_residual;
  j["spectral_gap"] = r.spectral_gap;
  j["constant_mode"] = r.constant_mode;
  j["radial_rhs_derivative"] = r.radial_derivative;
  ordered_json spaces = ordered_json::array();
  for (const Eigenspace& e : r.eigenspaces) spaces.push_back({{"value", e.value}, {"modes", e.modes}});
  j["eigenspaces"] = spaces;
  j["paper_claimed"] = r.paper_claimed;
  j["paper_value_note"] = r.paper_value_note;
  return j;
}

}  // namespace droplet
