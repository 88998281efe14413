#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "droplet/coords.hpp"
#include "droplet/dynamics.hpp"
#include "droplet/linearization.hpp"

namespace droplet {

inline constexpr int kFormatVersion = 1;

/// Writes to a temporary sibling and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip text for a double ("nan", "inf" for non-finite).
std::string format_number(double x);

/// Header: t,v1,v2,rho_bar_l2,rho_bar_max,lambda,mode_0,mode_2,mode_3,mode_4,g_max,cond
std::string trajectory_csv(const TrajectoryRecord& trajectory, const TrackReport& track);

struct SummaryReport {
  double base_radius = 0.0;
  double final_time = 0.0;
  double final_lambda = 0.0;
  Vec2 final_v = Vec2::Zero();
  Vec2 v_inf = Vec2::Zero();
  std::optional<double> decay_rate;
  bool rate_reliable = false;
  std::string rate_note;
  double analytic_slow_rate = 0.0;
  /// max |λ I − V₀| over the snapshots.
  double volume_violation = 0.0;
  /// max |⟨ρ̄, cos⟩|, |⟨ρ̄, sin⟩| over the decomposed snapshots.
  double orthogonality_violation = 0.0;
  double mean_radius_error = 0.0;
  int decomposition_failures = 0;
  std::string halt_reason;
  std::string halt_message;
  int steps = 0;
  double dt = 0.0;
  double wall_clock_s = 0.0;
};

SummaryReport summarize(const TrajectoryRecord& trajectory, const TrackReport& track,
                        const DynamicsConfig& config, double wall_clock_s);

nlohmann::ordered_json to_json(const SummaryReport& s);
nlohmann::ordered_json to_json(const SpectrumReport& r);

std::string to_string(MetricMode mode);

}  // namespace droplet
