#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>

#include "json.hpp"

#include "droplet/dynamics.hpp"
#include "droplet/linearization.hpp"

namespace droplet {

struct InitialShape {
  enum class Kind { coefficients, random };
  Kind kind = Kind::coefficients;
  double a0 = 0.0;
  std::map<int, double> cos;
  std::map<int, double> sin;
  int max_mode = 4;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  /// Rigid shift applied to the curve after it is built.
  Vec2 translate = Vec2::Zero();
};

struct OutputPaths {
  std::string trajectory_csv = "trajectory.csv";
  std::string summary_json = "summary.json";
  std::string spectrum_json = "spectrum.json";
  std::string solve_csv = "solve.csv";
  std::string decompose_json = "decompose.json";
};

struct ExperimentConfig {
  DynamicsConfig dynamics;
  InitialShape initial;
  OutputPaths outputs;
  int spectrum_max_mode = 16;
  JacobianOptions jacobian{1e-5, true};
};

/// Parses and validates a configuration document. Unknown keys, wrong types
/// and out-of-range values raise ValidationError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Uniform doubles from mt19937_64, converted with the top 53 bits by hand:
/// the engine's sequence is fixed by the standard, the distributions are not.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// Random shape with modes 0..max_mode, scaled so that ‖ρ‖∞ = amplitude.
ShapeFunction random_shape(double r_e, int n_nodes, int max_mode, double amplitude, std::uint64_t seed);

ShapeFunction build_initial_shape(const ExperimentConfig& config);

}  // namespace droplet
