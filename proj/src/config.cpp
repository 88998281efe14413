#include "droplet/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "droplet/errors.hpp"

namespace droplet {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) throw ValidationError("unknown key '" + k + "' in " + where);
  }
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + "." + key + " must be finite");
  return x;
}

int integer(const json& obj, const char* key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ValidationError(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::map<int, double> mode_map(const json& v, const std::string& where) {
  if (!v.is_object()) throw ValidationError(where + " must map mode numbers to amplitudes");
  std::map<int, double> out;
  for (const auto& [k, x] : v.items()) {
    int mode = -1;
    std::istringstream in(k);
    if (!(in >> mode) || !in.eof() || mode < 1) {
      throw ValidationError(where + ": mode key '" + k + "' must be a positive integer");
    }
    if (!x.is_number()) throw ValidationError(where + "." + k + " must be a number");
    out[mode] = x.get<double>();
  }
  return out;
}

void parse_model(const json& m, DynamicsConfig& d) {
  only_keys(m, "model", {"V0", "contact_law", "metric_mode"});
  d.V0 = number(m, "V0", "model", d.V0);
  if (m.contains("contact_law")) {
    const json& law = m.at("contact_law");
    only_keys(law, "model.contact_law", {"type", "p", "s", "F"});
    const std::string type = law.value("type", "power");
    if (type == "power") {
      d.law = ContactLaw::power(number(law, "p", "model.contact_law", 3.0));
    } else if (type == "table") {
      if (!law.contains("s") || !law.contains("F")) {
        throw ValidationError("model.contact_law of type 'table' needs arrays 's' and 'F'");
      }
      d.law = ContactLaw::table(number_array(law.at("s"), "model.contact_law.s"),
                                number_array(law.at("F"), "model.contact_law.F"));
    } else {
      throw ValidationError("model.contact_law.type must be 'power' or 'table'");
    }
  }
  if (m.contains("metric_mode")) {
    const json& mode = m.at("metric_mode");
    if (mode == "geometric") {
      d.metric = MetricMode::geometric;
    } else if (mode == "paper") {
      d.metric = MetricMode::paper;
    } else {
      throw ValidationError("model.metric_mode must be 'geometric' or 'paper'");
    }
  }
}

void parse_discretization(const json& m, DynamicsConfig& d) {
  only_keys(m, "discretization", {"N", "dt", "cfl_c", "T", "snapshot_stride", "dealias"});
  d.n_nodes = integer(m, "N", "discretization", d.n_nodes);
  if (m.contains("dt") && !m.at("dt").is_null()) d.dt = number(m, "dt", "discretization", 0.0);
  d.cfl_c = number(m, "cfl_c", "discretization", d.cfl_c);
  d.final_time = number(m, "T", "discretization", d.final_time);
  d.snapshot_stride = integer(m, "snapshot_stride", "discretization", d.snapshot_stride);
  if (m.contains("dealias")) {
    if (!m.at("dealias").is_boolean()) throw ValidationError("discretization.dealias must be a boolean");
    d.dealias = m.at("dealias").get<bool>();
  }
}

void parse_initial(const json& m, InitialShape& s) {
  only_keys(m, "initial_shape", {"coefficients", "random", "translate"});
  if (m.contains("coefficients") == m.contains("random")) {
    throw ValidationError("initial_shape needs exactly one of 'coefficients' or 'random'");
  }
  if (m.contains("coefficients")) {
    const json& c = m.at("coefficients");
    only_keys(c, "initial_shape.coefficients", {"a0", "cos", "sin"});
    s.kind = InitialShape::Kind::coefficients;
    s.a0 = number(c, "a0", "initial_shape.coefficients", 0.0);
    if (c.contains("cos")) s.cos = mode_map(c.at("cos"), "initial_shape.coefficients.cos");
    if (c.contains("sin")) s.sin = mode_map(c.at("sin"), "initial_shape.coefficients.sin");
  } else {
    const json& r = m.at("random");
    only_keys(r, "initial_shape.random", {"max_mode", "amplitude", "seed"});
    s.kind = InitialShape::Kind::random;
    s.max_mode = integer(r, "max_mode", "initial_shape.random", s.max_mode);
    s.amplitude = number(r, "amplitude", "initial_shape.random", 0.0);
    if (!r.contains("seed") || !r.at("seed").is_number_unsigned()) {
      throw ValidationError("initial_shape.random.seed must be a non-negative integer");
    }
    s.seed = r.at("seed").get<std::uint64_t>();
    if (s.max_mode < 0) throw ValidationError("initial_shape.random.max_mode must be non-negative");
    if (!(s.amplitude >= 0.0)) throw ValidationError("initial_shape.random.amplitude must be non-negative");
  }
  if (m.contains("translate")) {
    const std::vector<double> t = number_array(m.at("translate"), "initial_shape.translate");
    if (t.size() != 2) throw ValidationError("initial_shape.translate must have two entries");
    s.translate = Vec2(t[0], t[1]);
  }
}

void parse_outputs(const json& m, OutputPaths& o) {
  only_keys(m, "outputs", {"trajectory_csv", "summary_json", "spectrum_json", "solve_csv", "decompose_json"});
  auto str = [&](const char* key, std::string& dst) {
    if (!m.contains(key)) return;
    if (!m.at(key).is_string() || m.at(key).get<std::string>().empty()) {
      throw ValidationError(std::string("outputs.") + key + " must be a non-empty string");
    }
    dst = m.at(key).get<std::string>();
  };
  str("trajectory_csv", o.trajectory_csv);
  str("summary_json", o.summary_json);
  str("spectrum_json", o.spectrum_json);
  str("solve_csv", o.solve_csv);
  str("decompose_json", o.decompose_json);
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  only_keys(doc, "config", {"model", "discretization", "initial_shape", "spectrum", "outputs"});
  ExperimentConfig cfg;
  if (doc.contains("model")) parse_model(doc.at("model"), cfg.dynamics);
  if (doc.contains("discretization")) parse_discretization(doc.at("discretization"), cfg.dynamics);
  if (doc.contains("initial_shape")) parse_initial(doc.at("initial_shape"), cfg.initial);
  if (doc.contains("spectrum")) {
    const json& s = doc.at("spectrum");
    only_keys(s, "spectrum", {"max_mode", "eps", "richardson"});
    cfg.spectrum_max_mode = integer(s, "max_mode", "spectrum", cfg.spectrum_max_mode);
    cfg.jacobian.eps = number(s, "eps", "spectrum", cfg.jacobian.eps);
    if (s.contains("richardson")) {
      if (!s.at("richardson").is_boolean()) throw ValidationError("spectrum.richardson must be a boolean");
      cfg.jacobian.richardson = s.at("richardson").get<bool>();
    }
    if (cfg.spectrum_max_mode < 1 || cfg.spectrum_max_mode >= cfg.dynamics.n_nodes / 2) {
      throw ValidationError("spectrum.max_mode must lie in [1, N/2)");
    }
    if (!(cfg.jacobian.eps >= 1e-7 && cfg.jacobian.eps <= 1e-3)) {
      throw ValidationError("spectrum.eps must lie in [1e-7, 1e-3]");
    }
  }
  if (doc.contains("outputs")) parse_outputs(doc.at("outputs"), cfg.outputs);
  cfg.dynamics.validate();
  if (cfg.initial.kind == InitialShape::Kind::random && cfg.initial.max_mode >= cfg.dynamics.n_nodes / 2) {
    throw ValidationError("initial_shape.random.max_mode must be below N/2");
  }
  for (const auto* modes : {&cfg.initial.cos, &cfg.initial.sin}) {
    if (!modes->empty() && modes->rbegin()->first >= cfg.dynamics.n_nodes / 2) {
      throw ValidationError("initial_shape coefficients must use modes below N/2");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

ShapeFunction random_shape(double r_e, int n_nodes, int max_mode, double amplitude, std::uint64_t seed) {
  PortableRng rng(seed);
  FourierCoeffs c(n_nodes);
  for (int k = 0; k <= max_mode; ++k) {
    c.a[k] = rng.uniform(-1.0, 1.0);
    c.b[k] = k == 0 ? 0.0 : rng.uniform(-1.0, 1.0);
  }
  const PeriodicField raw = PeriodicField::from_coeffs(std::move(c));
  const double peak = raw.max_abs();
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;
  return ShapeFunction(r_e, scale * raw);
}

ShapeFunction build_initial_shape(const ExperimentConfig& config) {
  const DynamicsConfig& d = config.dynamics;
  const double r_e = d.base_radius();
  const InitialShape& s = config.initial;
  ShapeFunction shape;
  if (s.kind == InitialShape::Kind::random) {
    shape = random_shape(r_e, d.n_nodes, s.max_mode, s.amplitude, s.seed);
  } else {
    FourierCoeffs c(d.n_nodes);
    c.a[0] = s.a0;
    for (const auto& [k, v] : s.cos) c.a[k] = v;
    for (const auto& [k, v] : s.sin) c.b[k] = v;
    shape = ShapeFunction::from_coeffs(r_e, std::move(c));
  }
  // The curve shifted by +t is the recentring of the original about −t.
  if (s.translate.squaredNorm() > 0.0) shape = recenter(shape, -s.translate);
  return shape;
}

}  // namespace droplet
