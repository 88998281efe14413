#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "droplet/kernels.hpp"

namespace droplet {

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  /// One line per individual check: "name value <= tol".
  std::vector<std::string> checks;
  double seconds = 0.0;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
};

struct AcceptanceOptions {
  /// Criterion ids to run; empty runs all of A1..A8.
  std::vector<std::string> only;
  Exec exec = default_exec();
};

std::vector<std::string> acceptance_ids();
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results);
/// Fixed-width table, one row per criterion plus the failing checks.
std::string format_table(const std::vector<CriterionResult>& results);

}  // namespace droplet
