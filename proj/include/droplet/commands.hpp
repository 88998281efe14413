#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace droplet {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailure = 1,
  kExitConfigError = 2,
  kExitSolverError = 3,
  kExitHalted = 4,
};

struct CommandContext {
  std::optional<std::filesystem::path> config;
  bool json = false;
  std::filesystem::path out_dir = ".";
  /// verify only: restrict to these criterion ids.
  std::vector<std::string> only;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

int cmd_solve(const CommandContext& ctx);
int cmd_evolve(const CommandContext& ctx);
int cmd_spectrum(const CommandContext& ctx);
int cmd_decompose(const CommandContext& ctx);
int cmd_verify(const CommandContext& ctx);

}  // namespace droplet
