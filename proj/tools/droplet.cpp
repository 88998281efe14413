#include <iostream>

#include "CLI11.hpp"

#include "droplet/commands.hpp"
#include "droplet/kernels.hpp"

int main(int argc, char** argv) {
  droplet::apply_thread_env();

  CLI::App app{"droplet: viscous droplet contact-line simulator"};
  app.require_subcommand(1);

  droplet::CommandContext ctx;
  std::string config;
  std::string out_dir = ".";
  std::vector<std::string> only;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config, "experiment configuration (JSON)");
    if (needs_config) opt->required();
    sub->add_flag("--json", ctx.json, "machine-readable output on stdout");
    sub->add_option("--out-dir", out_dir, "directory for output files");
  };
  add_common(app.add_subcommand("solve", "solve the base problem on the initial shape"), true);
  add_common(app.add_subcommand("evolve", "integrate the flow and track the center"), true);
  add_common(app.add_subcommand("spectrum", "analytic vs finite-difference linearization"), true);
  add_common(app.add_subcommand("decompose", "split the initial shape into center and recentred shape"), true);
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria A1-A8");
  add_common(verify, false);
  verify->add_option("--only", only, "criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : droplet::kExitConfigError;
  }

  if (!config.empty()) ctx.config = config;
  ctx.out_dir = out_dir;
  ctx.only = only;

  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "solve") return droplet::cmd_solve(ctx);
  if (name == "evolve") return droplet::cmd_evolve(ctx);
  if (name == "spectrum") return droplet::cmd_spectrum(ctx);
  if (name == "decompose") return droplet::cmd_decompose(ctx);
  return droplet::cmd_verify(ctx);
}
