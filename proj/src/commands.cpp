#include "droplet/commands.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "droplet/acceptance.hpp"
#include "droplet/config.hpp"
#include "droplet/coords.hpp"
#include "droplet/errors.hpp"
#include "droplet/io.hpp"

namespace droplet {

using nlohmann::ordered_json;

namespace {

std::ostream& out_of(const CommandContext& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& err_of(const CommandContext& ctx) { return ctx.err ? *ctx.err : std::cerr; }

struct Prepared {
  ExperimentConfig config;
  ShapeFunction shape;
};

// Loading the config and building the initial shape map failures to exit 2;
// everything after that maps library errors to exit 3.
int with_config(const CommandContext& ctx, const std::function<int(const Prepared&)>& body) {
  std::ostream& err = err_of(ctx);
  Prepared p;
  try {
    if (!ctx.config) throw ValidationError("--config is required for this command");
    p.config = load_config(*ctx.config);
    p.shape = build_initial_shape(p.config);
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    return body(p);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolverError;
  }
}

std::filesystem::path output(const CommandContext& ctx, const std::string& name) { return ctx.out_dir / name; }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

int cmd_solve(const CommandContext& ctx) {
  return with_config(ctx, [&](const Prepared& p) {
    const DynamicsConfig& d = p.config.dynamics;
    const SolveResult sol = solve_base(p.shape, d.V0, d.solver);
    std::ostringstream csv;
    csv << "theta,rho,flux,lambda\n";
    for (int j = 0; j < p.shape.size(); ++j) {
      csv << format_number(p.shape.grid().node(j)) << ',' << format_number(p.shape.samples()[j]) << ','
          << format_number(sol.flux[j]) << ',' << format_number(sol.lambda) << '\n';
    }
    const auto path = output(ctx, p.config.outputs.solve_csv);
    write_atomic(path, csv.str());

    double fmin = sol.flux.front(), fmax = fmin;
    for (double f : sol.flux) {
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["r_e"] = p.shape.base_radius();
    j["N"] = p.shape.size();
    j["lambda"] = sol.lambda;
    j["I"] = sol.I;
    j["flux_min"] = fmin;
    j["flux_max"] = fmax;
    j["residual"] = sol.residual;
    j["cond_estimate"] = sol.cond_estimate;
    j["csv"] = path.string();
    if (ctx.json) {
      out_of(ctx) << dump(j);
    } else {
      out_of(ctx) << "r_e " << format_number(p.shape.base_radius()) << "  lambda " << format_number(sol.lambda)
                  << "  I " << format_number(sol.I) << "  flux in [" << format_number(fmin) << ", "
                  << format_number(fmax) << "]\nwrote " << path.string() << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_evolve(const CommandContext& ctx) {
  return with_config(ctx, [&](const Prepared& p) {
    const DynamicsConfig& d = p.config.dynamics;
    const auto t0 = std::chrono::steady_clock::now();
    const TrajectoryRecord traj = evolve(p.shape, d);
    const TrackReport tr = track(traj, d.solver.exec);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const SummaryReport summary = summarize(traj, tr, d, wall);

    const auto csv_path = output(ctx, p.config.outputs.trajectory_csv);
    const auto json_path = output(ctx, p.config.outputs.summary_json);
    write_atomic(csv_path, trajectory_csv(traj, tr));
    const ordered_json j = to_json(summary);
    write_atomic(json_path, dump(j));
    if (ctx.json) {
      out_of(ctx) << dump(j);
    } else {
      out_of(ctx) << "steps " << traj.steps << "  snapshots " << traj.snapshots.size() << "  final lambda "
                  << format_number(summary.final_lambda) << "  decay rate "
                  << (summary.decay_rate ? format_number(*summary.decay_rate) : std::string("n/a")) << " ("
                  << summary.rate_note << ")\nwrote " << csv_path.string() << ", " << json_path.string() << '\n';
    }
    if (!traj.completed()) {
      err_of(ctx) << "halted: " << to_string(traj.halt) << ": " << traj.halt_message << '\n';
      return static_cast<int>(kExitHalted);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_spectrum(const CommandContext& ctx) {
  return with_config(ctx, [&](const Prepared& p) {
    const SpectrumReport rep = spectrum(p.config.dynamics, p.config.spectrum_max_mode, p.config.jacobian);
    const auto path = output(ctx, p.config.outputs.spectrum_json);
    const ordered_json j = to_json(rep);
    write_atomic(path, dump(j));
    if (ctx.json) {
      out_of(ctx) << dump(j);
    } else {
      std::ostream& o = out_of(ctx);
      o << "metric " << to_string(rep.metric) << "  F'(1) " << format_number(rep.fprime1) << "  r_e "
        << format_number(rep.base_radius) << "\n";
      o << "kernel_dim " << rep.kernel_dim << "  spectral gap " << format_number(rep.spectral_gap)
        << "  max |J_fd - J_analytic| " << format_number(rep.max_entry_error) << "\n";
      for (const Eigenspace& e : rep.eigenspaces) {
        o << "  " << format_number(e.value) << ':';
        for (const std::string& m : e.modes) o << ' ' << m;
        o << '\n';
      }
      o << "wrote " << path.string() << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_decompose(const CommandContext& ctx) {
  return with_config(ctx, [&](const Prepared& p) {
    const CoordDecomposition dec = decompose(p.shape);
    const FourierCoeffs& c = dec.rho_bar.coeffs();
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["v"] = {dec.v.x(), dec.v.y()};
    j["newton_iters"] = dec.newton_iters;
    j["residual"] = dec.residual;
    j["orthogonality"] = {0.5 * c.a[1], 0.5 * c.b[1]};
    j["rho_bar_l2"] = l2_norm(dec.rho_bar.rho());
    j["rho_bar_max"] = dec.rho_bar.rho().max_abs();
    const int kmax = std::min(16, c.nyquist() - 1);
    j["rho_bar_coeffs"] = pack(c, kmax);
    j["rho_bar_labels"] = packed_labels(kmax);
    const auto path = output(ctx, p.config.outputs.decompose_json);
    write_atomic(path, dump(j));
    if (ctx.json) {
      out_of(ctx) << dump(j);
    } else {
      out_of(ctx) << "v = (" << format_number(dec.v.x()) << ", " << format_number(dec.v.y()) << ")  |rho_bar|_inf "
                  << format_number(dec.rho_bar.rho().max_abs()) << "  newton iterations " << dec.newton_iters
                  << "\nwrote " << path.string() << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_verify(const CommandContext& ctx) {
  AcceptanceOptions opts;
  opts.only = ctx.only;
  std::vector<CriterionResult> results;
  try {
    results = run_acceptance(opts);
  } catch (const Error& e) {
    err_of(ctx) << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  bool all = true;
  for (const CriterionResult& r : results) all = all && r.passed;
  if (ctx.json) {
    out_of(ctx) << dump(to_json(results));
  } else {
    out_of(ctx) << format_table(results);
  }
  if (!all) {
    std::ostringstream names;
    for (const CriterionResult& r : results) {
      if (!r.passed) names << ' ' << r.id;
    }
    err_of(ctx) << "verify failed:" << names.str() << '\n';
    return kExitVerifyFailure;
  }
  return kExitOk;
}

}  // namespace droplet
