#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cdasym/cli/commands.hpp"

namespace {

void add_run_flags(CLI::App& cmd, cdasym::cli::Overrides& o, std::optional<std::string>& out,
                   std::optional<std::string>& config) {
  cmd.add_option("--n", o.n, "grid node count");
  cmd.add_option("--dt", o.dt, "time step");
  cmd.add_option("--t-end", o.t_end, "final time");
  cmd.add_option("--q", o.q, "flux exponent");
  cmd.add_option("--mass", o.mass, "initial mass");
  cmd.add_option("--out", out, "output root (default $CDASYM_OUT or ./cdasym_out)");
  cmd.add_option("--config", config, "TOML file with n, dt, t_end, q, mass")->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cdasym::cli;
  CLI::App app{"cdasym: long-time asymptotics of scalar convection-diffusion equations"};
  app.require_subcommand(1);

  std::string scenario;
  Overrides flags;
  std::optional<std::string> out, config;
  auto* run = app.add_subcommand("run", "run a named scenario");
  std::string names;
  for (const auto& [name, fn] : scenarios()) names += (names.empty() ? "" : " | ") + name;
  run->add_option("scenario", scenario, names)->required();
  add_run_flags(*run, flags, out, config);

  ProfileOptions profile;
  std::optional<std::string> profile_out;
  auto* prof = app.add_subcommand("profile", "self-similar profile f_M for q = 1 + 1/N");
  prof->add_option("--mass", profile.mass, "mass M")->required();
  prof->add_option("--q", profile.q, "flux exponent")->required();
  prof->add_option("--N", profile.dimension, "dimension");
  prof->add_option("--n", profile.n, "grid node count");
  prof->add_flag("--dynamical", profile.dynamical, "also compute the similarity-frame steady state");
  prof->add_option("--out", profile_out, "output root");

  std::string sweep_config;
  unsigned jobs = 1;
  std::optional<std::string> sweep_out;
  auto* sweep = app.add_subcommand("sweep", "run a (q, p, generator) matrix of decay fits");
  sweep->add_option("--config", sweep_config, "TOML sweep matrix")->required()->check(CLI::ExistingFile);
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "output root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*run) {
      Overrides o = config ? merge(overrides_from_toml(*config), flags) : flags;
      return cmd_run(scenario, o, output_root(out));
    }
    if (*prof) return cmd_profile(profile, output_root(profile_out));
    return cmd_sweep(sweep_config, jobs, output_root(sweep_out));
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFail;
  }
}
