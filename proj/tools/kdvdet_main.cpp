// kdvdet: inverse-scattering KdV solver driven by an INI config.
//
//   kdvdet solve --config runs/soliton.ini --out out/soliton
//
// The subcommand must match the mode declared in the config; this keeps
// shell history honest about what a given invocation produced.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kdvdet/config.hpp"
#include "kdvdet/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"KdV via Hankel determinants"};
  app.require_subcommand(1);

  std::string config_path;
  kdv::RunnerOptions ropt;
  const char* modes[] = {"scatter", "solve", "converge", "compare"};
  const char* help[] = {"compute and dump scattering data",
                        "evaluate u(x,t) on a grid",
                        "resolution and truncation studies",
                        "compare against a split-step run"};
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(modes[i], help[i]);
    sub->add_option("--config", config_path, "INI config file")->required();
    sub->add_option("--out", ropt.out_dir, "output directory (default: out)");
    sub->add_flag("--no-cache", ropt.no_cache, "skip the scattering cache entirely");
    sub->add_option("--workers", ropt.workers, "OpenMP thread count (0: default)");
  }

  CLI11_PARSE(app, argc, argv);
  std::string sub = app.get_subcommands().front()->get_name();

  try {
    kdv::RunConfig cfg = kdv::parse_config_file(config_path);
    if (cfg.mode != sub) {
      std::fprintf(stderr, "error: config declares mode '%s' but subcommand is '%s'\n",
                   cfg.mode.c_str(), sub.c_str());
      return 2;
    }
    return kdv::run_experiment(cfg, ropt);
  } catch (const kdv::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
