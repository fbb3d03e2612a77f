// bergweight: run, list and validate experiment configs.
//
//   bergweight list [--defaults <id>]
//   bergweight validate --config cfg.json
//   bergweight run --config cfg.json [--out dir] [--seed n] [--threads n]
//
// Exit codes: 0 all assertions pass, 2 assertion failure, 3 config error,
// 4 numerical error.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "bergweight/lab.hpp"

namespace {

constexpr int kExitFail = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumerical = 4;

int exit_for(const bergweight::Error& e) {
  using bergweight::ErrorCode;
  return (e.code() == ErrorCode::ConfigInvalid || e.code() == ErrorCode::ExperimentUnknown) ? kExitConfig
                                                                                             : kExitNumerical;
}

int cmd_list(const std::string& defaults_for) {
  if (!defaults_for.empty()) {
    const bergweight::CatalogEntry* e = bergweight::find_experiment(defaults_for);
    if (!e) {
      std::cerr << "unknown experiment '" << defaults_for << "'\n";
      return kExitConfig;
    }
    std::cout << e->default_config.dump(2) << "\n";
    return 0;
  }
  for (const auto& e : bergweight::list_experiments())
    std::printf("%-20s %-32s %s\n", e.id.c_str(), e.tag.c_str(), e.claim.c_str());
  return 0;
}

int cmd_validate(const std::string& path) {
  const bergweight::Diagnostics d = bergweight::validate_config(path);
  for (const auto& w : d.warnings) std::cout << "warning: " << w << "\n";
  for (const auto& e : d.errors) std::cout << "error: " << e << "\n";
  if (d.ok()) std::cout << path << ": ok\n";
  return d.ok() ? 0 : kExitConfig;
}

int cmd_run(const std::string& path, std::string out, std::optional<std::uint64_t> seed, int threads) {
  const bergweight::ExperimentConfig cfg = bergweight::load_config(path);
  if (out.empty()) out = cfg.output.empty() ? "results/" + cfg.experiment : cfg.output;
  bergweight::RunOptions opt;
  opt.threads = threads > 0 ? threads : bergweight::default_threads();
  opt.seed = seed;
  const bergweight::ExperimentResult r = bergweight::run_experiment(cfg, opt);
  bergweight::write_result(r, out);
  for (const auto& v : r.verdicts)
    std::printf("%s  %-48s measured=%.6g threshold=%.6g (%s)\n", v.pass ? "PASS" : "FAIL", v.id.c_str(), v.measured,
                v.threshold, v.relation.c_str());
  for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("%s: %s in %.2fs, results in %s\n", r.experiment.c_str(), r.passed() ? "passed" : "FAILED",
              r.wall_seconds, out.c_str());
  return r.passed() ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Bergman kernels and Toeplitz operators on P^1"};
  app.require_subcommand(1);

  std::string defaults_for;
  CLI::App* list = app.add_subcommand("list", "List the experiment catalog");
  list->add_option("--defaults", defaults_for, "Print the default config of one experiment");

  std::string config;
  CLI::App* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", config, "Experiment config (JSON)")->required();

  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config, "Experiment config (JSON)")->required();
  run->add_option("--out", out, "Output directory (default: config output or results/<experiment>)");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Override points.seed");
  run->add_option("--threads", threads, "Worker threads (default: BERGWEIGHT_THREADS or 1)")
      ->check(CLI::Range(1, 1024));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*list) return cmd_list(defaults_for);
    if (*validate) return cmd_validate(config);
    return cmd_run(config, out, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt, threads);
  } catch (const bergweight::Error& e) {
    std::cerr << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
