// lab: experiment runner binding models -> projectors -> Wannier bases ->
// Chern markers -> estimate suites. JSON config in, CSV/JSON artifacts out.

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chernlab/experiment.hpp"

#if defined(CHERNLAB_USE_LAPACKE)
extern "C" void openblas_set_num_threads(int);
#endif

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("--config", options.config_path, "experiment config JSON")
      ->required();
  cmd->add_option("--out", options.out_dir,
                  "output directory (overrides config output_dir)");
  cmd->add_option("--threads", options.threads, "worker thread count (0 = default)");
}

chernlab::ExperimentConfig load_config(const CommonOptions& options) {
  std::ifstream in(options.config_path);
  if (!in) {
    throw chernlab::ConfigError("cannot open config file: " + options.config_path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw chernlab::ConfigError("config JSON parse error: " + std::string(e.what()));
  }
  return chernlab::config_from_json(j);
}

void apply_threads(int threads) {
  if (threads <= 0) return;
  Eigen::setNbThreads(threads);
#if defined(CHERNLAB_USE_LAPACKE)
  openblas_set_num_threads(threads);
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chernlab experiment runner"};
  app.require_subcommand(1);

  CommonOptions spectrum_opts, marker_opts, dichotomy_opts, estimates_opts;
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "eigenvalues, bulk gap and kernel decay fit");
  add_common(spectrum, spectrum_opts);
  CLI::App* marker =
      app.add_subcommand("marker-sweep", "Chern markers in both window forms");
  add_common(marker, marker_opts);
  CLI::App* dichotomy =
      app.add_subcommand("dichotomy", "localization moments vs marker verdict");
  add_common(dichotomy, dichotomy_opts);
  CLI::App* estimates =
      app.add_subcommand("estimates", "scaling-law and inequality suite");
  add_common(estimates, estimates_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? chernlab::kExitOk : chernlab::kExitInvalid;
  }

  const CommonOptions& options = spectrum->parsed()    ? spectrum_opts
                                 : marker->parsed()    ? marker_opts
                                 : dichotomy->parsed() ? dichotomy_opts
                                                       : estimates_opts;
  try {
    const chernlab::ExperimentConfig config = load_config(options);
    config.validate();
    apply_threads(options.threads);
    const std::string out_dir =
        options.out_dir.empty() ? config.output_dir : options.out_dir;

    int code = chernlab::kExitInvalid;
    if (spectrum->parsed()) {
      code = chernlab::run_spectrum(config, out_dir);
    } else if (marker->parsed()) {
      code = chernlab::run_marker_sweep(config, out_dir);
    } else if (dichotomy->parsed()) {
      code = chernlab::run_dichotomy(config, out_dir);
    } else if (estimates->parsed()) {
      code = chernlab::run_estimates(config, out_dir);
    }
    if (code == chernlab::kExitOk) {
      std::printf("ok: artifacts in %s\n", out_dir.c_str());
    } else {
      std::fprintf(stderr, "numerical checks failed; see %s/manifest.json\n",
                   out_dir.c_str());
    }
    return code;
  } catch (const chernlab::ConfigError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return chernlab::kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return chernlab::kExitNumerical;
  }
}
