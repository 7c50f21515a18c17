#include "sinv/commands.hpp"

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sinv/pipeline.hpp"

namespace sinv {

int run_command(int argc, const char* const* argv) {
  CLI::App app{"Acoustic-to-articulatory inversion pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs = 1;
  bool force = false, quiet = false;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--jobs", jobs, "worker threads for per-utterance stages")
      ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option(
      "--seed", seed, "override the dataset and training seeds");
  app.add_flag("--force", force, "overwrite artifacts with stale provenance");
  app.add_flag("--quiet", quiet, "suppress progress logging");

  auto* cmd_synth = app.add_subcommand("synth", "generate the synthetic dataset");
  auto* cmd_extract =
      app.add_subcommand("extract", "compute per-utterance feature files");
  auto* cmd_fit =
      app.add_subcommand("fit-reduce", "fit the reduction basis on the train split");
  auto* cmd_train = app.add_subcommand("train", "train the regressor");

  auto* cmd_eval = app.add_subcommand("eval", "evaluate on the test split");
  std::string checkpoint;
  cmd_eval->add_option("checkpoint", checkpoint,
                       "checkpoint to evaluate (default: the experiment's)");

  auto* cmd_infer = app.add_subcommand("infer", "invert a single WAV file");
  std::string wav_path, out_path;
  cmd_infer->add_option("wav", wav_path, "input audio")->required();
  cmd_infer->add_option("output", out_path, "output TV CSV")->required();

  auto* cmd_report =
      app.add_subcommand("report", "merge evaluation reports into a summary");
  std::vector<std::string> extra_reports;
  cmd_report->add_option("reports", extra_reports, "additional report CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    ExperimentConfig cfg =
        config_path.empty() ? default_config() : load_config(config_path);
    if (seed_opt->count() > 0) {
      cfg.data.synth.seed = seed;
      cfg.model.train.seed = seed;
    }
    cfg.validate();
    set_log_quiet(quiet);
    const PipelineOptions opt{jobs, force};

    if (cmd_synth->parsed()) run_synth(cfg, opt);
    if (cmd_extract->parsed()) run_extract(cfg, opt);
    if (cmd_fit->parsed()) run_fit_reduce(cfg, opt);
    if (cmd_train->parsed()) run_train(cfg, opt);
    if (cmd_eval->parsed()) run_eval(cfg, opt, checkpoint);
    if (cmd_infer->parsed()) run_infer(cfg, wav_path, out_path);
    if (cmd_report->parsed()) run_report(cfg, extra_reports);
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ProvenanceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace sinv
