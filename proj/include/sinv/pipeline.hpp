#ifndef SINV_PIPELINE_HPP
#define SINV_PIPELINE_HPP

#include <string>
#include <vector>

#include "sinv/config.hpp"
#include "sinv/eval.hpp"

namespace sinv {

struct PipelineOptions {
  int jobs = 1;
  bool force = false;
};

/// Stage commands. Each reads/writes the artifact layout under
/// cfg.data.root and enforces the provenance chain between stages.
void run_synth(const ExperimentConfig& cfg, const PipelineOptions& opt);
void run_extract(const ExperimentConfig& cfg, const PipelineOptions& opt);
void run_fit_reduce(const ExperimentConfig& cfg, const PipelineOptions& opt);
void run_train(const ExperimentConfig& cfg, const PipelineOptions& opt);
EvalReport run_eval(const ExperimentConfig& cfg, const PipelineOptions& opt,
                    const std::string& checkpoint_override = "");
void run_infer(const ExperimentConfig& cfg, const std::string& wav_path,
               const std::string& out_csv_path);
/// Merge evaluation reports (the experiment's own plus any extras) into
/// root/summary.csv, sorted by feature tag and context.
void run_report(const ExperimentConfig& cfg,
                const std::vector<std::string>& extra_reports);

}  // namespace sinv

#endif  // SINV_PIPELINE_HPP
