#ifndef SINV_CONFIG_HPP
#define SINV_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sinv/dataset.hpp"
#include "sinv/mlp.hpp"

namespace sinv {

struct FrontendConfig {
  int sample_rate = 16000;
  int n_channels = 128;
  int channels_per_octave = 24;
  double min_center_freq = 180.0;
  double q3db = 4.0;
};

struct CorticalConfig {
  std::vector<double> scales = {1, 2, 4, 8};
  std::vector<double> rates = {2, 4, 8, 16, 32};  // unsigned; both directions used
};

struct FeaturesConfig {
  std::string kind = "cortical";  // "cortical" | "mfcc"
  int mfcc_coeffs = 13;
};

struct ReductionConfig {
  int k_scale = 4;
  int k_rate = 5;
  int k_freq = 7;
  int context = 7;
};

struct ModelConfig {
  int hidden_layers = 6;
  int hidden_width = 512;
  double dropout_input = 0.1;
  double dropout_hidden = 0.2;
  int input_dim = 0;  // 0 = derived from reduction/features
  TrainConfig train;
};

struct EvalConfig {
  double kalman_q = 1.0e4;
  double kalman_r = 0.01;
  bool rts = true;
  bool per_utterance = false;
};

struct DataConfig {
  std::string root = "work";
  SynthSpec synth;
  std::string split_mode = "by_speaker";  // | "by_utterance"
  std::array<double, 3> split_fractions = {0.667, 0.167, 0.166};
};

struct ExperimentConfig {
  DataConfig data;
  FrontendConfig frontend;
  CorticalConfig cortical;
  FeaturesConfig features;
  ReductionConfig reduction;
  ModelConfig model;
  EvalConfig eval;

  /// Regressor input width implied by the feature/reduction sections.
  int derived_input_dim() const;
  /// Feature tag used in reports: cortical_<input_dim> or mfcc.
  std::string feature_tag() const;
  void validate() const;

  // Scoped provenance hashes: a stage artifact embeds the hash of exactly
  // the configuration that determines its bytes.
  std::string synth_hash() const;
  std::string feature_hash() const;  // data + frontend + cortical + features
  std::string basis_hash() const;    // feature_hash + split assignment
  std::string model_hash() const;    // basis_hash + reduction + model

  // Artifact layout under data.root.
  std::string dataset_dir() const;
  std::string manifest_path() const;
  std::string features_dir() const;
  std::string feature_path(const std::string& utt_id) const;
  std::string basis_path() const;
  std::string energy_csv_path() const;
  std::string checkpoint_path() const;
  std::string train_log_path() const;
  std::string report_path() const;
  std::string report_per_utt_path() const;
};

ExperimentConfig default_config();
ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

}  // namespace sinv

#endif  // SINV_CONFIG_HPP
