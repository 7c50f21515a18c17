#include "sinv/config.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "sinv/common.hpp"

namespace sinv {

namespace {

using Json = nlohmann::json;

void check_keys(const Json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("section '" + section + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + it.key() + "' in section '" + section + "'");
  }
}

template <typename T>
void opt(const Json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("bad value for '" + section + "." + key + "'");
  }
}

Json synth_to_json(const SynthSpec& s) {
  return Json{{"speakers", s.n_speakers},
              {"utterances_per_speaker", s.utterances_per_speaker},
              {"duration_s", s.duration},
              {"seed", s.seed},
              {"bandwidth_hz", s.trajectory_bandwidth},
              {"sample_rate", s.sample_rate}};
}

Json data_to_json(const DataConfig& d) {
  return Json{{"root", d.root},
              {"synth", synth_to_json(d.synth)},
              {"split_mode", d.split_mode},
              {"split_fractions", d.split_fractions}};
}

Json frontend_to_json(const FrontendConfig& f) {
  return Json{{"sample_rate", f.sample_rate},
              {"n_channels", f.n_channels},
              {"channels_per_octave", f.channels_per_octave},
              {"min_center_freq", f.min_center_freq},
              {"q3db", f.q3db}};
}

Json cortical_to_json(const CorticalConfig& c) {
  return Json{{"scales", c.scales}, {"rates", c.rates}};
}

Json features_to_json(const FeaturesConfig& f) {
  return Json{{"kind", f.kind}, {"mfcc_coeffs", f.mfcc_coeffs}};
}

Json reduction_to_json(const ReductionConfig& r) {
  return Json{{"k_scale", r.k_scale},
              {"k_rate", r.k_rate},
              {"k_freq", r.k_freq},
              {"context", r.context}};
}

Json model_to_json(const ModelConfig& m) {
  return Json{{"hidden_layers", m.hidden_layers},
              {"hidden_width", m.hidden_width},
              {"dropout_input", m.dropout_input},
              {"dropout_hidden", m.dropout_hidden},
              {"input_dim", m.input_dim},
              {"batch_size", m.train.batch_size},
              {"max_epochs", m.train.max_epochs},
              {"learning_rate", m.train.learning_rate},
              {"beta1", m.train.beta1},
              {"beta2", m.train.beta2},
              {"epsilon", m.train.epsilon},
              {"patience", m.train.patience},
              {"seed", m.train.seed}};
}

Json eval_to_json(const EvalConfig& e) {
  return Json{{"kalman_q", e.kalman_q},
              {"kalman_r", e.kalman_r},
              {"rts", e.rts},
              {"per_utterance", e.per_utterance}};
}

Json config_to_json(const ExperimentConfig& c) {
  return Json{{"data", data_to_json(c.data)},
              {"frontend", frontend_to_json(c.frontend)},
              {"cortical", cortical_to_json(c.cortical)},
              {"features", features_to_json(c.features)},
              {"reduction", reduction_to_json(c.reduction)},
              {"model", model_to_json(c.model)},
              {"eval", eval_to_json(c.eval)}};
}

std::string hash_json(const Json& j) { return hash_hex(fnv1a64(j.dump())); }

}  // namespace

int ExperimentConfig::derived_input_dim() const {
  if (features.kind == "mfcc") return features.mfcc_coeffs * reduction.context;
  return reduction.k_scale * reduction.k_rate * reduction.k_freq * reduction.context;
}

std::string ExperimentConfig::feature_tag() const {
  if (features.kind == "mfcc") return "mfcc";
  return "cortical_" + std::to_string(derived_input_dim());
}

void ExperimentConfig::validate() const {
  if (data.root.empty()) throw ConfigError("data.root must be set");
  if (data.split_mode != "by_speaker" && data.split_mode != "by_utterance")
    throw ConfigError("data.split_mode must be by_speaker or by_utterance");
  double frac_sum = 0.0;
  for (double f : data.split_fractions) {
    if (f <= 0.0) throw ConfigError("split fractions must be positive");
    frac_sum += f;
  }
  if (std::abs(frac_sum - 1.0) > 1e-6)
    throw ConfigError("split fractions must sum to 1");
  if (data.synth.n_speakers < 1 || data.synth.utterances_per_speaker < 1 ||
      data.synth.duration <= 0.0 || data.synth.sample_rate < 8000)
    throw ConfigError("invalid synth section");

  if (frontend.sample_rate < 8000 || frontend.n_channels < 1 ||
      frontend.channels_per_octave < 1 || frontend.min_center_freq <= 0.0 ||
      frontend.q3db <= 0.0)
    throw ConfigError("invalid frontend section");

  if (features.kind != "cortical" && features.kind != "mfcc")
    throw ConfigError("features.kind must be cortical or mfcc");
  if (features.mfcc_coeffs < 1) throw ConfigError("features.mfcc_coeffs must be >= 1");

  if (cortical.scales.empty() || cortical.rates.empty())
    throw ConfigError("cortical scales/rates must be nonempty");

  if (reduction.context < 1 || reduction.context % 2 == 0)
    throw ConfigError("reduction.context must be odd and positive");
  if (features.kind == "cortical") {
    if (reduction.k_scale < 1 ||
        reduction.k_scale > static_cast<int>(cortical.scales.size()) ||
        reduction.k_rate < 1 ||
        reduction.k_rate > 2 * static_cast<int>(cortical.rates.size()) ||
        reduction.k_freq < 1 || reduction.k_freq > frontend.n_channels)
      throw ConfigError("reduction truncation out of range");
  }

  if (model.hidden_layers < 1 || model.hidden_width < 1)
    throw ConfigError("invalid model section");
  if (model.input_dim != 0 && model.input_dim != derived_input_dim())
    throw ConfigError(
        "model.input_dim inconsistent with reduction/features: expected " +
        std::to_string(derived_input_dim()));
  if (model.train.batch_size < 1 || model.train.max_epochs < 1 ||
      model.train.learning_rate <= 0.0 || model.train.patience < 0)
    throw ConfigError("invalid training section");
  if (model.train.beta1 <= 0.0 || model.train.beta1 >= 1.0 ||
      model.train.beta2 <= 0.0 || model.train.beta2 >= 1.0)
    throw ConfigError("adam betas must lie in (0,1)");

  if (eval.kalman_q <= 0.0 || eval.kalman_r <= 0.0)
    throw ConfigError("kalman noise parameters must be positive");
}

std::string ExperimentConfig::synth_hash() const {
  return hash_json(synth_to_json(data.synth));
}

std::string ExperimentConfig::feature_hash() const {
  Json j{{"synth", synth_to_json(data.synth)},
         {"frontend", frontend_to_json(frontend)},
         {"features", features_to_json(features)}};
  if (features.kind == "cortical") j["cortical"] = cortical_to_json(cortical);
  return hash_json(j);
}

std::string ExperimentConfig::basis_hash() const {
  Json j{{"feature_hash", feature_hash()},
         {"split_mode", data.split_mode},
         {"split_fractions", data.split_fractions},
         {"seed", data.synth.seed}};
  return hash_json(j);
}

std::string ExperimentConfig::model_hash() const {
  Json j{{"basis_hash", basis_hash()},
         {"reduction", reduction_to_json(reduction)},
         {"model", model_to_json(model)}};
  return hash_json(j);
}

std::string ExperimentConfig::dataset_dir() const { return data.root + "/data"; }
std::string ExperimentConfig::manifest_path() const {
  return dataset_dir() + "/manifest.csv";
}
std::string ExperimentConfig::features_dir() const { return data.root + "/features"; }
std::string ExperimentConfig::feature_path(const std::string& utt_id) const {
  return features_dir() + "/" + utt_id + ".ftc";
}
std::string ExperimentConfig::basis_path() const { return data.root + "/basis.ftc"; }
std::string ExperimentConfig::energy_csv_path() const {
  return data.root + "/energy.csv";
}
std::string ExperimentConfig::checkpoint_path() const {
  return data.root + "/model.ckpt";
}
std::string ExperimentConfig::train_log_path() const {
  return data.root + "/train_log.csv";
}
std::string ExperimentConfig::report_path() const { return data.root + "/report.csv"; }
std::string ExperimentConfig::report_per_utt_path() const {
  return data.root + "/report_per_utt.csv";
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  check_keys(j, "<root>", {"data", "frontend", "cortical", "features", "reduction",
                           "model", "eval"});

  ExperimentConfig c;
  if (j.contains("data")) {
    const Json& d = j["data"];
    check_keys(d, "data", {"root", "synth", "split_mode", "split_fractions"});
    opt(d, "root", c.data.root, "data");
    opt(d, "split_mode", c.data.split_mode, "data");
    opt(d, "split_fractions", c.data.split_fractions, "data");
    if (d.contains("synth")) {
      const Json& s = d["synth"];
      check_keys(s, "data.synth",
                 {"speakers", "utterances_per_speaker", "duration_s", "seed",
                  "bandwidth_hz", "sample_rate"});
      opt(s, "speakers", c.data.synth.n_speakers, "data.synth");
      opt(s, "utterances_per_speaker", c.data.synth.utterances_per_speaker,
          "data.synth");
      opt(s, "duration_s", c.data.synth.duration, "data.synth");
      opt(s, "seed", c.data.synth.seed, "data.synth");
      opt(s, "bandwidth_hz", c.data.synth.trajectory_bandwidth, "data.synth");
      opt(s, "sample_rate", c.data.synth.sample_rate, "data.synth");
    }
  }
  if (j.contains("frontend")) {
    const Json& s = j["frontend"];
    check_keys(s, "frontend", {"sample_rate", "n_channels", "channels_per_octave",
                               "min_center_freq", "q3db"});
    opt(s, "sample_rate", c.frontend.sample_rate, "frontend");
    opt(s, "n_channels", c.frontend.n_channels, "frontend");
    opt(s, "channels_per_octave", c.frontend.channels_per_octave, "frontend");
    opt(s, "min_center_freq", c.frontend.min_center_freq, "frontend");
    opt(s, "q3db", c.frontend.q3db, "frontend");
  }
  if (j.contains("cortical")) {
    const Json& s = j["cortical"];
    check_keys(s, "cortical", {"scales", "rates"});
    opt(s, "scales", c.cortical.scales, "cortical");
    opt(s, "rates", c.cortical.rates, "cortical");
  }
  if (j.contains("features")) {
    const Json& s = j["features"];
    check_keys(s, "features", {"kind", "mfcc_coeffs"});
    opt(s, "kind", c.features.kind, "features");
    opt(s, "mfcc_coeffs", c.features.mfcc_coeffs, "features");
  }
  if (j.contains("reduction")) {
    const Json& s = j["reduction"];
    check_keys(s, "reduction", {"k_scale", "k_rate", "k_freq", "context"});
    opt(s, "k_scale", c.reduction.k_scale, "reduction");
    opt(s, "k_rate", c.reduction.k_rate, "reduction");
    opt(s, "k_freq", c.reduction.k_freq, "reduction");
    opt(s, "context", c.reduction.context, "reduction");
  }
  if (j.contains("model")) {
    const Json& s = j["model"];
    check_keys(s, "model",
               {"hidden_layers", "hidden_width", "dropout_input", "dropout_hidden",
                "input_dim", "batch_size", "max_epochs", "learning_rate", "beta1",
                "beta2", "epsilon", "patience", "seed"});
    opt(s, "hidden_layers", c.model.hidden_layers, "model");
    opt(s, "hidden_width", c.model.hidden_width, "model");
    opt(s, "dropout_input", c.model.dropout_input, "model");
    opt(s, "dropout_hidden", c.model.dropout_hidden, "model");
    opt(s, "input_dim", c.model.input_dim, "model");
    opt(s, "batch_size", c.model.train.batch_size, "model");
    opt(s, "max_epochs", c.model.train.max_epochs, "model");
    opt(s, "learning_rate", c.model.train.learning_rate, "model");
    opt(s, "beta1", c.model.train.beta1, "model");
    opt(s, "beta2", c.model.train.beta2, "model");
    opt(s, "epsilon", c.model.train.epsilon, "model");
    opt(s, "patience", c.model.train.patience, "model");
    opt(s, "seed", c.model.train.seed, "model");
  }
  if (j.contains("eval")) {
    const Json& s = j["eval"];
    check_keys(s, "eval", {"kalman_q", "kalman_r", "rts", "per_utterance"});
    opt(s, "kalman_q", c.eval.kalman_q, "eval");
    opt(s, "kalman_r", c.eval.kalman_r, "eval");
    opt(s, "rts", c.eval.rts, "eval");
    opt(s, "per_utterance", c.eval.per_utterance, "eval");
  }

  c.validate();
  return c;
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for write: " + path);
  f << config_to_json(cfg).dump(2) << "\n";
  if (!f) throw DataError("write failed: " + path);
}

}  // namespace sinv
