#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "sinv/commands.hpp"
#include "sinv/common.hpp"
#include "sinv/config.hpp"
#include "sinv/tv.hpp"
#include "test_util.hpp"

using namespace sinv;
using testutil::TempDir;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"sinv"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

/// Small mfcc experiment: quick to synthesize, extract and train.
std::string tiny_mfcc_config(const std::string& root) {
  return std::string("{\n") +
         "  \"data\": {\"root\": \"" + root + "\",\n" +
         "           \"split_fractions\": [0.5, 0.25, 0.25],\n" +
         "           \"synth\": {\"speakers\": 4, \"utterances_per_speaker\": 2,\n" +
         "                      \"duration_s\": 0.6, \"seed\": 9}},\n" +
         "  \"features\": {\"kind\": \"mfcc\"},\n" +
         "  \"model\": {\"hidden_layers\": 1, \"hidden_width\": 16,\n" +
         "            \"max_epochs\": 3, \"batch_size\": 64}\n" +
         "}\n";
}

}  // namespace

// ---------------------------------------------------------------------------
// Config defaults, derived values and validation
// ---------------------------------------------------------------------------

TEST_CASE("defaults validate and derive the regressor width") {
  ExperimentConfig cfg = default_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.derived_input_dim() == 4 * 5 * 7 * 7);  // 980
  CHECK(cfg.feature_tag() == "cortical_980");

  cfg.reduction.k_rate = 6;
  cfg.reduction.k_freq = 8;
  CHECK(cfg.derived_input_dim() == 1344);
  CHECK(cfg.feature_tag() == "cortical_1344");

  cfg.features.kind = "mfcc";
  CHECK(cfg.derived_input_dim() == 13 * 7);
  CHECK(cfg.feature_tag() == "mfcc");
}

TEST_CASE("validation rejects inconsistent sections") {
  auto broken = [](auto mutate) {
    ExperimentConfig cfg = default_config();
    mutate(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(broken([](auto& c) { c.data.root = ""; }).validate(), ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.data.split_mode = "randomly"; }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.data.split_fractions = {0.5, 0.4, 0.3}; })
                      .validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.reduction.context = 6; }).validate(),
                  ConfigError);  // even context has no center frame
  CHECK_THROWS_AS(broken([](auto& c) { c.reduction.k_scale = 5; }).validate(),
                  ConfigError);  // only 4 scales exist
  CHECK_THROWS_AS(broken([](auto& c) { c.reduction.k_rate = 11; }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.reduction.k_freq = 129; }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.features.kind = "plp"; }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.model.train.beta1 = 1.0; }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.eval.kalman_q = 0.0; }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(broken([](auto& c) { c.eval.kalman_r = -1.0; }).validate(),
                  ConfigError);

  // explicit input_dim must agree with the derived one
  try {
    broken([](auto& c) { c.model.input_dim = 979; }).validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("980") != std::string::npos);
  }
  CHECK_NOTHROW(broken([](auto& c) { c.model.input_dim = 980; }).validate());
}

TEST_CASE("config files reject unknown keys with their section named") {
  TempDir dir("cfg");
  const std::string path = dir.file("exp.json");

  write_text(path, "{\"reduction\": {\"k_freq\": 7, \"kfreq\": 9}}");
  CHECK_THROWS_WITH_AS(load_config(path), "unknown key 'kfreq' in section 'reduction'",
                       ConfigError);

  write_text(path, "{\"engine\": {}}");
  CHECK_THROWS_WITH_AS(load_config(path), "unknown key 'engine' in section '<root>'",
                       ConfigError);

  write_text(path, "{\"eval\": {\"kalman_q\": \"high\"}}");
  CHECK_THROWS_WITH_AS(load_config(path), "bad value for 'eval.kalman_q'", ConfigError);

  write_text(path, "{\"data\": [1, 2]}");
  CHECK_THROWS_AS(load_config(path), ConfigError);

  write_text(path, "{not json");
  CHECK_THROWS_AS(load_config(path), ConfigError);

  CHECK_THROWS_AS(load_config(dir.file("absent.json")), ConfigError);
}

TEST_CASE("save/load round-trips a customized config") {
  TempDir dir("cfg");
  ExperimentConfig cfg = default_config();
  cfg.data.root = dir.str() + "/work";
  cfg.data.synth.n_speakers = 5;
  cfg.data.synth.seed = 1234;
  cfg.cortical.rates = {2, 4, 8};
  cfg.reduction.k_freq = 9;
  cfg.model.hidden_width = 300;
  cfg.model.train.learning_rate = 5e-4;
  cfg.eval.kalman_q = 321.0;
  cfg.eval.rts = false;

  const std::string path = dir.file("exp.json");
  save_config(path, cfg);
  ExperimentConfig back = load_config(path);
  CHECK(back.data.root == cfg.data.root);
  CHECK(back.data.synth.n_speakers == 5);
  CHECK(back.data.synth.seed == 1234);
  CHECK(back.cortical.rates == std::vector<double>{2, 4, 8});
  CHECK(back.reduction.k_freq == 9);
  CHECK(back.model.hidden_width == 300);
  CHECK(back.model.train.learning_rate == 5e-4);
  CHECK(back.eval.kalman_q == 321.0);
  CHECK(back.eval.rts == false);
  CHECK(back.model_hash() == cfg.model_hash());
}

// ---------------------------------------------------------------------------
// Provenance hash scoping
// ---------------------------------------------------------------------------

TEST_CASE("each stage hash covers exactly its inputs") {
  const ExperimentConfig base = default_config();

  ExperimentConfig c = base;
  c.eval.kalman_q = 99.0;  // evaluation knobs never invalidate artifacts
  CHECK(c.synth_hash() == base.synth_hash());
  CHECK(c.feature_hash() == base.feature_hash());
  CHECK(c.basis_hash() == base.basis_hash());
  CHECK(c.model_hash() == base.model_hash());

  c = base;
  c.reduction.k_freq = 9;  // truncation reshapes the model input, not the basis
  CHECK(c.feature_hash() == base.feature_hash());
  CHECK(c.basis_hash() == base.basis_hash());
  CHECK(c.model_hash() != base.model_hash());

  c = base;
  c.model.train.learning_rate = 9e-4;
  CHECK(c.basis_hash() == base.basis_hash());
  CHECK(c.model_hash() != base.model_hash());

  c = base;
  c.frontend.q3db = 6.0;  // frontend changes cascade through every stage
  CHECK(c.synth_hash() == base.synth_hash());
  CHECK(c.feature_hash() != base.feature_hash());
  CHECK(c.basis_hash() != base.basis_hash());
  CHECK(c.model_hash() != base.model_hash());

  c = base;
  c.data.synth.seed = 31337;
  CHECK(c.synth_hash() != base.synth_hash());
  CHECK(c.basis_hash() != base.basis_hash());

  c = base;
  c.data.split_fractions = {0.5, 0.25, 0.25};  // same features, new split
  CHECK(c.feature_hash() == base.feature_hash());
  CHECK(c.basis_hash() != base.basis_hash());

  c = base;
  c.data.root = "elsewhere";  // layout is not provenance
  CHECK(c.model_hash() == base.model_hash());
}

// ---------------------------------------------------------------------------
// CLI behaviour
// ---------------------------------------------------------------------------

TEST_CASE("usage errors exit with code 1") {
  CHECK(cli({}) == 1);
  CHECK(cli({"transmogrify"}) == 1);
  CHECK(cli({"--jobs", "0", "synth"}) == 1);
  CHECK(cli({"--config", "/nonexistent/exp.json", "synth"}) == 1);
}

TEST_CASE("missing inputs exit with code 2") {
  TempDir dir("cli");
  const std::string cfg_path = dir.file("exp.json");
  write_text(cfg_path, tiny_mfcc_config(dir.str() + "/work"));
  // extract before synth: no manifest yet
  CHECK(cli({"--config", cfg_path, "--quiet", "extract"}) == 2);
}

TEST_CASE("the tiny pipeline runs end to end and infers a trajectory") {
  TempDir dir("cli");
  const std::string cfg_path = dir.file("exp.json");
  const std::string root = dir.str() + "/work";
  write_text(cfg_path, tiny_mfcc_config(root));

  CHECK(cli({"--config", cfg_path, "--quiet", "synth"}) == 0);
  CHECK(cli({"--config", cfg_path, "--quiet", "extract"}) == 0);
  // the tensor basis stage has nothing to fit on mel cepstra
  CHECK(cli({"--config", cfg_path, "--quiet", "fit-reduce"}) == 1);
  CHECK(cli({"--config", cfg_path, "--quiet", "train"}) == 0);
  CHECK(cli({"--config", cfg_path, "--quiet", "eval"}) == 0);

  CHECK(testutil::slurp(root + "/report.csv")
            .starts_with("feature,context,LA,LP,TBCL,TBCD,TTCL,TTCD,average"));
  CHECK(testutil::slurp(root + "/report.csv").find("mfcc,7,") != std::string::npos);

  const std::string wav = root + "/data/wav/spk000_utt000.wav";
  const std::string out = dir.file("pred.csv");
  CHECK(cli({"--config", cfg_path, "--quiet", "infer", wav, out}) == 0);
  TvTrajectory pred = load_tv_csv(out);
  CHECK(pred.frames() == 60);  // 0.6 s at 10 ms frames
  CHECK(pred.values.allFinite());

  CHECK(cli({"--config", cfg_path, "--quiet", "infer", dir.file("no.wav"), out}) == 2);
}

TEST_CASE("re-running extract skips up-to-date features but rejects stale ones") {
  TempDir dir("cli");
  const std::string cfg_path = dir.file("exp.json");
  const std::string root = dir.str() + "/work";
  write_text(cfg_path, tiny_mfcc_config(root));

  REQUIRE(cli({"--config", cfg_path, "--quiet", "synth"}) == 0);
  REQUIRE(cli({"--config", cfg_path, "--quiet", "extract"}) == 0);
  auto mtime = [&] {
    return std::filesystem::last_write_time(root + "/features/spk000_utt000.ftc");
  };
  const auto first = mtime();
  CHECK(cli({"--config", cfg_path, "--quiet", "extract"}) == 0);
  CHECK(mtime() == first);  // resume: nothing recomputed

  // a frontend change makes the existing files stale: refuse without --force
  std::string changed = tiny_mfcc_config(root);
  changed.insert(changed.rfind('}'), ", \"frontend\": {\"q3db\": 6.0}\n");
  write_text(cfg_path, changed);
  CHECK(cli({"--config", cfg_path, "--quiet", "extract"}) == 3);
  CHECK(cli({"--config", cfg_path, "--quiet", "--force", "extract"}) == 0);
  CHECK(mtime() != first);
}

TEST_CASE("stale artifacts downstream are refused with exit code 3") {
  TempDir dir("cli");
  const std::string cfg_path = dir.file("exp.json");
  const std::string root = dir.str() + "/work";
  write_text(cfg_path, tiny_mfcc_config(root));

  REQUIRE(cli({"--config", cfg_path, "--quiet", "synth"}) == 0);
  REQUIRE(cli({"--config", cfg_path, "--quiet", "extract"}) == 0);
  REQUIRE(cli({"--config", cfg_path, "--quiet", "train"}) == 0);

  // retrain-worthy change without retraining: eval must refuse the checkpoint
  std::string changed = tiny_mfcc_config(root);
  changed.insert(changed.rfind('}'), ", \"reduction\": {\"context\": 5}\n");
  write_text(cfg_path, changed);
  CHECK(cli({"--config", cfg_path, "--quiet", "eval"}) == 3);
}

TEST_CASE("--seed overrides the dataset seed from the command line") {
  TempDir dir("cli");
  const std::string cfg_path = dir.file("exp.json");
  const std::string root = dir.str() + "/work";
  write_text(cfg_path, tiny_mfcc_config(root));

  REQUIRE(cli({"--config", cfg_path, "--quiet", "synth"}) == 0);
  const std::string wav = root + "/data/wav/spk001_utt001.wav";
  const std::string a = testutil::slurp(wav);
  REQUIRE(cli({"--config", cfg_path, "--quiet", "--seed", "77", "synth"}) == 0);
  CHECK(testutil::slurp(wav) != a);
  REQUIRE(cli({"--config", cfg_path, "--quiet", "synth"}) == 0);
  CHECK(testutil::slurp(wav) == a);  // bit-identical under the config seed
}
