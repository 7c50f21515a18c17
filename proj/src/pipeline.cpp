#include "sinv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "sinv/auditory.hpp"
#include "sinv/cortical.hpp"
#include "sinv/ftc.hpp"
#include "sinv/hosvd.hpp"
#include "sinv/kalman.hpp"
#include "sinv/mfcc.hpp"
#include "sinv/mlp.hpp"

namespace fs = std::filesystem;

namespace sinv {

namespace {

std::string file_hash_hex(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<std::size_t>(f.gcount()), h);
  }
  return hash_hex(h);
}

CochlearFilterbankSpec make_filterbank(const ExperimentConfig& cfg) {
  return design_cochlear_filterbank(cfg.frontend.sample_rate, cfg.frontend.n_channels,
                                    cfg.frontend.channels_per_octave,
                                    cfg.frontend.min_center_freq, cfg.frontend.q3db);
}

StrfBank make_strf_bank(const ExperimentConfig& cfg) {
  return design_strf_bank(cfg.cortical.scales, cfg.cortical.rates, kTvFramePeriod,
                          cfg.frontend.n_channels, cfg.frontend.channels_per_octave);
}

AudioBuffer load_audio(const ExperimentConfig& cfg, const std::string& path) {
  AudioBuffer a = load_wav(path);
  return resample(a, cfg.frontend.sample_rate);
}

std::string doubles_csv(const std::vector<double>& v) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i ? ",%g" : "%g", v[i]);
    out += buf;
  }
  return out;
}

/// Feature frames for one utterance: cortical (T x S*R*K) or mfcc (T x C).
RowMatrixXd compute_feature_frames(const ExperimentConfig& cfg,
                                   const AudioBuffer& audio,
                                   const CochlearFilterbankSpec& fb,
                                   const StrfBank& bank) {
  if (cfg.features.kind == "mfcc") {
    Eigen::MatrixXd m = mfcc_baseline(audio, cfg.features.mfcc_coeffs);
    return RowMatrixXd(m);
  }
  const AuditorySpectrogram sp = audspec(audio, fb);
  return cortical_transform(sp, bank).frames;
}

FtcRecord make_feature_record(const ExperimentConfig& cfg, const std::string& utt_id,
                              const std::string& audio_hash,
                              const RowMatrixXd& frames, const StrfBank& bank,
                              const CochlearFilterbankSpec& fb) {
  FtcRecord r;
  r.elem_type = FtcRecord::kElemF32;
  if (cfg.features.kind == "mfcc") {
    r.dims = {static_cast<std::uint64_t>(frames.rows()),
              static_cast<std::uint64_t>(frames.cols())};
    r.metadata["name"] = "mfcc";
  } else {
    r.dims = {static_cast<std::uint64_t>(frames.rows()), cfg.cortical.scales.size(),
              2 * cfg.cortical.rates.size(),
              static_cast<std::uint64_t>(cfg.frontend.n_channels)};
    r.metadata["name"] = "cortical";
    r.metadata["scale_axis"] = doubles_csv(bank.scales);
    r.metadata["rate_axis"] = doubles_csv(bank.signed_rates());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g,%g", fb.center_freqs[0],
                  fb.center_freqs[fb.n_channels - 1]);
    r.metadata["freq_axis_hz"] = buf;
  }
  r.metadata["frame_period_ms"] = "10";
  r.metadata["provenance"] = cfg.feature_hash();
  r.metadata["audio_hash"] = audio_hash;
  r.metadata["utt_id"] = utt_id;
  r.data_f32.resize(static_cast<std::size_t>(frames.size()));
  for (Eigen::Index i = 0; i < frames.rows(); ++i)
    for (Eigen::Index j = 0; j < frames.cols(); ++j)
      r.data_f32[static_cast<std::size_t>(i * frames.cols() + j)] =
          static_cast<float>(frames(i, j));
  return r;
}

RowMatrixXd frames_from_record(const FtcRecord& r) {
  std::uint64_t rows = r.dims.empty() ? 0 : r.dims[0];
  std::uint64_t cols = rows ? r.element_count() / rows : 0;
  RowMatrixXd frames(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < frames.size(); ++i)
    frames.data()[i] = r.elem_type == FtcRecord::kElemF32
                           ? static_cast<double>(r.data_f32[static_cast<std::size_t>(i)])
                           : r.data_f64[static_cast<std::size_t>(i)];
  return frames;
}

void check_feature_record(const ExperimentConfig& cfg, const FtcRecord& r,
                          const std::string& path) {
  const std::string expected = cfg.features.kind == "mfcc" ? "mfcc" : "cortical";
  if (r.name() != expected)
    throw ProvenanceError("feature kind mismatch in " + path + " (have " + r.name() +
                          ", config wants " + expected + ")");
  auto it = r.metadata.find("provenance");
  if (it == r.metadata.end() || it->second != cfg.feature_hash())
    throw ProvenanceError("feature file " + path +
                          " was extracted under a different configuration; rerun "
                          "extract (--force to overwrite)");
}

std::string record_audio_hash(const FtcRecord& r, const std::string& path) {
  auto it = r.metadata.find("audio_hash");
  if (it == r.metadata.end()) throw ProvenanceError("missing audio_hash in " + path);
  return it->second;
}

/// Basis provenance: the split-level config hash plus the identity of every
/// training utterance that went into the fit.
std::string basis_provenance(const ExperimentConfig& cfg,
                             const std::vector<std::pair<std::string, std::string>>&
                                 train_ids_and_hashes) {
  std::uint64_t h = fnv1a64(cfg.basis_hash());
  for (const auto& [id, ah] : train_ids_and_hashes) {
    h = fnv1a64(id, h);
    h = fnv1a64(ah, h);
  }
  return hash_hex(h);
}

std::string model_provenance(const ExperimentConfig& cfg,
                             const std::string& upstream) {
  std::uint64_t h = fnv1a64(upstream);
  h = fnv1a64(cfg.model_hash(), h);
  return hash_hex(h);
}

Truncation truncation_of(const ExperimentConfig& cfg) {
  return Truncation{cfg.reduction.k_scale, cfg.reduction.k_rate, cfg.reduction.k_freq};
}

/// Regressor inputs for one utterance's feature frames.
Eigen::MatrixXd model_inputs(const ExperimentConfig& cfg, const HosvdBasis* basis,
                             const RowMatrixXd& frames) {
  if (cfg.features.kind == "mfcc")
    return vectorize_with_context(frames, cfg.reduction.context);
  if (!basis) throw ProvenanceError("cortical features require a fitted basis");
  RowMatrixXd cores = hosvd_project(frames, *basis, truncation_of(cfg));
  return vectorize_with_context(cores, cfg.reduction.context);
}

void write_provenance_sidecar(const std::string& artifact_path,
                              const std::string& provenance) {
  std::ofstream f(artifact_path + ".prov", std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + artifact_path + ".prov");
  f << provenance << "\n";
}

/// Run fn(i) for i in [0, n) on opt.jobs threads; rethrows the first error.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void run_synth(const ExperimentConfig& cfg, const PipelineOptions&) {
  const std::string wav_dir = cfg.dataset_dir() + "/wav";
  const std::string tv_dir = cfg.dataset_dir() + "/tv";
  fs::create_directories(wav_dir);
  fs::create_directories(tv_dir);

  const std::vector<SynthUtterance> utts = synth_dataset(cfg.data.synth);
  DatasetManifest manifest;
  for (const SynthUtterance& u : utts) {
    ManifestEntry e;
    e.utt_id = u.utt_id;
    e.speaker_id = u.speaker_id;
    e.audio_path = wav_dir + "/" + u.utt_id + ".wav";
    e.tv_path = tv_dir + "/" + u.utt_id + ".csv";
    save_wav(e.audio_path, u.audio);
    save_tv_csv(e.tv_path, u.tv);
    manifest.entries.push_back(std::move(e));
  }

  const SplitMode mode = cfg.data.split_mode == "by_speaker" ? SplitMode::kBySpeaker
                                                             : SplitMode::kByUtterance;
  manifest = make_splits(manifest, mode, cfg.data.split_fractions,
                         cfg.data.synth.seed);
  save_manifest(cfg.manifest_path(), manifest);
  log_info("synth: wrote " + std::to_string(manifest.entries.size()) +
           " utterances under " + cfg.dataset_dir());
}

void run_extract(const ExperimentConfig& cfg, const PipelineOptions& opt) {
  DatasetManifest manifest = load_manifest(cfg.manifest_path());
  manifest.validate(true);
  fs::create_directories(cfg.features_dir());

  const CochlearFilterbankSpec fb = make_filterbank(cfg);
  const StrfBank bank = make_strf_bank(cfg);
  std::atomic<int> n_skipped{0}, n_done{0};

  parallel_for(static_cast<int>(manifest.entries.size()), opt.jobs, [&](int i) {
    const ManifestEntry& e = manifest.entries[static_cast<std::size_t>(i)];
    const std::string out_path = cfg.feature_path(e.utt_id);
    const std::string audio_hash = file_hash_hex(e.audio_path);
    if (fs::exists(out_path)) {
      const std::vector<FtcRecord> existing = read_ftc(out_path);
      if (!existing.empty()) {
        const FtcRecord& r = existing.front();
        auto prov = r.metadata.find("provenance");
        if (prov != r.metadata.end() && prov->second == cfg.feature_hash() &&
            record_audio_hash(r, out_path) == audio_hash) {
          n_skipped.fetch_add(1);
          return;
        }
      }
      if (!opt.force)
        throw ProvenanceError("existing features in " + out_path +
                              " do not match the current configuration; pass "
                              "--force to recompute");
    }
    const AudioBuffer audio = load_audio(cfg, e.audio_path);
    const RowMatrixXd frames = compute_feature_frames(cfg, audio, fb, bank);
    write_ftc(out_path, {make_feature_record(cfg, e.utt_id, audio_hash, frames,
                                             bank, fb)});
    n_done.fetch_add(1);
  });
  log_info("extract: " + std::to_string(n_done.load()) + " computed, " +
           std::to_string(n_skipped.load()) + " up to date");
}

void run_fit_reduce(const ExperimentConfig& cfg, const PipelineOptions&) {
  if (cfg.features.kind != "cortical")
    throw ConfigError("fit-reduce applies to cortical features only");
  const DatasetManifest manifest = load_manifest(cfg.manifest_path());
  const std::vector<ManifestEntry> train = manifest.in_split(Split::kTrain);
  if (train.empty()) throw DataError("no train-split utterances in manifest");

  ModeCovariances acc(static_cast<int>(cfg.cortical.scales.size()),
                      2 * static_cast<int>(cfg.cortical.rates.size()),
                      cfg.frontend.n_channels);
  std::vector<std::pair<std::string, std::string>> ids_and_hashes;
  for (const ManifestEntry& e : train) {
    const std::string path = cfg.feature_path(e.utt_id);
    const std::vector<FtcRecord> records = read_ftc(path);
    if (records.empty()) throw DataError("empty feature file: " + path);
    check_feature_record(cfg, records.front(), path);
    acc.add_sequence(frames_from_record(records.front()));
    ids_and_hashes.emplace_back(e.utt_id, record_audio_hash(records.front(), path));
  }

  HosvdBasis basis = fit_hosvd(acc);
  basis.provenance = basis_provenance(cfg, ids_and_hashes);
  save_basis(cfg.basis_path(), basis);
  save_energy_csv(cfg.energy_csv_path(), basis);
  log_info("fit-reduce: basis over " + std::to_string(acc.frame_count) +
           " train frames -> " + cfg.basis_path());
}

namespace {

/// Loads feature frames + aligned targets of a split and stacks them for the
/// regressor. Returns the utterance identity list used for provenance.
std::vector<std::pair<std::string, std::string>> load_split_matrix(
    const ExperimentConfig& cfg, const HosvdBasis* basis,
    const std::vector<ManifestEntry>& entries, Eigen::MatrixXd& x,
    Eigen::MatrixXd& y) {
  std::vector<Eigen::MatrixXd> xs, ys;
  std::vector<std::pair<std::string, std::string>> ids_and_hashes;
  Eigen::Index total = 0;
  for (const ManifestEntry& e : entries) {
    const std::string path = cfg.feature_path(e.utt_id);
    const std::vector<FtcRecord> records = read_ftc(path);
    if (records.empty()) throw DataError("empty feature file: " + path);
    check_feature_record(cfg, records.front(), path);
    ids_and_hashes.emplace_back(e.utt_id, record_audio_hash(records.front(), path));

    const RowMatrixXd frames = frames_from_record(records.front());
    Eigen::MatrixXd inputs = model_inputs(cfg, basis, frames);
    TvTrajectory tv = load_tv_csv(e.tv_path);
    const Eigen::Index frames_count = align_frames(inputs.rows(), tv);
    xs.push_back(inputs.topRows(frames_count));
    ys.push_back(tv.values.topRows(frames_count));
    total += frames_count;
  }
  if (total == 0) throw DataError("no frames in split");
  x.resize(total, xs.front().cols());
  y.resize(total, kNumTvChannels);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x.middleRows(row, xs[i].rows()) = xs[i];
    y.middleRows(row, ys[i].rows()) = ys[i];
    row += xs[i].rows();
  }
  return ids_and_hashes;
}

std::string upstream_provenance(const ExperimentConfig& cfg, const HosvdBasis* basis,
                                const std::vector<std::pair<std::string, std::string>>&
                                    train_ids_and_hashes) {
  if (cfg.features.kind == "mfcc") {
    // No basis stage: chain the train-set identity directly.
    std::uint64_t h = fnv1a64(cfg.feature_hash());
    for (const auto& [id, ah] : train_ids_and_hashes) {
      h = fnv1a64(id, h);
      h = fnv1a64(ah, h);
    }
    return hash_hex(h);
  }
  return basis->provenance;
}

}  // namespace

void run_train(const ExperimentConfig& cfg, const PipelineOptions&) {
  const DatasetManifest manifest = load_manifest(cfg.manifest_path());
  const std::vector<ManifestEntry> train = manifest.in_split(Split::kTrain);
  const std::vector<ManifestEntry> dev = manifest.in_split(Split::kDev);
  if (train.empty() || dev.empty())
    throw DataError("train and dev splits must both be nonempty");

  HosvdBasis basis;
  const HosvdBasis* basis_ptr = nullptr;
  if (cfg.features.kind == "cortical") {
    basis = load_basis(cfg.basis_path());
    basis_ptr = &basis;
  }

  Eigen::MatrixXd x_train, y_train, x_dev, y_dev;
  const auto train_ids = load_split_matrix(cfg, basis_ptr, train, x_train, y_train);
  load_split_matrix(cfg, basis_ptr, dev, x_dev, y_dev);

  if (cfg.features.kind == "cortical" &&
      basis.provenance != basis_provenance(cfg, train_ids))
    throw ProvenanceError(
        "basis was fit on different features or split; rerun fit-reduce");

  MlpArchitecture arch;
  arch.input_dim = cfg.derived_input_dim();
  arch.hidden_layers = cfg.model.hidden_layers;
  arch.hidden_width = cfg.model.hidden_width;
  arch.output_dim = kNumTvChannels;
  arch.dropout_input = cfg.model.dropout_input;
  arch.dropout_hidden = cfg.model.dropout_hidden;

  log_info("train: " + std::to_string(x_train.rows()) + " train frames, " +
           std::to_string(x_dev.rows()) + " dev frames, input dim " +
           std::to_string(arch.input_dim));
  auto [model, report] = train_mlp<float>(arch, x_train, y_train, x_dev, y_dev,
                                          cfg.model.train);
  model.provenance =
      model_provenance(cfg, upstream_provenance(cfg, basis_ptr, train_ids));
  save_model(model, cfg.checkpoint_path());
  save_train_log(cfg.train_log_path(), report);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "train: best dev mse %.6f at epoch %d (%.1fs)",
                report.best_dev_mse, report.best_epoch + 1, report.wall_time_s);
  log_info(buf);
}

namespace {

TvTrajectory smooth_in_normalized_units(const Mlp<float>& model,
                                        const ExperimentConfig& cfg,
                                        const Eigen::MatrixXd& pred) {
  KalmanParams params;
  params.q = cfg.eval.kalman_q;
  params.r = cfg.eval.kalman_r;
  params.dt = kTvFramePeriod;
  params.rts = cfg.eval.rts;
  TvTrajectory traj;
  traj.values.resize(pred.rows(), pred.cols());
  for (Eigen::Index c = 0; c < pred.cols(); ++c) {
    const double mean = model.target_mean[c];
    const double sd = model.target_std[c];
    Eigen::VectorXd zn = (pred.col(c).array() - mean) / sd;
    traj.values.col(c) = kalman_smooth_channel(zn, params).array() * sd + mean;
  }
  return traj;
}

}  // namespace

EvalReport run_eval(const ExperimentConfig& cfg, const PipelineOptions&,
                    const std::string& checkpoint_override) {
  const DatasetManifest manifest = load_manifest(cfg.manifest_path());
  const std::vector<ManifestEntry> test = manifest.in_split(Split::kTest);
  if (test.empty()) throw DataError("no test-split utterances in manifest");

  const Mlp<float> model = load_model(
      checkpoint_override.empty() ? cfg.checkpoint_path() : checkpoint_override);
  HosvdBasis basis;
  const HosvdBasis* basis_ptr = nullptr;
  std::string upstream;
  if (cfg.features.kind == "cortical") {
    basis = load_basis(cfg.basis_path());
    basis_ptr = &basis;
    upstream = basis.provenance;
  } else {
    // Recompute the mfcc upstream chain from the train split identities.
    std::uint64_t h = fnv1a64(cfg.feature_hash());
    for (const ManifestEntry& e : manifest.in_split(Split::kTrain)) {
      const std::string path = cfg.feature_path(e.utt_id);
      const std::vector<FtcRecord> records = read_ftc(path);
      if (records.empty()) throw DataError("empty feature file: " + path);
      check_feature_record(cfg, records.front(), path);
      h = fnv1a64(e.utt_id, h);
      h = fnv1a64(record_audio_hash(records.front(), path), h);
    }
    upstream = hash_hex(h);
  }
  if (model.provenance != model_provenance(cfg, upstream))
    throw ProvenanceError(
        "checkpoint does not match the configured pipeline; rerun train");
  if (model.arch.input_dim != cfg.derived_input_dim())
    throw ProvenanceError("checkpoint input width mismatch");

  std::vector<Eigen::VectorXd> est(kNumTvChannels), truth(kNumTvChannels);
  for (auto& v : est) v.resize(0);
  for (auto& v : truth) v.resize(0);
  std::vector<EvalReport> per_utt;

  for (const ManifestEntry& e : test) {
    const std::string path = cfg.feature_path(e.utt_id);
    const std::vector<FtcRecord> records = read_ftc(path);
    if (records.empty()) throw DataError("empty feature file: " + path);
    check_feature_record(cfg, records.front(), path);

    const RowMatrixXd frames = frames_from_record(records.front());
    const Eigen::MatrixXd inputs = model_inputs(cfg, basis_ptr, frames);
    Eigen::MatrixXd pred = predict(model, inputs);
    TvTrajectory smoothed = smooth_in_normalized_units(model, cfg, pred);

    TvTrajectory tv = load_tv_csv(e.tv_path);
    const Eigen::Index n = align_frames(smoothed.values.rows(), tv);
    for (int c = 0; c < kNumTvChannels; ++c) {
      Eigen::VectorXd& ev = est[static_cast<std::size_t>(c)];
      Eigen::VectorXd& gv = truth[static_cast<std::size_t>(c)];
      const Eigen::Index old = ev.size();
      ev.conservativeResize(old + n);
      gv.conservativeResize(old + n);
      ev.tail(n) = smoothed.values.col(c).head(n);
      gv.tail(n) = tv.values.col(c).head(n);
    }
    if (cfg.eval.per_utterance) {
      std::array<double, kNumTvChannels> row{};
      for (int c = 0; c < kNumTvChannels; ++c)
        row[static_cast<std::size_t>(c)] =
            ppmc(smoothed.values.col(c).head(n), tv.values.col(c).head(n));
      EvalReport r = make_eval_report(e.utt_id, cfg.reduction.context, row);
      per_utt.push_back(std::move(r));
    }
  }

  std::array<double, kNumTvChannels> per_tv{};
  for (int c = 0; c < kNumTvChannels; ++c)
    per_tv[static_cast<std::size_t>(c)] =
        ppmc(est[static_cast<std::size_t>(c)], truth[static_cast<std::size_t>(c)]);
  const EvalReport report =
      make_eval_report(cfg.feature_tag(), cfg.reduction.context, per_tv);
  save_eval_report_csv(cfg.report_path(), {report});
  write_provenance_sidecar(cfg.report_path(), model.provenance);
  if (cfg.eval.per_utterance)
    save_eval_report_csv(cfg.report_per_utt_path(), per_utt);

  char buf[64];
  std::snprintf(buf, sizeof(buf), "eval: average ppmc %.4f", report.average);
  log_info(buf);
  return report;
}

void run_infer(const ExperimentConfig& cfg, const std::string& wav_path,
               const std::string& out_csv_path) {
  const Mlp<float> model = load_model(cfg.checkpoint_path());
  HosvdBasis basis;
  const HosvdBasis* basis_ptr = nullptr;
  if (cfg.features.kind == "cortical") {
    basis = load_basis(cfg.basis_path());
    basis_ptr = &basis;
  }
  if (model.arch.input_dim != cfg.derived_input_dim())
    throw ProvenanceError("checkpoint input width mismatch");

  const CochlearFilterbankSpec fb = make_filterbank(cfg);
  const StrfBank bank = make_strf_bank(cfg);
  const AudioBuffer audio = load_audio(cfg, wav_path);
  const RowMatrixXd frames = compute_feature_frames(cfg, audio, fb, bank);
  const Eigen::MatrixXd inputs = model_inputs(cfg, basis_ptr, frames);
  Eigen::MatrixXd pred = predict(model, inputs);
  TvTrajectory smoothed = smooth_in_normalized_units(model, cfg, pred);
  save_tv_csv(out_csv_path, smoothed);
  log_info("infer: " + std::to_string(smoothed.values.rows()) + " frames -> " +
           out_csv_path);
}

void run_report(const ExperimentConfig& cfg,
                const std::vector<std::string>& extra_reports) {
  std::vector<EvalReport> rows;
  std::vector<std::string> paths = extra_reports;
  if (fs::exists(cfg.report_path())) paths.insert(paths.begin(), cfg.report_path());
  if (paths.empty()) throw DataError("no evaluation reports found");
  for (const std::string& p : paths) {
    const std::vector<EvalReport> part = load_eval_report_csv(p);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const EvalReport& a, const EvalReport& b) {
                     if (a.feature_tag != b.feature_tag)
                       return a.feature_tag < b.feature_tag;
                     return a.context < b.context;
                   });
  const std::string out = cfg.data.root + "/summary.csv";
  save_eval_report_csv(out, rows);
  for (const EvalReport& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-16s context %-3d average %.4f",
                  r.feature_tag.c_str(), r.context, r.average);
    log_info(buf);
  }
  log_info("report: wrote " + out);
}

}  // namespace sinv
