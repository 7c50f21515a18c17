#include "sinv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace sinv {

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw DataError("unknown split label: " + name);
}

std::vector<ManifestEntry> DatasetManifest::in_split(Split s) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries)
    if (e.split == s) out.push_back(e);
  return out;
}

void DatasetManifest::validate(bool check_files) const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.utt_id).second)
      throw DataError("duplicate utterance id in manifest: " + e.utt_id);
    if (check_files) {
      if (!std::filesystem::exists(e.audio_path))
        throw DataError("missing audio file: " + e.audio_path);
      if (!std::filesystem::exists(e.tv_path))
        throw DataError("missing tv file: " + e.tv_path);
    }
  }
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError("empty manifest: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "utt_id,speaker_id,audio_path,tv_path,split")
    throw DataError("bad manifest header in " + path);

  DatasetManifest m;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    ManifestEntry e;
    std::string split;
    if (!std::getline(ss, e.utt_id, ',') || !std::getline(ss, e.speaker_id, ',') ||
        !std::getline(ss, e.audio_path, ',') || !std::getline(ss, e.tv_path, ',') ||
        !std::getline(ss, split, ','))
      throw DataError("short manifest row in " + path + ": " + line);
    e.split = split_from_name(split);
    m.entries.push_back(std::move(e));
  }
  m.validate(false);
  return m;
}

void save_manifest(const std::string& path, const DatasetManifest& m) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write manifest: " + path);
  f << "utt_id,speaker_id,audio_path,tv_path,split\n";
  for (const auto& e : m.entries)
    f << e.utt_id << ',' << e.speaker_id << ',' << e.audio_path << ','
      << e.tv_path << ',' << split_name(e.split) << "\n";
}

namespace {

/// Largest-remainder apportionment of n items into three splits.
std::array<std::size_t, 3> split_counts(std::size_t n, const std::array<double, 3>& fr) {
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double target = fr[static_cast<std::size_t>(i)] * static_cast<double>(n);
    counts[static_cast<std::size_t>(i)] = static_cast<std::size_t>(std::floor(target + 1e-9));
    rem[static_cast<std::size_t>(i)] = target - std::floor(target + 1e-9);
    assigned += counts[static_cast<std::size_t>(i)];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (rem[static_cast<std::size_t>(i)] > rem[static_cast<std::size_t>(best)]) best = i;
    ++counts[static_cast<std::size_t>(best)];
    rem[static_cast<std::size_t>(best)] = -1.0;
    ++assigned;
  }
  return counts;
}

void check_fractions(const std::array<double, 3>& fr) {
  double sum = 0.0;
  for (double f : fr) {
    if (f <= 0.0) throw DataError("split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("split fractions must sum to 1");
}

}  // namespace

DatasetManifest make_splits(const DatasetManifest& manifest, SplitMode mode,
                            const std::array<double, 3>& fractions,
                            std::uint64_t seed) {
  check_fractions(fractions);
  DatasetManifest out = manifest;
  Rng rng(seed);

  if (mode == SplitMode::kBySpeaker) {
    std::set<std::string> speaker_set;
    for (const auto& e : manifest.entries) speaker_set.insert(e.speaker_id);
    std::vector<std::string> speakers(speaker_set.begin(), speaker_set.end());
    if (speakers.size() < 3)
      throw DataError("by_speaker split needs at least 3 speakers, got " +
                      std::to_string(speakers.size()));
    rng.shuffle(speakers);
    auto counts = split_counts(speakers.size(), fractions);
    std::map<std::string, Split> assign;
    std::size_t idx = 0;
    for (int s = 0; s < 3; ++s)
      for (std::size_t i = 0; i < counts[static_cast<std::size_t>(s)]; ++i)
        assign[speakers[idx++]] = static_cast<Split>(s);
    for (auto& e : out.entries) e.split = assign.at(e.speaker_id);
  } else {
    std::vector<std::size_t> order(manifest.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    auto counts = split_counts(order.size(), fractions);
    std::size_t idx = 0;
    for (int s = 0; s < 3; ++s)
      for (std::size_t i = 0; i < counts[static_cast<std::size_t>(s)]; ++i)
        out.entries[order[idx++]].split = static_cast<Split>(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

const std::array<TvRange, kNumTvChannels>& synth_tv_ranges() {
  static const std::array<TvRange, kNumTvChannels> ranges = {{
      {0.0, 25.0},   // LA (mm)
      {-2.0, 12.0},  // LP (mm)
      {0.0, 180.0},  // TBCL (deg)
      {0.0, 25.0},   // TBCD (mm)
      {0.0, 80.0},   // TTCL (deg)
      {0.0, 25.0},   // TTCD (mm)
  }};
  return ranges;
}

namespace {

std::uint64_t utt_seed(const SynthSpec& spec, int speaker, int utterance, std::uint64_t tag) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a64(&spec.seed, sizeof(spec.seed), h);
  h = fnv1a64(&speaker, sizeof(speaker), h);
  h = fnv1a64(&utterance, sizeof(utterance), h);
  h = fnv1a64(&tag, sizeof(tag), h);
  return h;
}

/// Windowed-sinc low-pass kernel, normalized cutoff fc in (0, 0.5).
Eigen::VectorXd lowpass_kernel(double fc, int half) {
  const double pi = std::numbers::pi;
  Eigen::VectorXd h(2 * half + 1);
  for (int i = -half; i <= half; ++i) {
    double v = (i == 0) ? 2.0 * fc : std::sin(2.0 * pi * fc * i) / (pi * i);
    double w = 0.42 + 0.5 * std::cos(pi * i / double(half)) +
               0.08 * std::cos(2.0 * pi * i / double(half));
    h(i + half) = v * w;
  }
  return h;
}

}  // namespace

TvTrajectory synth_tv_trajectory(const SynthSpec& spec, int speaker, int utterance) {
  if (spec.n_speakers <= 0 || spec.utterances_per_speaker <= 0 || spec.duration <= 0.0)
    throw DataError("synth spec counts must be positive");
  if (spec.trajectory_bandwidth >= 0.5 / kTvFramePeriod)
    throw DataError("trajectory bandwidth must stay below 50 Hz");

  const auto n_frames =
      static_cast<Eigen::Index>(std::llround(spec.duration / kTvFramePeriod));
  const double fc = spec.trajectory_bandwidth * kTvFramePeriod;  // cycles/frame
  const int half = 64;
  const Eigen::VectorXd kernel = lowpass_kernel(fc, half);
  const double kernel_norm = kernel.norm();  // filtered white noise std

  Rng rng(utt_seed(spec, speaker, utterance, 0x7601));
  TvTrajectory tv;
  tv.values.resize(n_frames, kNumTvChannels);
  const auto& ranges = synth_tv_ranges();

  Eigen::VectorXd white(n_frames + 2 * half);
  for (int c = 0; c < kNumTvChannels; ++c) {
    for (Eigen::Index i = 0; i < white.size(); ++i) white(i) = rng.gauss();
    const TvRange r = ranges[static_cast<std::size_t>(c)];
    const double center = 0.5 * (r.lo + r.hi);
    const double swing = 0.35 * 0.5 * (r.hi - r.lo);
    for (Eigen::Index t = 0; t < n_frames; ++t) {
      double acc = 0.0;
      for (int k = 0; k < kernel.size(); ++k) acc += white(t + k) * kernel(k);
      double v = center + swing * (acc / kernel_norm);
      tv.values(t, c) = std::clamp(v, r.lo, r.hi);
    }
  }
  return tv;
}

AudioBuffer synth_audio_from_tv(const SynthSpec& spec, int speaker, int utterance,
                                const TvTrajectory& tv) {
  const int fs = spec.sample_rate;
  const auto hop = static_cast<Eigen::Index>(std::llround(fs * kTvFramePeriod));
  const Eigen::Index n_frames = tv.frames();
  const Eigen::Index n = n_frames * hop;
  const double pi = std::numbers::pi;

  Rng speaker_rng(utt_seed(spec, speaker, -1, 0x5947));
  // Speaker pitch stays above the frame rate (every 10 ms frame catches a
  // pulse, keeping band levels steady) but low enough that the harmonic comb
  // is unresolved against the quarter-octave cochlear bandwidth.
  const double f0 = 102.0 + 26.0 * speaker_rng.uniform01();
  Rng noise_rng(utt_seed(spec, speaker, utterance, 0xA0D1));

  const auto& ranges = synth_tv_ranges();
  auto unit = [&](Eigen::Index frame, int c) {
    const TvRange r = ranges[static_cast<std::size_t>(c)];
    return (tv.values(frame, c) - r.lo) / (r.hi - r.lo);
  };
  // Per-sample control values, linearly interpolated between frame centers.
  auto control = [&](Eigen::Index i, int c) {
    double pos = (static_cast<double>(i) + 0.5) / static_cast<double>(hop) - 0.5;
    auto f0i = static_cast<Eigen::Index>(std::floor(pos));
    double frac = pos - static_cast<double>(f0i);
    Eigen::Index a = std::clamp<Eigen::Index>(f0i, 0, n_frames - 1);
    Eigen::Index b = std::clamp<Eigen::Index>(f0i + 1, 0, n_frames - 1);
    return (1.0 - frac) * unit(a, c) + frac * unit(b, c);
  };

  AudioBuffer out;
  out.sample_rate = fs;
  out.samples.setZero(n);

  const double pivot = std::cos(2.0 * pi * 1200.0 / fs);
  double phase = 0.0;
  double tilt_state = 0.0;
  double r1y1 = 0.0, r1y2 = 0.0, r2y1 = 0.0, r2y2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Glottal source: pulse train at speaker pitch plus aspiration noise.
    phase += f0 / fs;
    double src = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      src = 2.0;
    }
    // Aspiration noise stays well below the pulse energy: band levels read
    // from 8 ms windows wobble far less under deterministic excitation.
    src += 0.12 * noise_rng.gauss();

    // LP controls spectral tilt; the one-zero filter is renormalized at a
    // 1.2 kHz pivot so tilt changes band balance without changing loudness.
    const double t = 0.92 * control(i, 1);
    const double tilted =
        (src - t * tilt_state) / std::sqrt(1.0 + t * t - 2.0 * t * pivot);
    tilt_state = src;

    // Two resonators track tongue-body and tongue-tip constrictions. The gain
    // normalizes noise-energy response to bw^(-1/2), so a tighter constriction
    // reads as a taller, narrower and louder band: the degree TVs stay audible
    // through the coarse spectral blur as a per-band level cue while the
    // location TVs sweep the band centers.
    const double freq1 = 460.0 + 560.0 * control(i, 2);
    const double bw1 = 60.0 + 360.0 * control(i, 3);
    const double freq2 = 1550.0 + 2050.0 * control(i, 4);
    const double bw2 = 150.0 + 1250.0 * control(i, 5);

    const double w1 = 2.0 * pi * freq1 / fs;
    const double p1 = std::exp(-pi * bw1 / fs);
    const double g1 = std::sin(w1) * std::sqrt(2.0 * (1.0 - p1 * p1)) *
                      std::pow(147.0 / bw1, 0.85);
    const double y1 = g1 * tilted + 2.0 * p1 * std::cos(w1) * r1y1 - p1 * p1 * r1y2;
    r1y2 = r1y1;
    r1y1 = y1;

    const double w2 = 2.0 * pi * freq2 / fs;
    const double p2 = std::exp(-pi * bw2 / fs);
    const double g2 = std::sin(w2) * std::sqrt(2.0 * (1.0 - p2 * p2)) *
                      std::pow(433.0 / bw2, 0.85);
    const double y2 = g2 * tilted + 2.0 * p2 * std::cos(w2) * r2y1 - p2 * p2 * r2y2;
    r2y2 = r2y1;
    r2y1 = y2;

    // LA gates the overall amplitude. A broadband shunt of the tilted source
    // bypasses the resonators, so channels outside the two formant bands still
    // carry the amplitude and tilt cues; the faint dither anchors the absolute
    // level floor.
    const double amp = 0.10 + 0.90 * control(i, 0);
    out.samples(i) =
        0.22 * amp * (y1 + 0.8 * y2 + 0.22 * tilted) + 0.002 * noise_rng.gauss();
  }
  // Rare clipping guard; the fixed gain keeps typical peaks well below 1.
  out.samples = out.samples.cwiseMax(-0.99).cwiseMin(0.99);
  return out;
}

std::vector<SynthUtterance> synth_dataset(const SynthSpec& spec) {
  std::vector<SynthUtterance> out;
  out.reserve(static_cast<std::size_t>(spec.n_speakers) *
              static_cast<std::size_t>(spec.utterances_per_speaker));
  char buf[64];
  for (int s = 0; s < spec.n_speakers; ++s) {
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      SynthUtterance su;
      std::snprintf(buf, sizeof(buf), "spk%03d", s);
      su.speaker_id = buf;
      std::snprintf(buf, sizeof(buf), "spk%03d_utt%03d", s, u);
      su.utt_id = buf;
      su.tv = synth_tv_trajectory(spec, s, u);
      su.audio = synth_audio_from_tv(spec, s, u, su.tv);
      su.audio.id = su.utt_id;
      out.push_back(std::move(su));
    }
  }
  return out;
}

}  // namespace sinv
