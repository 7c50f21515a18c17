#ifndef SINV_DATASET_HPP
#define SINV_DATASET_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sinv/audio.hpp"
#include "sinv/tv.hpp"

namespace sinv {

enum class Split { kTrain, kDev, kTest };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

struct ManifestEntry {
  std::string utt_id;
  std::string speaker_id;
  std::string audio_path;
  std::string tv_path;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<ManifestEntry> in_split(Split s) const;
  /// Throws DataError on duplicate utterance ids or missing files.
  void validate(bool check_files) const;
};

/// Manifest CSV: `utt_id,speaker_id,audio_path,tv_path,split`.
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const DatasetManifest& m);

enum class SplitMode { kBySpeaker, kByUtterance };

/// Deterministic split assignment. by_speaker keeps each speaker's
/// utterances in a single split (the speaker-independent regime);
/// proportions are honored within one unit via largest remainders.
DatasetManifest make_splits(const DatasetManifest& manifest, SplitMode mode,
                            const std::array<double, 3>& fractions,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic paired data. TVs are band-limited Gaussian noise mapped into
// fixed physical ranges; audio is synthesized from the TVs by a source-filter
// scheme (speaker-dependent pitch, two TV-driven resonators, LA-driven
// amplitude, LP-driven spectral tilt), so the inverse mapping exists locally
// and the pair is learnable.
// ---------------------------------------------------------------------------

struct SynthSpec {
  int n_speakers = 12;
  int utterances_per_speaker = 16;
  double duration = 3.0;  // seconds
  std::uint64_t seed = 7;
  double trajectory_bandwidth = 8.0;  // Hz, must stay below 50 Hz
  int sample_rate = 16000;
};

struct TvRange {
  double lo, hi;
};

/// Fixed per-channel output ranges of the generator (LA, LP, TBCL, TBCD,
/// TTCL, TTCD).
const std::array<TvRange, kNumTvChannels>& synth_tv_ranges();

struct SynthUtterance {
  std::string utt_id;
  std::string speaker_id;
  AudioBuffer audio;
  TvTrajectory tv;
};

/// Trajectories for one utterance; pure function of (spec, speaker, utt).
TvTrajectory synth_tv_trajectory(const SynthSpec& spec, int speaker, int utterance);

/// Audio for a given trajectory; pure function of (spec, speaker, utt, tv).
AudioBuffer synth_audio_from_tv(const SynthSpec& spec, int speaker, int utterance,
                                const TvTrajectory& tv);

std::vector<SynthUtterance> synth_dataset(const SynthSpec& spec);

}  // namespace sinv

#endif  // SINV_DATASET_HPP
