#ifndef SINV_AUDIO_HPP
#define SINV_AUDIO_HPP

#include <Eigen/Dense>
#include <string>

#include "sinv/common.hpp"

namespace sinv {

/// Mono waveform, samples in [-1, 1].
struct AudioBuffer {
  Eigen::VectorXd samples;
  int sample_rate = 0;
  std::string id;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Reads a linear-PCM mono WAV file (16-bit int or 32-bit float).
/// Rejects multichannel and compressed encodings.
AudioBuffer load_wav(const std::string& path);

/// Writes 16-bit PCM mono. Samples are clamped to [-1, 1] before quantizing.
void save_wav(const std::string& path, const AudioBuffer& a);

/// Band-limited resampling (windowed-sinc, polyphase on the rational ratio).
/// Identity when the rates already match.
AudioBuffer resample(const AudioBuffer& a, int target_rate);

}  // namespace sinv

#endif  // SINV_AUDIO_HPP
