#ifndef SINV_MFCC_HPP
#define SINV_MFCC_HPP

#include <Eigen/Dense>

#include "sinv/audio.hpp"

namespace sinv {

/// Mel-cepstral baseline features: 25 ms Hann window, 10 ms hop, 26 mel
/// bands, DCT-II cepstra. Frames the tail with zero padding so the frame
/// count matches the auditory pipeline (floor(duration / hop)).
Eigen::MatrixXd mfcc_baseline(const AudioBuffer& a, int n_coeffs = 13,
                              double frame_period = 0.010, int n_mel_bands = 26,
                              double window_s = 0.025);

}  // namespace sinv

#endif  // SINV_MFCC_HPP
