#ifndef SINV_AUDITORY_HPP
#define SINV_AUDITORY_HPP

#include <Eigen/Dense>

#include "sinv/audio.hpp"
#include "sinv/common.hpp"

namespace sinv {

/// Constant-Q cochlear filterbank on a geometric center-frequency grid.
/// Filters are defined by their magnitude response in log-frequency:
/// a steep Gaussian skirt above CF and a shallow one below, scaled so the
/// -3 dB bandwidth is cf/q for every channel. Filtering is zero-phase.
struct CochlearFilterbankSpec {
  int sample_rate = 16000;
  int n_channels = 128;
  int channels_per_octave = 24;
  double min_center_freq = 180.0;
  double q3db = 4.0;
  double sigma_hi_oct = 0.0;  // octaves, steep side (f > cf)
  double sigma_lo_oct = 0.0;  // octaves, shallow side (f < cf)
  Eigen::VectorXd center_freqs;

  /// Magnitude response of one channel at a given frequency; unit peak at cf.
  double response(int channel, double freq_hz) const;
};

CochlearFilterbankSpec design_cochlear_filterbank(int sample_rate,
                                                  int n_channels = 128,
                                                  int channels_per_octave = 24,
                                                  double min_center_freq = 180.0,
                                                  double q3db = 4.0);

/// Time x n_channels output of the filterbank (frequency-domain filtering,
/// zero phase, so channels are exactly time-aligned).
Eigen::MatrixXd cochlear_filter(const AudioBuffer& a, const CochlearFilterbankSpec& fb);

/// Per channel: first temporal difference, tanh compression, first-order
/// membrane low-pass.
Eigen::MatrixXd haircell_stage(const Eigen::MatrixXd& x, int sample_rate,
                               double gain = 8.0, double cutoff_hz = 4000.0);

/// First difference across adjacent channels (channel 0 passed through),
/// then half-wave rectification.
Eigen::MatrixXd lateral_inhibition(const Eigen::MatrixXd& x);

/// Nonnegative frames on the 10 ms grid.
struct AuditorySpectrogram {
  Eigen::MatrixXd frames;  // frames x n_channels
  double frame_period = 0.010;
  Eigen::VectorXd channel_center_freqs;
};

/// Leaky integration (8 ms time constant) sampled every frame_period.
AuditorySpectrogram frame_integrate(const Eigen::MatrixXd& x, int sample_rate,
                                    double frame_period = 0.010,
                                    double time_constant = 0.008);

/// Full frontend: cochlear filterbank -> hair cells -> lateral inhibition ->
/// frame integration.
AuditorySpectrogram audspec(const AudioBuffer& a, const CochlearFilterbankSpec& fb);

}  // namespace sinv

#endif  // SINV_AUDITORY_HPP
