#ifndef SINV_CORTICAL_HPP
#define SINV_CORTICAL_HPP

#include <Eigen/Dense>
#include <vector>

#include "sinv/auditory.hpp"
#include "sinv/common.hpp"

namespace sinv {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Bank of spectro-temporal modulation filters. Each (scale, signed rate)
/// pair is a separable 2-D filter in the Fourier domain of the spectrogram:
/// a Mexican-hat spectral seed peaked at `scale` cycles/octave and a
/// gammatone-like temporal seed peaked at |rate| Hz, with the moving-ripple
/// direction selected by quadrant (negative signed rate = downward).
struct StrfBank {
  std::vector<double> scales = {1, 2, 4, 8};    // cycles/octave, ascending
  std::vector<double> rates = {2, 4, 8, 16, 32};  // Hz, ascending, unsigned
  double frame_period = 0.010;
  int n_freq_channels = 128;
  int channels_per_octave = 24;

  /// Signed rate axis, ascending: [-32,...,-2, 2,...,32].
  std::vector<double> signed_rates() const;
  int n_filters() const { return static_cast<int>(scales.size() * 2 * rates.size()); }

  /// Temporal seed magnitude at f Hz for a filter tuned to `rate` Hz.
  double temporal_response(double f_hz, double rate) const;
  /// Spectral seed magnitude at `omega` cycles/octave for a filter tuned to
  /// `scale` cycles/octave.
  double spectral_response(double omega_cpo, double scale) const;
};

StrfBank design_strf_bank(std::vector<double> scales, std::vector<double> rates,
                          double frame_period = 0.010, int n_freq_channels = 128,
                          int channels_per_octave = 24);

/// Per-frame scale x rate x frequency modulation magnitudes, flattened in
/// (scale, rate, frequency) order; one row per 10 ms frame.
struct CorticalSequence {
  RowMatrixXd frames;  // T x (n_scales * n_signed_rates * n_freq)
  double frame_period = 0.010;
  std::vector<double> scale_axis;
  std::vector<double> rate_axis;  // signed
  Eigen::VectorXd freq_axis;

  Eigen::Index n_frames() const { return frames.rows(); }
  int dim_scale() const { return static_cast<int>(scale_axis.size()); }
  int dim_rate() const { return static_cast<int>(rate_axis.size()); }
  int dim_freq() const { return static_cast<int>(freq_axis.size()); }
};

CorticalSequence cortical_transform(const AuditorySpectrogram& sp, const StrfBank& bank);

enum class RippleDirection { kDownward, kUpward };

/// Drifting sinusoidal test spectrogram 1 + depth*cos(2*pi*(rate*t +/- scale*x)).
AuditorySpectrogram ripple_stimulus(double rate_hz, double scale_cpo,
                                    RippleDirection direction, double duration_s,
                                    double depth = 0.9, int n_channels = 128,
                                    int channels_per_octave = 24,
                                    double frame_period = 0.010);

}  // namespace sinv

#endif  // SINV_CORTICAL_HPP
