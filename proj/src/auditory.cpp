#include "sinv/auditory.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace sinv {

namespace {

constexpr double kSqrtLn2 = 0.8325546111576977;  // -3 dB point of a Gaussian
constexpr double kSkirtAsymmetry = 8.0;          // sigma_lo / sigma_hi

/// Smallest size >= n with only factors 2, 3 and 5 (fast for kissfft).
int next_fast_size(int n) {
  for (;; ++n) {
    int m = n;
    while (m % 2 == 0) m /= 2;
    while (m % 3 == 0) m /= 3;
    while (m % 5 == 0) m /= 5;
    if (m == 1) return n;
  }
}

}  // namespace

double CochlearFilterbankSpec::response(int channel, double freq_hz) const {
  if (freq_hz <= 0.0) return 0.0;
  const double x = std::log2(freq_hz / center_freqs(channel));
  const double sigma = x > 0.0 ? sigma_hi_oct : sigma_lo_oct;
  return std::exp(-0.5 * (x / sigma) * (x / sigma));
}

CochlearFilterbankSpec design_cochlear_filterbank(int sample_rate, int n_channels,
                                                  int channels_per_octave,
                                                  double min_center_freq, double q3db) {
  if (sample_rate <= 0 || n_channels <= 0 || channels_per_octave <= 0 ||
      min_center_freq <= 0.0 || q3db <= 0.0)
    throw DataError("invalid cochlear filterbank parameters");

  CochlearFilterbankSpec fb;
  fb.sample_rate = sample_rate;
  fb.n_channels = n_channels;
  fb.channels_per_octave = channels_per_octave;
  fb.min_center_freq = min_center_freq;
  fb.q3db = q3db;
  fb.center_freqs.resize(n_channels);
  for (int k = 0; k < n_channels; ++k)
    fb.center_freqs(k) =
        min_center_freq * std::exp2(static_cast<double>(k) / channels_per_octave);

  const double top = fb.center_freqs(n_channels - 1);
  if (top >= 0.5 * sample_rate)
    throw DataError("CF range exceeds Nyquist: top center frequency " +
                    std::to_string(top) + " Hz >= " +
                    std::to_string(0.5 * sample_rate) + " Hz");

  // Solve for the steep-side width so that the -3 dB bandwidth equals cf/q:
  //   2^(sigma_hi*sqrt(ln2)) - 2^(-A*sigma_hi*sqrt(ln2)) = 1/q.
  const double target = 1.0 / q3db;
  double lo = 1e-6, hi = 4.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = std::exp2(mid * kSqrtLn2) - std::exp2(-kSkirtAsymmetry * mid * kSqrtLn2);
    (v < target ? lo : hi) = mid;
  }
  fb.sigma_hi_oct = 0.5 * (lo + hi);
  fb.sigma_lo_oct = kSkirtAsymmetry * fb.sigma_hi_oct;
  return fb;
}

Eigen::MatrixXd cochlear_filter(const AudioBuffer& a, const CochlearFilterbankSpec& fb) {
  if (a.sample_rate != fb.sample_rate)
    throw DataError("cochlear_filter: sample rate mismatch (" +
                    std::to_string(a.sample_rate) + " vs " +
                    std::to_string(fb.sample_rate) + ")");
  const auto n = static_cast<int>(a.samples.size());
  if (n < 1) throw DataError("cochlear_filter: empty input");

  // Zero-pad so the circular wrap of the (short) zero-phase impulse
  // responses cannot touch the signal.
  const int nfft = next_fast_size(n + 4096);
  std::vector<double> padded(static_cast<std::size_t>(nfft), 0.0);
  Eigen::VectorXd::Map(padded.data(), n) = a.samples;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);  // full spectrum, length nfft

  const double bin_hz = static_cast<double>(fb.sample_rate) / nfft;
  Eigen::MatrixXd out(n, fb.n_channels);
  std::vector<std::complex<double>> shaped(static_cast<std::size_t>(nfft));
  std::vector<double> channel(static_cast<std::size_t>(nfft));
  for (int k = 0; k < fb.n_channels; ++k) {
    for (int m = 0; m < nfft; ++m) {
      const double f = (m <= nfft / 2) ? m * bin_hz : (m - nfft) * bin_hz;
      shaped[static_cast<std::size_t>(m)] =
          spectrum[static_cast<std::size_t>(m)] * fb.response(k, std::abs(f));
    }
    fft.inv(channel, shaped);
    out.col(k) = Eigen::VectorXd::Map(channel.data(), n);
  }
  return out;
}

Eigen::MatrixXd haircell_stage(const Eigen::MatrixXd& x, int sample_rate,
                               double gain, double cutoff_hz) {
  const double a = std::exp(-2.0 * std::numbers::pi * cutoff_hz / sample_rate);
  const double b = 1.0 - a;  // unity DC gain, |H| <= 1
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    double prev = 0.0, state = 0.0;
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      const double diff = x(t, k) - prev;
      prev = x(t, k);
      state = b * std::tanh(gain * diff) + a * state;
      y(t, k) = state;
    }
  }
  return y;
}

Eigen::MatrixXd lateral_inhibition(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd y(x.rows(), x.cols());
  y.col(0) = x.col(0).cwiseMax(0.0);
  for (Eigen::Index k = x.cols() - 1; k >= 1; --k)
    y.col(k) = (x.col(k) - x.col(k - 1)).cwiseMax(0.0);
  return y;
}

AuditorySpectrogram frame_integrate(const Eigen::MatrixXd& x, int sample_rate,
                                    double frame_period, double time_constant) {
  const auto hop = static_cast<Eigen::Index>(std::llround(sample_rate * frame_period));
  const Eigen::Index n_frames = x.rows() / hop;
  if (n_frames < 1) throw DataError("frame_integrate: input shorter than one frame");

  const double beta = std::exp(-1.0 / (sample_rate * time_constant));
  AuditorySpectrogram sp;
  sp.frame_period = frame_period;
  sp.frames.resize(n_frames, x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    double state = 0.0;
    Eigen::Index next = hop - 1;
    Eigen::Index frame = 0;
    for (Eigen::Index t = 0; t < x.rows() && frame < n_frames; ++t) {
      state = (1.0 - beta) * x(t, k) + beta * state;
      if (t == next) {
        sp.frames(frame++, k) = state;
        next += hop;
      }
    }
  }
  return sp;
}

AuditorySpectrogram audspec(const AudioBuffer& a, const CochlearFilterbankSpec& fb) {
  Eigen::MatrixXd y = cochlear_filter(a, fb);
  y = haircell_stage(y, fb.sample_rate);
  y = lateral_inhibition(y);
  AuditorySpectrogram sp = frame_integrate(y, fb.sample_rate);
  sp.channel_center_freqs = fb.center_freqs;
  return sp;
}

}  // namespace sinv
