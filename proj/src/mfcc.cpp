#include "sinv/mfcc.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "sinv/common.hpp"

namespace sinv {

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

Eigen::MatrixXd mfcc_baseline(const AudioBuffer& a, int n_coeffs,
                              double frame_period, int n_mel_bands,
                              double window_s) {
  const int fs = a.sample_rate;
  const int hop = static_cast<int>(std::llround(fs * frame_period));
  const int win = static_cast<int>(std::llround(fs * window_s));
  if (hop <= 0 || win <= 0) throw ConfigError("mfcc frame geometry invalid");
  if (n_coeffs <= 0 || n_coeffs > n_mel_bands)
    throw ConfigError("mfcc coefficient count invalid");

  const int n_frames = static_cast<int>(a.samples.size()) / hop;
  if (n_frames <= 0) throw DataError("audio too short for one frame");

  const int nfft = next_pow2(win);
  const int n_bins = nfft / 2 + 1;

  const double pi = std::numbers::pi;
  Eigen::VectorXd hann(win);
  for (int i = 0; i < win; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * pi * i / (win - 1));

  // Triangular mel filterbank, band edges equally spaced on the mel scale.
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(fs / 2.0);
  Eigen::VectorXd edges(n_mel_bands + 2);
  for (int b = 0; b < n_mel_bands + 2; ++b)
    edges[b] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * b / (n_mel_bands + 1));
  Eigen::MatrixXd mel_fb = Eigen::MatrixXd::Zero(n_mel_bands, n_bins);
  for (int b = 0; b < n_mel_bands; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * fs / nfft;
      if (f > lo && f < mid)
        mel_fb(b, k) = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        mel_fb(b, k) = (hi - f) / (hi - mid);
    }
  }

  // Orthonormal DCT-II.
  Eigen::MatrixXd dct(n_coeffs, n_mel_bands);
  for (int c = 0; c < n_coeffs; ++c)
    for (int b = 0; b < n_mel_bands; ++b)
      dct(c, b) = std::sqrt((c == 0 ? 1.0 : 2.0) / n_mel_bands) *
                  std::cos(pi * c * (b + 0.5) / n_mel_bands);

  Eigen::FFT<double> fft;
  std::vector<double> buf(nfft);
  std::vector<std::complex<double>> spec;
  Eigen::MatrixXd out(n_frames, n_coeffs);
  Eigen::VectorXd power(n_bins), mel_energy(n_mel_bands);
  for (int t = 0; t < n_frames; ++t) {
    const long start = static_cast<long>(t) * hop;
    for (int i = 0; i < nfft; ++i) {
      const long idx = start + i;
      buf[i] = (i < win && idx < a.samples.size()) ? a.samples[idx] * hann[i]
                                                   : 0.0;
    }
    fft.fwd(spec, buf);
    for (int k = 0; k < n_bins; ++k) power[k] = std::norm(spec[k]);
    mel_energy = mel_fb * power;
    for (int b = 0; b < n_mel_bands; ++b)
      mel_energy[b] = std::log(std::max(mel_energy[b], 1e-10));
    out.row(t) = (dct * mel_energy).transpose();
  }
  return out;
}

}  // namespace sinv
