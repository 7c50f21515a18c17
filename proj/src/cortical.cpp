#include "sinv/cortical.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace sinv {

namespace {

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

std::vector<double> StrfBank::signed_rates() const {
  std::vector<double> out;
  out.reserve(2 * rates.size());
  for (auto it = rates.rbegin(); it != rates.rend(); ++it) out.push_back(-*it);
  for (double r : rates) out.push_back(r);
  return out;
}

double StrfBank::temporal_response(double f_hz, double rate) const {
  if (f_hz <= 0.0) return 0.0;
  const double u = f_hz / rate;
  return u * u * std::exp(2.0 * (1.0 - u));
}

double StrfBank::spectral_response(double omega_cpo, double scale) const {
  if (omega_cpo <= 0.0) return 0.0;
  const double v = omega_cpo / scale;
  return v * v * std::exp(1.0 - v * v);
}

StrfBank design_strf_bank(std::vector<double> scales, std::vector<double> rates,
                          double frame_period, int n_freq_channels,
                          int channels_per_octave) {
  if (scales.empty() || rates.empty()) throw DataError("strf bank needs scales and rates");
  if (!std::is_sorted(scales.begin(), scales.end()) || scales.front() <= 0.0)
    throw DataError("scales must be positive and ascending");
  if (!std::is_sorted(rates.begin(), rates.end()) || rates.front() <= 0.0)
    throw DataError("rates must be positive and ascending");
  const double nyquist = 0.5 / frame_period;
  if (rates.back() >= nyquist)
    throw DataError("rate " + std::to_string(rates.back()) +
                    " Hz is at or above the frame-rate Nyquist (" +
                    std::to_string(nyquist) + " Hz)");
  StrfBank bank;
  bank.scales = std::move(scales);
  bank.rates = std::move(rates);
  bank.frame_period = frame_period;
  bank.n_freq_channels = n_freq_channels;
  bank.channels_per_octave = channels_per_octave;
  return bank;
}

CorticalSequence cortical_transform(const AuditorySpectrogram& sp, const StrfBank& bank) {
  const auto n_frames = static_cast<int>(sp.frames.rows());
  const int n_freq = bank.n_freq_channels;
  if (sp.frames.cols() != n_freq)
    throw DataError("cortical_transform: channel count mismatch (" +
                    std::to_string(sp.frames.cols()) + " vs " + std::to_string(n_freq) + ")");
  if (n_frames < 1) throw DataError("cortical_transform: empty spectrogram");

  const int tf = next_fast_size(n_frames);
  Eigen::FFT<double> fft;

  // 2-D spectrum: FFT over time (columns), then over log-frequency (rows).
  Eigen::MatrixXcd spec2d = Eigen::MatrixXcd::Zero(tf, n_freq);
  spec2d.topRows(n_frames) = sp.frames.cast<std::complex<double>>();
  std::vector<std::complex<double>> buf_t(static_cast<std::size_t>(tf));
  std::vector<std::complex<double>> out_t(static_cast<std::size_t>(tf));
  for (int k = 0; k < n_freq; ++k) {
    Eigen::VectorXcd::Map(buf_t.data(), tf) = spec2d.col(k);
    fft.fwd(out_t, buf_t);
    spec2d.col(k) = Eigen::VectorXcd::Map(out_t.data(), tf);
  }
  std::vector<std::complex<double>> buf_f(static_cast<std::size_t>(n_freq));
  std::vector<std::complex<double>> out_f(static_cast<std::size_t>(n_freq));
  for (int m = 0; m < tf; ++m) {
    Eigen::RowVectorXcd::Map(buf_f.data(), n_freq) = spec2d.row(m);
    fft.fwd(out_f, buf_f);
    spec2d.row(m) = Eigen::RowVectorXcd::Map(out_f.data(), n_freq);
  }

  const double bin_hz = 1.0 / (tf * sp.frame_period);
  const double bin_cpo = static_cast<double>(bank.channels_per_octave) / n_freq;
  const auto s_rates = bank.signed_rates();
  const int n_scales = static_cast<int>(bank.scales.size());
  const int n_srates = static_cast<int>(s_rates.size());

  CorticalSequence seq;
  seq.frame_period = sp.frame_period;
  seq.scale_axis = bank.scales;
  seq.rate_axis = s_rates;
  seq.freq_axis = sp.channel_center_freqs;
  seq.frames.resize(n_frames, static_cast<Eigen::Index>(n_scales) * n_srates * n_freq);

  Eigen::MatrixXcd z(tf, n_freq);
  for (int si = 0; si < n_scales; ++si) {
    for (int ri = 0; ri < n_srates; ++ri) {
      const double scale = bank.scales[static_cast<std::size_t>(si)];
      const double srate = s_rates[static_cast<std::size_t>(ri)];
      const bool downward = srate < 0.0;

      // Analytic response: positive temporal frequencies only (doubled),
      // with the spectral half-plane picking the ripple direction.
      z.setZero();
      for (int m = 1; m < (tf + 1) / 2; ++m) {
        const double gt = 2.0 * bank.temporal_response(m * bin_hz, std::abs(srate));
        if (gt < 1e-12) continue;
        if (downward) {
          for (int nb = 1; nb < n_freq / 2; ++nb)
            z(m, nb) = spec2d(m, nb) * (gt * bank.spectral_response(nb * bin_cpo, scale));
        } else {
          for (int nb = n_freq / 2 + 1; nb < n_freq; ++nb)
            z(m, nb) =
                spec2d(m, nb) * (gt * bank.spectral_response((n_freq - nb) * bin_cpo, scale));
        }
      }

      // Inverse 2-D transform; rows outside the mask stay zero.
      for (int m = 1; m < (tf + 1) / 2; ++m) {
        Eigen::RowVectorXcd::Map(buf_f.data(), n_freq) = z.row(m);
        fft.inv(out_f, buf_f);
        z.row(m) = Eigen::RowVectorXcd::Map(out_f.data(), n_freq);
      }
      for (int k = 0; k < n_freq; ++k) {
        Eigen::VectorXcd::Map(buf_t.data(), tf) = z.col(k);
        fft.inv(out_t, buf_t);
        z.col(k) = Eigen::VectorXcd::Map(out_t.data(), tf);
      }

      const Eigen::Index base = (static_cast<Eigen::Index>(si) * n_srates + ri) * n_freq;
      for (int t = 0; t < n_frames; ++t)
        for (int k = 0; k < n_freq; ++k)
          seq.frames(t, base + k) = std::abs(z(t, k));
    }
  }
  return seq;
}

AuditorySpectrogram ripple_stimulus(double rate_hz, double scale_cpo,
                                    RippleDirection direction, double duration_s,
                                    double depth, int n_channels,
                                    int channels_per_octave, double frame_period) {
  if (std::abs(rate_hz) >= 0.5 / frame_period)
    throw DataError("ripple rate exceeds the frame-rate Nyquist");
  const auto n_frames = static_cast<Eigen::Index>(std::llround(duration_s / frame_period));
  const double sgn = direction == RippleDirection::kDownward ? 1.0 : -1.0;
  const double two_pi = 2.0 * std::numbers::pi;

  AuditorySpectrogram sp;
  sp.frame_period = frame_period;
  sp.frames.resize(n_frames, n_channels);
  sp.channel_center_freqs.resize(n_channels);
  for (int k = 0; k < n_channels; ++k)
    sp.channel_center_freqs(k) = 180.0 * std::exp2(static_cast<double>(k) / channels_per_octave);
  for (Eigen::Index t = 0; t < n_frames; ++t) {
    const double phase_t = rate_hz * static_cast<double>(t) * frame_period;
    for (int k = 0; k < n_channels; ++k) {
      const double x_oct = static_cast<double>(k) / channels_per_octave;
      sp.frames(t, k) = 1.0 + depth * std::cos(two_pi * (phase_t + sgn * scale_cpo * x_oct));
    }
  }
  return sp;
}

}  // namespace sinv
