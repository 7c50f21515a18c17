#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sinv/auditory.hpp"
#include "sinv/common.hpp"

using namespace sinv;

namespace {

AudioBuffer tone(double freq, double duration = 0.3, int fs = 16000,
                 double amplitude = 0.5) {
  AudioBuffer a;
  a.sample_rate = fs;
  const auto n = static_cast<Eigen::Index>(std::llround(duration * fs));
  a.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    a.samples(i) = amplitude * std::sin(2.0 * std::numbers::pi * freq * i / fs);
  return a;
}

/// Frequency where one channel's magnitude response crosses `level`, found by
/// bisection on the given side of the center frequency.
double crossing(const CochlearFilterbankSpec& fb, int channel, double level,
                bool above) {
  const double cf = fb.center_freqs(channel);
  double lo = above ? cf : cf / 8.0;
  double hi = above ? cf * 8.0 : cf;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const bool past = fb.response(channel, mid) < level;
    if (above)
      (past ? hi : lo) = mid;
    else
      (past ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// Filterbank design
// ---------------------------------------------------------------------------

TEST_CASE("center frequencies follow the geometric 24-per-octave grid") {
  auto fb = design_cochlear_filterbank(16000);
  REQUIRE(fb.center_freqs.size() == 128);
  CHECK(fb.center_freqs(0) == doctest::Approx(180.0).epsilon(1e-12));
  CHECK(fb.center_freqs(24) == doctest::Approx(360.0).epsilon(1e-12));
  CHECK(fb.center_freqs(48) == doctest::Approx(720.0).epsilon(1e-12));
  for (int k = 1; k < 128; ++k)
    CHECK(fb.center_freqs(k) / fb.center_freqs(k - 1) ==
          doctest::Approx(std::exp2(1.0 / 24.0)).epsilon(1e-12));
  CHECK(fb.center_freqs(127) < 8000.0);
}

TEST_CASE("design rejects grids past Nyquist and bad parameters") {
  CHECK_THROWS_AS(design_cochlear_filterbank(8000), DataError);  // top cf > 4 kHz
  CHECK_THROWS_AS(design_cochlear_filterbank(16000, 0), DataError);
  CHECK_THROWS_AS(design_cochlear_filterbank(16000, 128, 24, -1.0), DataError);
  CHECK_THROWS_AS(design_cochlear_filterbank(16000, 128, 24, 180.0, 0.0), DataError);
}

TEST_CASE("response peaks at cf and the skirts are asymmetric") {
  auto fb = design_cochlear_filterbank(16000);
  for (int k : {0, 30, 64, 100, 127}) {
    const double cf = fb.center_freqs(k);
    CHECK(fb.response(k, cf) == doctest::Approx(1.0).epsilon(1e-12));
    // steep above cf, shallow below: equal octave offsets, unequal response
    CHECK(fb.response(k, cf * std::exp2(0.25)) <
          0.5 * fb.response(k, cf * std::exp2(-0.25)));
    CHECK(fb.response(k, -5.0) == 0.0);
    CHECK(fb.response(k, 0.0) == 0.0);
  }
}

TEST_CASE("-3 dB bandwidth equals cf / q across the bank") {
  auto fb = design_cochlear_filterbank(16000);
  const double level = 1.0 / std::sqrt(2.0);  // -3 dB in magnitude
  for (int k : {10, 40, 64, 90, 120}) {
    const double f_hi = crossing(fb, k, level, true);
    const double f_lo = crossing(fb, k, level, false);
    const double cf = fb.center_freqs(k);
    CHECK((f_hi - f_lo) / cf == doctest::Approx(1.0 / fb.q3db).epsilon(1e-6));
  }
  // a sharper q narrows the band
  auto sharp = design_cochlear_filterbank(16000, 128, 24, 180.0, 8.0);
  const double wide = crossing(fb, 64, level, true) - crossing(fb, 64, level, false);
  const double narrow =
      crossing(sharp, 64, level, true) - crossing(sharp, 64, level, false);
  CHECK(narrow == doctest::Approx(0.5 * wide).epsilon(1e-6));
}

// ---------------------------------------------------------------------------
// Filtering stages
// ---------------------------------------------------------------------------

TEST_CASE("cochlear filtering is linear and respects channel selectivity") {
  auto fb = design_cochlear_filterbank(16000);
  AudioBuffer a = tone(fb.center_freqs(64), 0.1);
  Eigen::MatrixXd y = cochlear_filter(a, fb);
  REQUIRE(y.rows() == a.samples.size());
  REQUIRE(y.cols() == 128);

  AudioBuffer a2 = a;
  a2.samples *= 2.5;
  Eigen::MatrixXd y2 = cochlear_filter(a2, fb);
  CHECK((y2 - 2.5 * y).cwiseAbs().maxCoeff() < 1e-9);

  // RMS across channels peaks at the matched channel (spectral leakage of the
  // short window can nudge it one channel up the shallow skirt)
  Eigen::VectorXd rms = y.colwise().norm();
  Eigen::Index argmax;
  rms.maxCoeff(&argmax);
  CHECK(std::abs(static_cast<int>(argmax) - 64) <= 1);
  // channels half an octave below see the tone on their steep skirt and are
  // essentially silent; half an octave above, the shallow tail still responds
  CHECK(rms(52) < 0.05 * rms(64));
  CHECK(rms(76) < rms(64));
}

TEST_CASE("cochlear filter validates its input") {
  auto fb = design_cochlear_filterbank(16000);
  AudioBuffer a = tone(500.0, 0.05, 8000);
  CHECK_THROWS_AS(cochlear_filter(a, fb), DataError);
  AudioBuffer empty;
  empty.sample_rate = 16000;
  CHECK_THROWS_AS(cochlear_filter(empty, fb), DataError);
}

TEST_CASE("haircell stage is odd, bounded and silent at rest") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(400, 3);
  CHECK(haircell_stage(zero, 16000).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(31);
  Eigen::MatrixXd x(400, 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.gauss();
  Eigen::MatrixXd y = haircell_stage(x, 16000);
  Eigen::MatrixXd y_neg = haircell_stage(-x, 16000);
  CHECK((y + y_neg).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(y.cwiseAbs().maxCoeff() <= 1.0);

  // a DC level carries no sustained drive: the response decays
  Eigen::MatrixXd dc = Eigen::MatrixXd::Constant(4000, 1, 0.7);
  Eigen::MatrixXd yd = haircell_stage(dc, 16000);
  CHECK(yd.bottomRows(100).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("lateral inhibition matches the hand oracle") {
  Eigen::MatrixXd x(2, 4);
  x << 1.0, 3.0, 2.0, -1.0,
      -2.0, 5.0, 5.0, 6.0;
  Eigen::MatrixXd y = lateral_inhibition(x);
  Eigen::MatrixXd want(2, 4);
  want << 1.0, 2.0, 0.0, 0.0,
      0.0, 7.0, 0.0, 1.0;
  CHECK((y - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(y.minCoeff() >= 0.0);
}

TEST_CASE("frame integration converges onto a constant drive") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(16000, 2, 0.25);
  auto sp = frame_integrate(x, 16000);
  REQUIRE(sp.frames.rows() == 100);
  REQUIRE(sp.frames.cols() == 2);
  CHECK(sp.frame_period == 0.010);
  for (Eigen::Index t = 1; t < sp.frames.rows(); ++t)
    CHECK(sp.frames(t, 0) >= sp.frames(t - 1, 0));
  CHECK(sp.frames(99, 0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(sp.frames(99, 1) == doctest::Approx(0.25).epsilon(1e-6));

  CHECK_THROWS_AS(frame_integrate(Eigen::MatrixXd::Zero(10, 2), 16000), DataError);
}

// ---------------------------------------------------------------------------
// Full frontend
// ---------------------------------------------------------------------------

TEST_CASE("a second of audio yields 100 nonnegative frames of 128 channels") {
  auto fb = design_cochlear_filterbank(16000);
  auto sp = audspec(tone(1000.0, 1.0), fb);
  CHECK(sp.frames.rows() == 100);
  CHECK(sp.frames.cols() == 128);
  CHECK(sp.frames.minCoeff() >= 0.0);
  CHECK(sp.frames.maxCoeff() > 0.0);
  CHECK(sp.channel_center_freqs.size() == 128);

  AudioBuffer silence;
  silence.sample_rate = 16000;
  silence.samples = Eigen::VectorXd::Zero(16000);
  auto quiet = audspec(silence, fb);
  CHECK(quiet.frames.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tonotopy: pure tones at cf[k] peak within one channel of k") {
  // moderate level: loud tones saturate the haircell compression, flattening
  // the profile so the channel-difference stage slides down the skirt
  auto fb = design_cochlear_filterbank(16000);
  for (int k : {16, 40, 64, 88, 112}) {
    auto sp = audspec(tone(fb.center_freqs(k), 0.3, 16000, 0.1), fb);
    Eigen::VectorXd profile = sp.frames.bottomRows(sp.frames.rows() - 5)
                                  .colwise()
                                  .mean();  // skip onset transient
    Eigen::Index argmax;
    profile.maxCoeff(&argmax);
    CHECK(std::abs(static_cast<int>(argmax) - k) <= 1);
  }
}

TEST_CASE("louder audio produces a stronger spectrogram") {
  auto fb = design_cochlear_filterbank(16000);
  auto soft = audspec(tone(800.0, 0.3, 16000, 0.05), fb);
  auto loud = audspec(tone(800.0, 0.3, 16000, 0.5), fb);
  CHECK(loud.frames.sum() > 2.0 * soft.frames.sum());
}
