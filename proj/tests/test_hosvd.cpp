#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sinv/common.hpp"
#include "sinv/hosvd.hpp"
#include "test_util.hpp"

using namespace sinv;
using testutil::TempDir;

namespace {

// Explicit mode-m unfolding of one flattened (d0, d1, d2) tensor, row-major
// (scale, rate, frequency) layout: flat = (i0*d1 + i1)*d2 + i2.
Eigen::MatrixXd unfold(const Eigen::RowVectorXd& flat, std::array<int, 3> d, int mode) {
  const int sizes[3] = {d[0], d[1], d[2]};
  Eigen::MatrixXd m(sizes[mode], flat.size() / sizes[mode]);
  for (int i0 = 0; i0 < d[0]; ++i0)
    for (int i1 = 0; i1 < d[1]; ++i1)
      for (int i2 = 0; i2 < d[2]; ++i2) {
        const double v = flat((i0 * d[1] + i1) * d[2] + i2);
        if (mode == 0) m(i0, i1 * d[2] + i2) = v;
        if (mode == 1) m(i1, i0 * d[2] + i2) = v;
        if (mode == 2) m(i2, i0 * d[1] + i1) = v;
      }
  return m;
}

RowMatrixXd random_frames(int t, std::array<int, 3> d, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrixXd frames(t, d[0] * d[1] * d[2]);
  for (Eigen::Index i = 0; i < frames.rows(); ++i)
    for (Eigen::Index j = 0; j < frames.cols(); ++j) frames(i, j) = rng.gauss();
  return frames;
}

// Largest principal angle between the column spaces of two orthonormal sets,
// sine formulation (well conditioned near zero angle).
double subspace_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd resid = b - a * (a.transpose() * b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  const double s = std::min(1.0, svd.singularValues().maxCoeff());
  return std::asin(s);
}

}  // namespace

TEST_CASE("all-ones frame gives the hand-computed mode covariances") {
  ModeCovariances acc(4, 10, 128);
  acc.add_frame(Eigen::RowVectorXd::Ones(5120));
  CHECK(acc.frame_count == 1);
  CHECK((acc.scale - 1280.0 * Eigen::MatrixXd::Ones(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((acc.rate - 512.0 * Eigen::MatrixXd::Ones(10, 10)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((acc.freq - 40.0 * Eigen::MatrixXd::Ones(128, 128)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("zero accumulation and additivity") {
  ModeCovariances acc(3, 4, 5);
  CHECK(acc.frame_count == 0);
  CHECK(acc.scale.isZero(0.0));
  CHECK(acc.rate.isZero(0.0));
  CHECK(acc.freq.isZero(0.0));

  RowMatrixXd frames = random_frames(1, {3, 4, 5}, 11);
  ModeCovariances once(3, 4, 5), twice(3, 4, 5);
  once.add_sequence(frames);
  twice.add_sequence(frames);
  twice.add_sequence(frames);
  CHECK((twice.scale - 2.0 * once.scale).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.rate - 2.0 * once.rate).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.freq - 2.0 * once.freq).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(twice.frame_count == 2);
}

TEST_CASE("add_frame and add_sequence agree and merge composes") {
  RowMatrixXd frames = random_frames(7, {3, 4, 5}, 22);

  ModeCovariances a(3, 4, 5), b(3, 4, 5);
  a.add_sequence(frames);
  for (Eigen::Index t = 0; t < frames.rows(); ++t) b.add_frame(frames.row(t));
  CHECK((a.scale - b.scale).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((a.rate - b.rate).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((a.freq - b.freq).cwiseAbs().maxCoeff() < 1e-9);

  ModeCovariances c(3, 4, 5), d1(3, 4, 5), d2(3, 4, 5);
  c.add_sequence(frames);
  d1.add_sequence(frames.topRows(3));
  d2.add_sequence(frames.bottomRows(4));
  d1.merge(d2);
  CHECK((c.freq - d1.freq).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(d1.frame_count == 7);
}

TEST_CASE("traces equal the total squared Frobenius mass") {
  const std::array<int, 3> d{4, 10, 128};
  RowMatrixXd frames = random_frames(13, d, 33);
  ModeCovariances acc(4, 10, 128);
  acc.add_sequence(frames);
  const double mass = frames.array().square().sum();
  CHECK(std::abs(acc.scale.trace() - mass) / mass < 1e-6);
  CHECK(std::abs(acc.rate.trace() - mass) / mass < 1e-6);
  CHECK(std::abs(acc.freq.trace() - mass) / mass < 1e-6);
}

TEST_CASE("symmetry and numerical PSD of accumulated covariances") {
  RowMatrixXd frames = random_frames(9, {3, 4, 5}, 44);
  ModeCovariances acc(3, 4, 5);
  acc.add_sequence(frames);
  CHECK((acc.freq - acc.freq.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(acc.freq);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("shape mismatch raises") {
  ModeCovariances acc(3, 4, 5);
  CHECK_THROWS_AS(acc.add_frame(Eigen::RowVectorXd::Ones(59)), DataError);
  ModeCovariances other(2, 4, 5);
  CHECK_THROWS_AS(acc.merge(other), DataError);
}

TEST_CASE("rank-1 tensor recovers its factors") {
  const std::array<int, 3> d{3, 4, 5};
  Rng rng(55);
  Eigen::VectorXd u(3), v(4), w(5);
  for (int i = 0; i < 3; ++i) u(i) = rng.gauss();
  for (int i = 0; i < 4; ++i) v(i) = rng.gauss();
  for (int i = 0; i < 5; ++i) w(i) = rng.gauss();

  RowMatrixXd frame(1, 60);
  for (int i0 = 0; i0 < 3; ++i0)
    for (int i1 = 0; i1 < 4; ++i1)
      for (int i2 = 0; i2 < 5; ++i2)
        frame(0, (i0 * 4 + i1) * 5 + i2) = u(i0) * v(i1) * w(i2);

  ModeCovariances acc(3, 4, 5);
  acc.add_sequence(frame);
  HosvdBasis basis = fit_hosvd(acc);

  auto check_mode = [](const Eigen::MatrixXd& bu, const Eigen::VectorXd& lam,
                       const Eigen::VectorXd& factor) {
    Eigen::VectorXd lead = bu.col(0);
    Eigen::VectorXd unit = factor / factor.norm();
    const double align = std::abs(lead.dot(unit));
    CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
    for (Eigen::Index i = 1; i < lam.size(); ++i)
      CHECK(std::abs(lam(i)) < 1e-9 * lam(0));
  };
  check_mode(basis.u_scale, basis.lambda_scale, u);
  check_mode(basis.u_rate, basis.lambda_rate, v);
  check_mode(basis.u_freq, basis.lambda_freq, w);
}

TEST_CASE("streaming eigenvectors match the explicit unfolding SVD") {
  const std::array<int, 3> d{3, 4, 5};
  for (std::uint64_t seed : {101, 102, 103}) {
    RowMatrixXd frames = random_frames(6, d, seed);
    ModeCovariances acc(3, 4, 5);
    acc.add_sequence(frames);
    HosvdBasis basis = fit_hosvd(acc);

    for (int mode = 0; mode < 3; ++mode) {
      // Concatenate per-frame unfoldings column-wise, then take the SVD.
      const int rows = d[static_cast<std::size_t>(mode)];
      const Eigen::Index cols_per = 60 / rows;
      Eigen::MatrixXd big(rows, cols_per * frames.rows());
      for (Eigen::Index t = 0; t < frames.rows(); ++t)
        big.middleCols(t * cols_per, cols_per) = unfold(frames.row(t), d, mode);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(big, Eigen::ComputeThinU);

      const Eigen::MatrixXd& bu = mode == 0   ? basis.u_scale
                                  : mode == 1 ? basis.u_rate
                                              : basis.u_freq;
      const Eigen::VectorXd& lam = mode == 0   ? basis.lambda_scale
                                   : mode == 1 ? basis.lambda_rate
                                               : basis.lambda_freq;
      CHECK(subspace_angle(svd.matrixU(), bu) < 1e-8);
      for (int i = 0; i < rows; ++i) {
        const double sv2 = svd.singularValues()(i) * svd.singularValues()(i);
        CHECK(lam(i) == doctest::Approx(sv2).epsilon(1e-8));
        // columns agree up to sign with each singular vector
        const double align = std::abs(bu.col(i).dot(svd.matrixU().col(i)));
        CHECK(align == doctest::Approx(1.0).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("eigenvector sign convention: largest-magnitude component positive") {
  RowMatrixXd frames = random_frames(5, {3, 4, 5}, 66);
  ModeCovariances acc(3, 4, 5);
  acc.add_sequence(frames);
  HosvdBasis basis = fit_hosvd(acc);
  for (const Eigen::MatrixXd* u : {&basis.u_scale, &basis.u_rate, &basis.u_freq})
    for (Eigen::Index c = 0; c < u->cols(); ++c) {
      Eigen::Index imax;
      u->col(c).cwiseAbs().maxCoeff(&imax);
      CHECK((*u)(imax, c) > 0.0);
    }
}

TEST_CASE("orthonormality and descending eigenvalues") {
  RowMatrixXd frames = random_frames(8, {4, 10, 16}, 77);
  ModeCovariances acc(4, 10, 16);
  acc.add_sequence(frames);
  HosvdBasis basis = fit_hosvd(acc);
  CHECK((basis.u_freq.transpose() * basis.u_freq - Eigen::MatrixXd::Identity(16, 16))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  for (Eigen::Index i = 1; i < basis.lambda_freq.size(); ++i)
    CHECK(basis.lambda_freq(i) <= basis.lambda_freq(i - 1) + 1e-12);
  CHECK_THROWS_AS(fit_hosvd(ModeCovariances(3, 4, 5)), DataError);
}

TEST_CASE("mode_multiply matches brute-force fiber products") {
  const std::array<int, 3> d{3, 4, 5};
  RowMatrixXd frames = random_frames(2, d, 88);
  Rng rng(89);
  for (int mode = 0; mode < 3; ++mode) {
    const int dm = d[static_cast<std::size_t>(mode)];
    Eigen::MatrixXd m(2, dm);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i / dm, i % dm) = rng.gauss();

    RowMatrixXd got = mode_multiply(frames, d, m, mode);
    std::array<int, 3> dout = d;
    dout[static_cast<std::size_t>(mode)] = 2;
    REQUIRE(got.cols() == dout[0] * dout[1] * dout[2]);

    for (Eigen::Index t = 0; t < 2; ++t)
      for (int i0 = 0; i0 < dout[0]; ++i0)
        for (int i1 = 0; i1 < dout[1]; ++i1)
          for (int i2 = 0; i2 < dout[2]; ++i2) {
            double want = 0.0;
            for (int k = 0; k < dm; ++k) {
              int s0 = i0, s1 = i1, s2 = i2;
              if (mode == 0) s0 = k;
              if (mode == 1) s1 = k;
              if (mode == 2) s2 = k;
              const int row = mode == 0 ? i0 : mode == 1 ? i1 : i2;
              want += m(row, k) * frames(t, (s0 * d[1] + s1) * d[2] + s2);
            }
            const double got_v = got(t, (i0 * dout[1] + i1) * dout[2] + i2);
            CHECK(got_v == doctest::Approx(want).epsilon(1e-12));
          }
  }
}

TEST_CASE("full-rank project then reconstruct is the identity") {
  const std::array<int, 3> d{3, 4, 5};
  RowMatrixXd frames = random_frames(10, d, 99);
  ModeCovariances acc(3, 4, 5);
  acc.add_sequence(frames);
  HosvdBasis basis = fit_hosvd(acc);

  Truncation full{3, 4, 5};
  RowMatrixXd cores = hosvd_project(frames, basis, full);
  RowMatrixXd back = hosvd_reconstruct(cores, basis, full);
  CHECK((back - frames).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("truncated reconstruction error obeys the discarded-energy bound") {
  const std::array<int, 3> d{4, 6, 8};
  RowMatrixXd frames = random_frames(30, d, 111);
  ModeCovariances acc(4, 6, 8);
  acc.add_sequence(frames);
  HosvdBasis basis = fit_hosvd(acc);

  Truncation trunc{2, 3, 4};
  RowMatrixXd back = hosvd_reconstruct(hosvd_project(frames, basis, trunc), basis, trunc);
  const double err2 = (back - frames).array().square().sum();

  double discarded = 0.0;
  for (Eigen::Index i = trunc.k_scale; i < 4; ++i) discarded += basis.lambda_scale(i);
  for (Eigen::Index i = trunc.k_rate; i < 6; ++i) discarded += basis.lambda_rate(i);
  for (Eigen::Index i = trunc.k_freq; i < 8; ++i) discarded += basis.lambda_freq(i);
  CHECK(err2 <= discarded * (1.0 + 1e-9));

  // keeping more components can only help
  Truncation wider{3, 4, 6};
  RowMatrixXd back2 = hosvd_reconstruct(hosvd_project(frames, basis, wider), basis, wider);
  CHECK((back2 - frames).array().square().sum() <= err2 + 1e-12);
}

TEST_CASE("pc_energy fractions are a distribution per mode") {
  RowMatrixXd frames = random_frames(12, {4, 10, 16}, 123);
  ModeCovariances acc(4, 10, 16);
  acc.add_sequence(frames);
  HosvdBasis basis = fit_hosvd(acc);

  for (const char* mode : {"scale", "rate", "frequency"}) {
    ModeSpectrum sp = pc_energy(basis, mode);
    CHECK(sp.mode == mode);
    CHECK(sp.alpha.minCoeff() >= 0.0);
    CHECK(std::abs(sp.alpha.sum() - 1.0) <= 1e-12);
    for (Eigen::Index i = 1; i < sp.alpha.size(); ++i)
      CHECK(sp.alpha(i) <= sp.alpha(i - 1) + 1e-15);
  }
  CHECK_THROWS_AS(pc_energy(basis, "bogus"), ConfigError);
}

TEST_CASE("isotropic covariance gives equal energy fractions") {
  ModeCovariances acc(4, 10, 16);
  // Orthogonal rotations of a fixed frame produce an isotropic scale mode
  // only by construction; instead feed the identity directly through frames
  // of unit fibers: 4 frames, each with a single scale index active.
  for (int k = 0; k < 4; ++k) {
    Eigen::RowVectorXd flat = Eigen::RowVectorXd::Zero(4 * 10 * 16);
    for (int j = 0; j < 10 * 16; ++j) flat(k * 160 + j) = 1.0;
    acc.add_frame(flat);
  }
  HosvdBasis basis = fit_hosvd(acc);
  ModeSpectrum sp = pc_energy(basis, "scale");
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(sp.alpha(i) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("truncation core dims and context vectorization sizes") {
  CHECK(Truncation{4, 5, 7}.core_dim() == 140);
  CHECK(Truncation{4, 6, 8}.core_dim() == 192);

  RowMatrixXd reduced = random_frames(9, {4, 5, 7}, 321);
  RowMatrixXd ctx = vectorize_with_context(reduced, 7);
  CHECK(ctx.rows() == 9);
  CHECK(ctx.cols() == 980);

  RowMatrixXd reduced2 = random_frames(9, {4, 6, 8}, 322);
  CHECK(vectorize_with_context(reduced2, 7).cols() == 1344);
}

TEST_CASE("context windows replicate edges and keep time order") {
  RowMatrixXd frames(4, 2);
  frames << 0, 10, 1, 11, 2, 12, 3, 13;
  RowMatrixXd ctx = vectorize_with_context(frames, 3);
  REQUIRE(ctx.cols() == 6);
  // t=0: rows (-1 -> 0), 0, 1
  CHECK(ctx(0, 0) == 0);
  CHECK(ctx(0, 2) == 0);
  CHECK(ctx(0, 4) == 1);
  // t=2: rows 1, 2, 3
  CHECK(ctx(2, 0) == 1);
  CHECK(ctx(2, 2) == 2);
  CHECK(ctx(2, 4) == 3);
  // t=3: rows 2, 3, (4 -> 3)
  CHECK(ctx(3, 4) == 3);
  CHECK(ctx(3, 5) == 13);

  CHECK((vectorize_with_context(frames, 1) - frames).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(vectorize_with_context(frames, 4), ConfigError);
  CHECK_THROWS_AS(vectorize_with_context(frames, -1), ConfigError);
  CHECK_THROWS_AS(vectorize_with_context(RowMatrixXd(0, 2), 3), DataError);
}

TEST_CASE("basis save and load round trip") {
  TempDir dir("hosvd");
  RowMatrixXd frames = random_frames(6, {4, 10, 16}, 444);
  ModeCovariances acc(4, 10, 16);
  acc.add_sequence(frames);
  HosvdBasis basis = fit_hosvd(acc);
  basis.provenance = "cafebabe01234567";

  const std::string path = dir.file("basis.ftc");
  save_basis(path, basis);
  HosvdBasis back = load_basis(path);

  CHECK((back.u_scale - basis.u_scale).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.u_rate - basis.u_rate).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.u_freq - basis.u_freq).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.lambda_scale - basis.lambda_scale).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.lambda_rate - basis.lambda_rate).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.lambda_freq - basis.lambda_freq).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.frame_count == basis.frame_count);
  CHECK(back.provenance == basis.provenance);
}

TEST_CASE("energy csv has one row per component: 142 for the default bank") {
  TempDir dir("hosvd");
  RowMatrixXd frames = random_frames(3, {4, 10, 128}, 555);
  ModeCovariances acc(4, 10, 128);
  acc.add_sequence(frames);
  HosvdBasis basis = fit_hosvd(acc);

  const std::string path = dir.file("energy.csv");
  save_energy_csv(path, basis);

  std::ifstream f(path);
  std::string line;
  REQUIRE(static_cast<bool>(std::getline(f, line)));
  CHECK(line == "mode,index,eigenvalue,alpha");
  int rows = 0;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 142);
}
