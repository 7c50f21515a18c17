#include "sinv/hosvd.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sinv/common.hpp"
#include "sinv/ftc.hpp"

namespace sinv {

namespace {

using RowMap = Eigen::Map<const RowMatrixXd>;

void check_flat_size(Eigen::Index cols, int d0, int d1, int d2) {
  if (cols != static_cast<Eigen::Index>(d0) * d1 * d2)
    throw DataError("frame size does not match mode dimensions");
}

}  // namespace

ModeCovariances::ModeCovariances(int d_scale, int d_rate, int d_freq)
    : scale(Eigen::MatrixXd::Zero(d_scale, d_scale)),
      rate(Eigen::MatrixXd::Zero(d_rate, d_rate)),
      freq(Eigen::MatrixXd::Zero(d_freq, d_freq)) {
  if (d_scale <= 0 || d_rate <= 0 || d_freq <= 0)
    throw ConfigError("mode dimensions must be positive");
}

void ModeCovariances::add_frame(const Eigen::Ref<const Eigen::RowVectorXd>& flat) {
  add_sequence(RowMap(flat.data(), 1, flat.size()));
}

void ModeCovariances::add_sequence(const Eigen::Ref<const RowMatrixXd>& frames) {
  const int d0 = dim_scale(), d1 = dim_rate(), d2 = dim_freq();
  check_flat_size(frames.cols(), d0, d1, d2);
  const Eigen::Index t_count = frames.rows();
  if (t_count == 0) return;

  // Frequency mode: the stacked mode-2 fibers of all frames are exactly the
  // rows of the buffer viewed as (T*d0*d1) x d2.
  RowMap fibers(frames.data(), t_count * d0 * d1, d2);
  freq.noalias() += fibers.transpose() * fibers;

  for (Eigen::Index t = 0; t < t_count; ++t) {
    const double* p = frames.data() + t * frames.cols();
    RowMap unfold0(p, d0, static_cast<Eigen::Index>(d1) * d2);
    scale.noalias() += unfold0 * unfold0.transpose();
    for (int i0 = 0; i0 < d0; ++i0) {
      RowMap slab(p + static_cast<Eigen::Index>(i0) * d1 * d2, d1, d2);
      rate.noalias() += slab * slab.transpose();
    }
  }
  frame_count += t_count;
}

void ModeCovariances::merge(const ModeCovariances& other) {
  if (other.dim_scale() != dim_scale() || other.dim_rate() != dim_rate() ||
      other.dim_freq() != dim_freq())
    throw DataError("accumulator dimension mismatch");
  scale += other.scale;
  rate += other.rate;
  freq += other.freq;
  frame_count += other.frame_count;
}

namespace {

void eigendecompose(const Eigen::MatrixXd& cov, Eigen::MatrixXd& u,
                    Eigen::VectorXd& lambda) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      ((cov + cov.transpose()) * 0.5).eval());
  if (es.info() != Eigen::Success)
    throw DataError("eigendecomposition failed");
  const Eigen::Index n = cov.rows();
  u.resize(n, n);
  lambda.resize(n);
  // Eigen returns ascending eigenvalues; flip to descending. Ties keep the
  // flipped (stable) order.
  for (Eigen::Index i = 0; i < n; ++i) {
    lambda[i] = es.eigenvalues()[n - 1 - i];
    u.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  // Sign convention: largest-magnitude component of each column positive.
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) u.col(j) = -u.col(j);
  }
}

}  // namespace

HosvdBasis fit_hosvd(const ModeCovariances& acc) {
  if (acc.frame_count < 1) throw DataError("empty accumulator");
  HosvdBasis b;
  eigendecompose(acc.scale, b.u_scale, b.lambda_scale);
  eigendecompose(acc.rate, b.u_rate, b.lambda_rate);
  eigendecompose(acc.freq, b.u_freq, b.lambda_freq);
  b.frame_count = acc.frame_count;
  return b;
}

ModeSpectrum pc_energy(const HosvdBasis& basis, const std::string& mode) {
  ModeSpectrum s;
  s.mode = mode;
  if (mode == "scale")
    s.eigenvalues = basis.lambda_scale;
  else if (mode == "rate")
    s.eigenvalues = basis.lambda_rate;
  else if (mode == "frequency")
    s.eigenvalues = basis.lambda_freq;
  else
    throw ConfigError("unknown mode: " + mode);
  Eigen::VectorXd clamped = s.eigenvalues.cwiseMax(0.0);
  const double total = clamped.sum();
  if (total <= 0.0) throw DataError("zero spectrum for mode " + mode);
  s.alpha = clamped / total;
  return s;
}

RowMatrixXd mode_multiply(const Eigen::Ref<const RowMatrixXd>& frames,
                          std::array<int, 3> dims, const Eigen::MatrixXd& m,
                          int mode) {
  const int d0 = dims[0], d1 = dims[1], d2 = dims[2];
  check_flat_size(frames.cols(), d0, d1, d2);
  if (mode < 0 || mode > 2) throw ConfigError("mode out of range");
  const int dm = mode == 0 ? d0 : mode == 1 ? d1 : d2;
  if (m.cols() != dm) throw DataError("mode matrix width mismatch");
  const int k = static_cast<int>(m.rows());
  const Eigen::Index t_count = frames.rows();

  std::array<int, 3> out_dims = dims;
  out_dims[static_cast<std::size_t>(mode)] = k;
  RowMatrixXd out(t_count,
                  static_cast<Eigen::Index>(out_dims[0]) * out_dims[1] * out_dims[2]);

  if (mode == 2) {
    RowMap fibers(frames.data(), t_count * d0 * d1, d2);
    Eigen::Map<RowMatrixXd> outf(out.data(), t_count * d0 * d1, k);
    outf.noalias() = fibers * m.transpose();
    return out;
  }

  for (Eigen::Index t = 0; t < t_count; ++t) {
    const double* p = frames.data() + t * frames.cols();
    double* q = out.data() + t * out.cols();
    if (mode == 0) {
      RowMap unfold0(p, d0, static_cast<Eigen::Index>(d1) * d2);
      Eigen::Map<RowMatrixXd> dst(q, k, static_cast<Eigen::Index>(d1) * d2);
      dst.noalias() = m * unfold0;
    } else {
      for (int i0 = 0; i0 < d0; ++i0) {
        RowMap slab(p + static_cast<Eigen::Index>(i0) * d1 * d2, d1, d2);
        Eigen::Map<RowMatrixXd> dst(q + static_cast<Eigen::Index>(i0) * k * d2, k, d2);
        dst.noalias() = m * slab;
      }
    }
  }
  return out;
}

namespace {

void check_truncation(const HosvdBasis& b, const Truncation& t) {
  if (t.k_scale < 1 || t.k_scale > b.dim_scale() || t.k_rate < 1 ||
      t.k_rate > b.dim_rate() || t.k_freq < 1 || t.k_freq > b.dim_freq())
    throw ConfigError("truncation out of range");
}

}  // namespace

RowMatrixXd hosvd_project(const Eigen::Ref<const RowMatrixXd>& frames,
                          const HosvdBasis& basis, const Truncation& trunc) {
  check_truncation(basis, trunc);
  std::array<int, 3> dims = {basis.dim_scale(), basis.dim_rate(), basis.dim_freq()};
  RowMatrixXd x = mode_multiply(
      frames, dims, basis.u_freq.leftCols(trunc.k_freq).transpose(), 2);
  dims[2] = trunc.k_freq;
  x = mode_multiply(x, dims, basis.u_rate.leftCols(trunc.k_rate).transpose(), 1);
  dims[1] = trunc.k_rate;
  x = mode_multiply(x, dims, basis.u_scale.leftCols(trunc.k_scale).transpose(), 0);
  return x;
}

RowMatrixXd hosvd_reconstruct(const Eigen::Ref<const RowMatrixXd>& cores,
                              const HosvdBasis& basis, const Truncation& trunc) {
  check_truncation(basis, trunc);
  std::array<int, 3> dims = {trunc.k_scale, trunc.k_rate, trunc.k_freq};
  RowMatrixXd x = mode_multiply(cores, dims, basis.u_scale.leftCols(trunc.k_scale), 0);
  dims[0] = basis.dim_scale();
  x = mode_multiply(x, dims, basis.u_rate.leftCols(trunc.k_rate), 1);
  dims[1] = basis.dim_rate();
  x = mode_multiply(x, dims, basis.u_freq.leftCols(trunc.k_freq), 2);
  return x;
}

RowMatrixXd vectorize_with_context(const Eigen::Ref<const RowMatrixXd>& frames,
                                   int context) {
  if (context < 1 || context % 2 == 0)
    throw ConfigError("context must be odd and positive");
  if (frames.rows() == 0) throw DataError("empty sequence");
  const Eigen::Index t_count = frames.rows();
  const Eigen::Index d = frames.cols();
  const int half = context / 2;
  RowMatrixXd out(t_count, d * context);
  for (Eigen::Index t = 0; t < t_count; ++t)
    for (int c = 0; c < context; ++c) {
      Eigen::Index src = t + c - half;
      src = std::max<Eigen::Index>(0, std::min(t_count - 1, src));
      out.block(t, static_cast<Eigen::Index>(c) * d, 1, d) = frames.row(src);
    }
  return out;
}

void save_basis(const std::string& path, const HosvdBasis& basis) {
  std::vector<FtcRecord> records;
  records.push_back(FtcRecord::from_matrix("U_scale", basis.u_scale));
  records.push_back(FtcRecord::from_vector("lambda_scale", basis.lambda_scale));
  records.push_back(FtcRecord::from_matrix("U_rate", basis.u_rate));
  records.push_back(FtcRecord::from_vector("lambda_rate", basis.lambda_rate));
  records.push_back(FtcRecord::from_matrix("U_freq", basis.u_freq));
  records.push_back(FtcRecord::from_vector("lambda_freq", basis.lambda_freq));
  records[0].metadata["frame_count"] = std::to_string(basis.frame_count);
  records[0].metadata["provenance"] = basis.provenance;
  write_ftc(path, records);
}

HosvdBasis load_basis(const std::string& path) {
  const std::vector<FtcRecord> records = read_ftc(path);
  HosvdBasis b;
  b.u_scale = find_record(records, "U_scale").as_matrix();
  b.lambda_scale = find_record(records, "lambda_scale").as_matrix().col(0);
  b.u_rate = find_record(records, "U_rate").as_matrix();
  b.lambda_rate = find_record(records, "lambda_rate").as_matrix().col(0);
  b.u_freq = find_record(records, "U_freq").as_matrix();
  b.lambda_freq = find_record(records, "lambda_freq").as_matrix().col(0);
  const auto& md = records.front().metadata;
  if (auto it = md.find("frame_count"); it != md.end())
    b.frame_count = std::stol(it->second);
  if (auto it = md.find("provenance"); it != md.end()) b.provenance = it->second;
  return b;
}

void save_energy_csv(const std::string& path, const HosvdBasis& basis) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for write: " + path);
  f << "mode,index,eigenvalue,alpha\n";
  char buf[128];
  for (const char* mode : {"scale", "rate", "frequency"}) {
    const ModeSpectrum s = pc_energy(basis, mode);
    for (Eigen::Index i = 0; i < s.alpha.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s,%lld,%.12g,%.12g\n", mode,
                    static_cast<long long>(i), s.eigenvalues[i], s.alpha[i]);
      f << buf;
    }
  }
  if (!f) throw DataError("write failed: " + path);
}

}  // namespace sinv
