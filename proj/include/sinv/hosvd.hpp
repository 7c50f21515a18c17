#ifndef SINV_HOSVD_HPP
#define SINV_HOSVD_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sinv/cortical.hpp"

namespace sinv {

/// Streaming per-mode covariance accumulator: for each frame tensor T and
/// mode m it adds unfold_m(T) * unfold_m(T)^T. Eigenvectors of the finished
/// covariances equal the left-singular vectors of the explicitly
/// concatenated unfoldings, without ever materializing them.
struct ModeCovariances {
  Eigen::MatrixXd scale, rate, freq;
  long frame_count = 0;

  ModeCovariances(int d_scale, int d_rate, int d_freq);

  int dim_scale() const { return static_cast<int>(scale.rows()); }
  int dim_rate() const { return static_cast<int>(rate.rows()); }
  int dim_freq() const { return static_cast<int>(freq.rows()); }

  /// Accumulate one flattened (scale, rate, frequency) frame.
  void add_frame(const Eigen::Ref<const Eigen::RowVectorXd>& flat);
  /// Accumulate a whole sequence (rows = frames). Uses one GEMM for the
  /// frequency mode, which dominates.
  void add_sequence(const Eigen::Ref<const RowMatrixXd>& frames);
  void merge(const ModeCovariances& other);
};

struct HosvdBasis {
  Eigen::MatrixXd u_scale, u_rate, u_freq;  // columns: descending eigenvalue
  Eigen::VectorXd lambda_scale, lambda_rate, lambda_freq;
  long frame_count = 0;
  std::string provenance;  // config hash of the features it was fit on

  int dim_scale() const { return static_cast<int>(u_scale.rows()); }
  int dim_rate() const { return static_cast<int>(u_rate.rows()); }
  int dim_freq() const { return static_cast<int>(u_freq.rows()); }
};

HosvdBasis fit_hosvd(const ModeCovariances& acc);

struct ModeSpectrum {
  std::string mode;  // "scale" | "rate" | "frequency"
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd alpha;  // energy fractions, descending, sum 1
};

ModeSpectrum pc_energy(const HosvdBasis& basis, const std::string& mode);

struct Truncation {
  int k_scale = 4;
  int k_rate = 5;
  int k_freq = 7;

  int core_dim() const { return k_scale * k_rate * k_freq; }
};

/// Multiply mode `mode` fibers of the flattened (d0, d1, d2) tensors by M
/// (fiber f, length dm = M.cols(), becomes M*f). Rows of `frames` are
/// independent tensors.
RowMatrixXd mode_multiply(const Eigen::Ref<const RowMatrixXd>& frames,
                          std::array<int, 3> dims, const Eigen::MatrixXd& m,
                          int mode);

/// Core tensors: T x1 Us' x2 Ur' x3 Uf' with the leading k columns per mode;
/// output row layout is (scale, rate, frequency) like the input.
RowMatrixXd hosvd_project(const Eigen::Ref<const RowMatrixXd>& frames,
                          const HosvdBasis& basis, const Truncation& trunc);

/// Inverse map back to full (d0, d1, d2) tensors.
RowMatrixXd hosvd_reconstruct(const Eigen::Ref<const RowMatrixXd>& cores,
                              const HosvdBasis& basis, const Truncation& trunc);

/// Per frame t, concatenate the rows t-c/2 .. t+c/2 (edges replicated) in
/// time order. Output is T x (cols * context).
RowMatrixXd vectorize_with_context(const Eigen::Ref<const RowMatrixXd>& frames,
                                   int context);

void save_basis(const std::string& path, const HosvdBasis& basis);
HosvdBasis load_basis(const std::string& path);

void save_energy_csv(const std::string& path, const HosvdBasis& basis);

}  // namespace sinv

#endif  // SINV_HOSVD_HPP
