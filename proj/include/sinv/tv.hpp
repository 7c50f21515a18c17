#ifndef SINV_TV_HPP
#define SINV_TV_HPP

#include <Eigen/Dense>
#include <array>
#include <string>

#include "sinv/common.hpp"

namespace sinv {

inline constexpr int kNumTvChannels = 6;
inline constexpr double kTvFramePeriod = 0.010;  // 100 Hz grid

/// Fixed channel order: lip aperture/protrusion, tongue-body and tongue-tip
/// constriction location/degree.
inline constexpr std::array<const char*, kNumTvChannels> kTvChannelNames = {
    "LA", "LP", "TBCL", "TBCD", "TTCL", "TTCD"};

/// 6-channel tract-variable time series on the 10 ms grid.
struct TvTrajectory {
  Eigen::MatrixXd values;  // frames x 6
  double frame_period = kTvFramePeriod;

  Eigen::Index frames() const { return values.rows(); }
};

/// Reads the canonical TV CSV (`time_s,LA,LP,TBCL,TBCD,TTCL,TTCD`, 10 ms
/// grid). Rejects schema mismatches, non-uniform time steps and NaN cells.
TvTrajectory load_tv_csv(const std::string& path);

void save_tv_csv(const std::string& path, const TvTrajectory& tv);

/// Truncates the trajectory to min(spectrogram_frames, tv frames) and returns
/// that count. A mismatch of more than 3 frames is logged as a warning.
Eigen::Index align_frames(Eigen::Index spectrogram_frames, TvTrajectory& tv);

}  // namespace sinv

#endif  // SINV_TV_HPP
