#ifndef SINV_KALMAN_HPP
#define SINV_KALMAN_HPP

#include <Eigen/Dense>

#include "sinv/tv.hpp"

namespace sinv {

/// Per-channel constant-velocity state model (position, velocity) at the TV
/// frame step, scalar observation of position.
/// Constant-velocity model. The q/r ratio sets the smoother's natural
/// frequency (q/r)^(1/4) rad/s; the default sits near 5 Hz so the passband
/// covers articulator movement while frame-rate estimation noise is cut.
struct KalmanParams {
  double q = 1.0e4;  // process noise spectral density
  double r = 0.01;   // measurement noise variance
  double dt = 0.010;
  bool rts = true;   // backward RTS pass; false = forward filter only
};

/// Smooth one observation sequence. Initial state is the first observation
/// with a large prior covariance.
Eigen::VectorXd kalman_smooth_channel(const Eigen::VectorXd& z,
                                      const KalmanParams& params);

/// Channel-independent smoothing of a whole trajectory.
TvTrajectory kalman_smooth(const TvTrajectory& traj, const KalmanParams& params);

}  // namespace sinv

#endif  // SINV_KALMAN_HPP
