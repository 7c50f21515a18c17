#include "sinv/kalman.hpp"

#include <cmath>
#include <vector>

#include "sinv/common.hpp"

namespace sinv {

Eigen::VectorXd kalman_smooth_channel(const Eigen::VectorXd& z,
                                      const KalmanParams& params) {
  if (z.size() == 0) throw DataError("empty trajectory");
  if (!z.allFinite()) throw DataError("non-finite trajectory");
  if (params.q <= 0.0 || params.r <= 0.0 || params.dt <= 0.0)
    throw ConfigError("kalman parameters must be positive");

  using Mat2 = Eigen::Matrix2d;
  using Vec2 = Eigen::Vector2d;
  const double dt = params.dt;
  Mat2 f;
  f << 1.0, dt, 0.0, 1.0;
  Mat2 q;
  q << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
  q *= params.q;
  const Eigen::RowVector2d h(1.0, 0.0);
  const double r = params.r;

  const Eigen::Index n = z.size();
  std::vector<Vec2> x_pred(n), x_filt(n);
  std::vector<Mat2> p_pred(n), p_filt(n);

  Vec2 x(z[0], 0.0);
  Mat2 p = Mat2::Identity() * 1e4;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (t > 0) {
      x = f * x;
      p = f * p * f.transpose() + q;
    }
    x_pred[t] = x;
    p_pred[t] = p;
    const double innov = z[t] - h * x;
    const double s = (h * p * h.transpose())(0) + r;
    const Vec2 k = p * h.transpose() / s;
    x = x + k * innov;
    p = (Mat2::Identity() - k * h) * p;
    x_filt[t] = x;
    p_filt[t] = p;
  }

  Eigen::VectorXd out(n);
  if (!params.rts) {
    for (Eigen::Index t = 0; t < n; ++t) out[t] = x_filt[t][0];
    return out;
  }

  Vec2 xs = x_filt[n - 1];
  Mat2 ps = p_filt[n - 1];
  out[n - 1] = xs[0];
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    const Mat2 g = p_filt[t] * f.transpose() * p_pred[t + 1].inverse();
    xs = x_filt[t] + g * (xs - x_pred[t + 1]);
    ps = p_filt[t] + g * (ps - p_pred[t + 1]) * g.transpose();
    out[t] = xs[0];
  }
  return out;
}

TvTrajectory kalman_smooth(const TvTrajectory& traj, const KalmanParams& params) {
  if (traj.values.rows() == 0) throw DataError("empty trajectory");
  TvTrajectory out = traj;
  for (Eigen::Index c = 0; c < traj.values.cols(); ++c)
    out.values.col(c) = kalman_smooth_channel(traj.values.col(c), params);
  return out;
}

}  // namespace sinv
