#ifndef SINV_EVAL_HPP
#define SINV_EVAL_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sinv/tv.hpp"

namespace sinv {

/// Pearson product-moment correlation. Throws DataError on length mismatch,
/// length < 2, or a constant argument (undefined correlation).
double ppmc(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

struct EvalReport {
  std::string feature_tag;  // e.g. cortical_980, cortical_1344, mfcc
  int context = 0;
  std::array<double, kNumTvChannels> per_tv{};
  double average = 0.0;
};

EvalReport make_eval_report(const std::string& feature_tag, int context,
                            const std::array<double, kNumTvChannels>& per_tv);

/// CSV rows `feature,context,LA,LP,TBCL,TBCD,TTCL,TTCD,average`.
void save_eval_report_csv(const std::string& path,
                          const std::vector<EvalReport>& rows);
std::vector<EvalReport> load_eval_report_csv(const std::string& path);

}  // namespace sinv

#endif  // SINV_EVAL_HPP
