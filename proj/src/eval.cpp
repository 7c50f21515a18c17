#include "sinv/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sinv/common.hpp"

namespace sinv {

double ppmc(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size()) throw DataError("length mismatch");
  if (estimate.size() < 2) throw DataError("need at least 2 samples");
  const Eigen::VectorXd a = estimate.array() - estimate.mean();
  const Eigen::VectorXd b = truth.array() - truth.mean();
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw DataError("undefined correlation: constant sequence");
  return a.dot(b) / (na * nb);
}

EvalReport make_eval_report(const std::string& feature_tag, int context,
                            const std::array<double, kNumTvChannels>& per_tv) {
  EvalReport r;
  r.feature_tag = feature_tag;
  r.context = context;
  r.per_tv = per_tv;
  double sum = 0.0;
  for (double v : per_tv) sum += v;
  r.average = sum / kNumTvChannels;
  return r;
}

void save_eval_report_csv(const std::string& path,
                          const std::vector<EvalReport>& rows) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for write: " + path);
  f << "feature,context,LA,LP,TBCL,TBCD,TTCL,TTCD,average\n";
  char buf[64];
  for (const EvalReport& r : rows) {
    f << r.feature_tag << ',' << r.context;
    for (double v : r.per_tv) {
      std::snprintf(buf, sizeof(buf), ",%.6f", v);
      f << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.6f\n", r.average);
    f << buf;
  }
  if (!f) throw DataError("write failed: " + path);
}

std::vector<EvalReport> load_eval_report_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError("empty report: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "feature,context,LA,LP,TBCL,TBCD,TTCL,TTCD,average")
    throw DataError("report schema mismatch: " + path);

  std::vector<EvalReport> rows;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    EvalReport r;
    if (!std::getline(ss, r.feature_tag, ',')) throw DataError("bad report row");
    if (!std::getline(ss, cell, ',')) throw DataError("bad report row");
    r.context = std::stoi(cell);
    for (std::size_t i = 0; i < static_cast<std::size_t>(kNumTvChannels); ++i) {
      if (!std::getline(ss, cell, ',')) throw DataError("bad report row");
      r.per_tv[i] = std::stod(cell);
    }
    if (!std::getline(ss, cell, ',')) throw DataError("bad report row");
    r.average = std::stod(cell);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace sinv
