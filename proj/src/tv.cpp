#include "sinv/tv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sinv {

namespace {
const char* kTvHeader = "time_s,LA,LP,TBCL,TBCD,TTCL,TTCD";
}

TvTrajectory load_tv_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open tv csv: " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError("empty tv csv: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTvHeader)
    throw DataError("schema mismatch in " + path + " (expected header '" +
                    kTvHeader + "')");

  std::vector<std::array<double, 7>> rows;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 7> row{};
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c < 7; ++c) {
      if (!std::getline(ss, cell, ','))
        throw DataError("short row at line " + std::to_string(line_no) + " in " + path);
      try {
        row[static_cast<std::size_t>(c)] = std::stod(cell);
      } catch (const std::exception&) {
        throw DataError("bad cell '" + cell + "' at line " + std::to_string(line_no) +
                        " in " + path);
      }
      if (!std::isfinite(row[static_cast<std::size_t>(c)]))
        throw DataError("non-finite cell at line " + std::to_string(line_no) + " in " + path);
    }
    if (std::getline(ss, cell, ','))
      throw DataError("extra column at line " + std::to_string(line_no) + " in " + path);
    rows.push_back(row);
  }
  if (rows.empty()) throw DataError("tv csv has no data rows: " + path);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double expected = static_cast<double>(i) * kTvFramePeriod + rows[0][0];
    if (std::abs(rows[i][0] - expected) > 1e-6)
      throw DataError("frame period mismatch at line " + std::to_string(i + 2) +
                      " in " + path + " (expected 0.010 s grid)");
  }

  TvTrajectory tv;
  tv.values.resize(static_cast<Eigen::Index>(rows.size()), kNumTvChannels);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < kNumTvChannels; ++c)
      tv.values(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c) + 1];
  return tv;
}

void save_tv_csv(const std::string& path, const TvTrajectory& tv) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);  // LF endings
  if (!f) throw DataError("cannot write tv csv: " + path);
  f << kTvHeader << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < tv.values.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.3f", static_cast<double>(i) * tv.frame_period);
    f << buf;
    for (int c = 0; c < kNumTvChannels; ++c) {
      std::snprintf(buf, sizeof(buf), "%.8f", tv.values(i, c));
      f << ',' << buf;
    }
    f << "\n";
  }
}

Eigen::Index align_frames(Eigen::Index spectrogram_frames, TvTrajectory& tv) {
  const Eigen::Index n = std::min(spectrogram_frames, tv.frames());
  if (n <= 0) throw DataError("align_frames: zero overlap between audio and TV frames");
  const Eigen::Index diff = std::abs(spectrogram_frames - tv.frames());
  if (diff > 3)
    log_warn("frame count mismatch of " + std::to_string(diff) +
             " frames (audio " + std::to_string(spectrogram_frames) + ", tv " +
             std::to_string(tv.frames()) + "); truncating");
  tv.values.conservativeResize(n, kNumTvChannels);
  return n;
}

}  // namespace sinv
