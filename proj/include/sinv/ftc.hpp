#ifndef SINV_FTC_HPP
#define SINV_FTC_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sinv {

/// One record of the FTC tensor container. A file is a concatenation of
/// records; each record is self-describing:
///
///   magic "FTC1" | version u16 | elem type u16 (f32=1, f64=2) | rank u16 |
///   dims u64[rank] | metadata length u32 | metadata bytes | row-major data
///
/// All integers little-endian. Metadata is UTF-8 "key=value\n" lines with
/// keys sorted; the record name lives under the "name" key.
struct FtcRecord {
  static constexpr std::uint16_t kElemF32 = 1;
  static constexpr std::uint16_t kElemF64 = 2;

  std::uint16_t elem_type = kElemF64;
  std::vector<std::uint64_t> dims;
  std::map<std::string, std::string> metadata;
  std::vector<float> data_f32;
  std::vector<double> data_f64;

  std::uint64_t element_count() const;
  std::string name() const;

  /// Row-major view of the trailing two dims (leading dims collapsed into
  /// rows); rank-1 records become a single column. Always returns doubles.
  Eigen::MatrixXd as_matrix() const;

  static FtcRecord from_matrix(const std::string& name,
                               const Eigen::MatrixXd& m);
  static FtcRecord from_vector(const std::string& name,
                               const Eigen::VectorXd& v);
};

void write_ftc(const std::string& path, const std::vector<FtcRecord>& records);
std::vector<FtcRecord> read_ftc(const std::string& path);

/// Convenience for single-record lookups; throws DataError when missing.
const FtcRecord& find_record(const std::vector<FtcRecord>& records,
                             const std::string& name);

}  // namespace sinv

#endif  // SINV_FTC_HPP
