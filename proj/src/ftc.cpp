#include "sinv/ftc.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "sinv/common.hpp"

namespace sinv {

namespace {

constexpr char kMagic[4] = {'F', 'T', 'C', '1'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return static_cast<T>(v);
}

std::string serialize_metadata(const std::map<std::string, std::string>& md) {
  std::string out;
  for (const auto& [k, v] : md) {
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos ||
        v.find('\n') != std::string::npos)
      throw DataError("ftc metadata key/value contains '=' or newline: " + k);
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::map<std::string, std::string> parse_metadata(const std::string& blob) {
  std::map<std::string, std::string> md;
  std::size_t pos = 0;
  while (pos < blob.size()) {
    std::size_t eol = blob.find('\n', pos);
    if (eol == std::string::npos) throw DataError("ftc metadata missing newline");
    std::string line = blob.substr(pos, eol - pos);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw DataError("ftc metadata line missing '='");
    md[line.substr(0, eq)] = line.substr(eq + 1);
    pos = eol + 1;
  }
  return md;
}

}  // namespace

std::uint64_t FtcRecord::element_count() const {
  std::uint64_t n = 1;
  for (std::uint64_t d : dims) {
    if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d)
      throw DataError("ftc dims overflow");
    n *= d;
  }
  return n;
}

std::string FtcRecord::name() const {
  auto it = metadata.find("name");
  return it == metadata.end() ? std::string() : it->second;
}

Eigen::MatrixXd FtcRecord::as_matrix() const {
  const std::uint64_t n = element_count();
  Eigen::Index rows = 1, cols = 1;
  if (dims.size() == 1) {
    rows = static_cast<Eigen::Index>(dims[0]);
  } else if (!dims.empty()) {
    cols = static_cast<Eigen::Index>(dims.back());
    rows = static_cast<Eigen::Index>(n / dims.back());
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::uint64_t idx = static_cast<std::uint64_t>(i) * cols + j;
      m(i, j) = elem_type == kElemF32 ? static_cast<double>(data_f32[idx])
                                      : data_f64[idx];
    }
  return m;
}

FtcRecord FtcRecord::from_matrix(const std::string& name,
                                 const Eigen::MatrixXd& m) {
  FtcRecord r;
  r.elem_type = kElemF64;
  r.dims = {static_cast<std::uint64_t>(m.rows()),
            static_cast<std::uint64_t>(m.cols())};
  r.metadata["name"] = name;
  r.data_f64.resize(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      r.data_f64[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
  return r;
}

FtcRecord FtcRecord::from_vector(const std::string& name,
                                 const Eigen::VectorXd& v) {
  FtcRecord r;
  r.elem_type = kElemF64;
  r.dims = {static_cast<std::uint64_t>(v.size())};
  r.metadata["name"] = name;
  r.data_f64.assign(v.data(), v.data() + v.size());
  return r;
}

void write_ftc(const std::string& path, const std::vector<FtcRecord>& records) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for write: " + path);
  for (const FtcRecord& r : records) {
    const std::uint64_t n = r.element_count();
    const std::size_t have =
        r.elem_type == FtcRecord::kElemF32 ? r.data_f32.size() : r.data_f64.size();
    if (have != n) throw DataError("ftc record data/dims mismatch");

    std::string head;
    head.append(kMagic, 4);
    put_le<std::uint16_t>(head, kVersion);
    put_le<std::uint16_t>(head, r.elem_type);
    put_le<std::uint16_t>(head, static_cast<std::uint16_t>(r.dims.size()));
    for (std::uint64_t d : r.dims) put_le<std::uint64_t>(head, d);
    const std::string md = serialize_metadata(r.metadata);
    put_le<std::uint32_t>(head, static_cast<std::uint32_t>(md.size()));
    head += md;
    f.write(head.data(), static_cast<std::streamsize>(head.size()));
    if (r.elem_type == FtcRecord::kElemF32)
      f.write(reinterpret_cast<const char*>(r.data_f32.data()),
              static_cast<std::streamsize>(n * sizeof(float)));
    else
      f.write(reinterpret_cast<const char*>(r.data_f64.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
  }
  if (!f) throw DataError("write failed: " + path);
}

std::vector<FtcRecord> read_ftc(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());

  std::vector<FtcRecord> records;
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > bytes.size()) throw DataError("truncated ftc file: " + path);
  };
  while (pos < bytes.size()) {
    need(4);
    if (std::memcmp(bytes.data() + pos, kMagic, 4) != 0)
      throw DataError("bad ftc magic: " + path);
    pos += 4;
    need(6);
    const auto version = get_le<std::uint16_t>(bytes.data() + pos);
    const auto elem = get_le<std::uint16_t>(bytes.data() + pos + 2);
    const auto rank = get_le<std::uint16_t>(bytes.data() + pos + 4);
    pos += 6;
    if (version != kVersion) throw DataError("unsupported ftc version");
    if (elem != FtcRecord::kElemF32 && elem != FtcRecord::kElemF64)
      throw DataError("unsupported ftc element type");
    if (rank > 16) throw DataError("ftc rank out of range");

    FtcRecord r;
    r.elem_type = elem;
    r.dims.resize(rank);
    need(static_cast<std::size_t>(rank) * 8);
    for (int i = 0; i < rank; ++i) {
      r.dims[static_cast<std::size_t>(i)] = get_le<std::uint64_t>(bytes.data() + pos);
      pos += 8;
    }
    need(4);
    const auto md_len = get_le<std::uint32_t>(bytes.data() + pos);
    pos += 4;
    need(md_len);
    r.metadata = parse_metadata(bytes.substr(pos, md_len));
    pos += md_len;

    const std::uint64_t n = r.element_count();
    const std::size_t elem_size = elem == FtcRecord::kElemF32 ? 4 : 8;
    need(static_cast<std::size_t>(n) * elem_size);
    if (elem == FtcRecord::kElemF32) {
      r.data_f32.resize(static_cast<std::size_t>(n));
      std::memcpy(r.data_f32.data(), bytes.data() + pos, n * 4);
    } else {
      r.data_f64.resize(static_cast<std::size_t>(n));
      std::memcpy(r.data_f64.data(), bytes.data() + pos, n * 8);
    }
    pos += static_cast<std::size_t>(n) * elem_size;
    records.push_back(std::move(r));
  }
  return records;
}

const FtcRecord& find_record(const std::vector<FtcRecord>& records,
                             const std::string& name) {
  for (const FtcRecord& r : records)
    if (r.name() == name) return r;
  throw DataError("ftc record not found: " + name);
}

}  // namespace sinv
