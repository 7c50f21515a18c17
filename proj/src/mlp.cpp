#include "sinv/mlp.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace sinv {

long MlpArchitecture::param_count() const {
  long n = static_cast<long>(input_dim) * hidden_width + hidden_width;
  n += static_cast<long>(hidden_layers - 1) *
       (static_cast<long>(hidden_width) * hidden_width + hidden_width);
  n += static_cast<long>(hidden_width) * output_dim + output_dim;
  return n;
}

void MlpArchitecture::validate() const {
  if (input_dim < 1 || hidden_layers < 1 || hidden_width < 1 || output_dim < 1)
    throw ConfigError("architecture dimensions must be positive");
  if (dropout_input < 0.0 || dropout_input >= 1.0 || dropout_hidden < 0.0 ||
      dropout_hidden >= 1.0)
    throw ConfigError("dropout probabilities must be in [0,1)");
}

namespace {

constexpr char kMagic[4] = {'M', 'L', 'P', '1'};
constexpr std::uint16_t kVersion = 1;

void append(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

template <typename T>
void append_pod(std::string& out, T v) {
  append(out, &v, sizeof(v));
}

void append_f64(std::string& out, const Eigen::VectorXd& v) {
  append(out, v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
}

struct Cursor {
  const std::string& bytes;
  std::size_t pos = 0;

  const char* take(std::size_t n) {
    if (pos + n > bytes.size()) throw DataError("truncated checkpoint");
    const char* p = bytes.data() + pos;
    pos += n;
    return p;
  }

  template <typename T>
  T pod() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }

  Eigen::VectorXd f64(Eigen::Index n) {
    Eigen::VectorXd v(n);
    std::memcpy(v.data(), take(static_cast<std::size_t>(n) * 8),
                static_cast<std::size_t>(n) * 8);
    return v;
  }
};

}  // namespace

void save_model(const Mlp<float>& m, const std::string& path) {
  std::string out;
  append(out, kMagic, 4);
  append_pod(out, kVersion);
  append_pod<std::int32_t>(out, m.arch.input_dim);
  append_pod<std::int32_t>(out, m.arch.hidden_layers);
  append_pod<std::int32_t>(out, m.arch.hidden_width);
  append_pod<std::int32_t>(out, m.arch.output_dim);
  append_pod<double>(out, m.arch.dropout_input);
  append_pod<double>(out, m.arch.dropout_hidden);
  append_pod<std::uint64_t>(out, m.init_seed);
  append_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.provenance.size()));
  out += m.provenance;
  append_f64(out, m.feat_mean);
  append_f64(out, m.feat_std);
  append_f64(out, m.target_mean);
  append_f64(out, m.target_std);
  for (const auto& l : m.layers) {
    for (Eigen::Index i = 0; i < l.w.rows(); ++i)
      for (Eigen::Index j = 0; j < l.w.cols(); ++j)
        append_pod<float>(out, l.w(i, j));
    append(out, l.b.data(), static_cast<std::size_t>(l.b.size()) * sizeof(float));
  }
  append_pod<std::uint64_t>(out, fnv1a64(out.data(), out.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for write: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write failed: " + path);
}

Mlp<float> load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 12 + 8) throw DataError("truncated checkpoint: " + path);

  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (stored != fnv1a64(bytes.data(), bytes.size() - 8))
    throw DataError("checkpoint checksum mismatch: " + path);

  Cursor c{bytes};
  if (std::memcmp(c.take(4), kMagic, 4) != 0)
    throw DataError("bad checkpoint magic: " + path);
  if (c.pod<std::uint16_t>() != kVersion)
    throw DataError("unsupported checkpoint version");

  Mlp<float> m;
  m.arch.input_dim = c.pod<std::int32_t>();
  m.arch.hidden_layers = c.pod<std::int32_t>();
  m.arch.hidden_width = c.pod<std::int32_t>();
  m.arch.output_dim = c.pod<std::int32_t>();
  m.arch.dropout_input = c.pod<double>();
  m.arch.dropout_hidden = c.pod<double>();
  m.arch.validate();
  m.init_seed = c.pod<std::uint64_t>();
  const auto prov_len = c.pod<std::uint32_t>();
  m.provenance.assign(c.take(prov_len), prov_len);
  m.feat_mean = c.f64(m.arch.input_dim);
  m.feat_std = c.f64(m.arch.input_dim);
  m.target_mean = c.f64(m.arch.output_dim);
  m.target_std = c.f64(m.arch.output_dim);

  int in = m.arch.input_dim;
  for (int l = 0; l <= m.arch.hidden_layers; ++l) {
    const int out = l == m.arch.hidden_layers ? m.arch.output_dim : m.arch.hidden_width;
    Mlp<float>::Layer layer;
    layer.w.resize(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) layer.w(i, j) = c.pod<float>();
    layer.b.resize(out);
    std::memcpy(layer.b.data(), c.take(static_cast<std::size_t>(out) * 4),
                static_cast<std::size_t>(out) * 4);
    m.layers.push_back(std::move(layer));
    in = out;
  }
  if (c.pos != bytes.size() - 8)
    throw DataError("checkpoint has trailing bytes: " + path);
  return m;
}

void save_train_log(const std::string& path, const TrainReport& report) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for write: " + path);
  f << "epoch,train_mse,dev_mse,seconds\n";
  char buf[160];
  for (std::size_t e = 0; e < report.train_mse.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.3f\n", e + 1,
                  report.train_mse[e], report.dev_mse[e], report.seconds[e]);
    f << buf;
  }
  if (!f) throw DataError("write failed: " + path);
}

}  // namespace sinv
