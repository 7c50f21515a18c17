#include "sinv/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <vector>

namespace sinv {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) {
  return std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8;
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

}  // namespace

AudioBuffer load_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open wav file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw DataError("not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    std::uint32_t len = read_u32(chunk + 4);
    const unsigned char* body = chunk + 8;
    if (pos + 8 + len > bytes.size()) throw DataError("truncated wav chunk: " + path);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw DataError("malformed fmt chunk: " + path);
      format = read_u16(body);
      channels = read_u16(body + 2);
      rate = read_u32(body + 4);
      bits = read_u16(body + 14);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = body;
      data_len = len;
    }
    pos += 8 + len + (len & 1);  // chunks are word-aligned
  }
  if (format == 0 || data == nullptr) throw DataError("missing fmt/data chunk: " + path);
  if (channels != 1) throw DataError("multichannel unsupported: " + path);
  if (rate == 0) throw DataError("invalid sample rate: " + path);

  AudioBuffer a;
  a.sample_rate = static_cast<int>(rate);
  a.id = std::filesystem::path(path).stem().string();

  if (format == 1 && bits == 16) {
    std::size_t n = data_len / 2;
    a.samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t s = static_cast<std::int16_t>(read_u16(data + 2 * i));
      a.samples[static_cast<Eigen::Index>(i)] = s / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    std::size_t n = data_len / 4;
    a.samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t u = read_u32(data + 4 * i);
      float v;
      std::memcpy(&v, &u, 4);
      a.samples[static_cast<Eigen::Index>(i)] = v;
    }
  } else {
    throw DataError("unsupported wav encoding (need 16-bit PCM or 32-bit float): " + path);
  }
  if (!a.samples.allFinite()) throw DataError("non-finite samples in " + path);
  return a;
}

void save_wav(const std::string& path, const AudioBuffer& a) {
  if (a.sample_rate <= 0) throw DataError("invalid sample rate on save: " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(a.samples.size());
  std::vector<unsigned char> out;
  out.reserve(44 + 2 * n);
  auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };

  put_tag("RIFF");
  put_u32(out, 36 + 2 * n);
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(a.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(a.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag("data");
  put_u32(out, 2 * n);
  for (std::uint32_t i = 0; i < n; ++i) {
    double v = std::clamp(a.samples[static_cast<Eigen::Index>(i)], -1.0, 1.0);
    auto s = static_cast<std::int16_t>(std::lrint(v * 32767.0));
    put_u16(out, static_cast<std::uint16_t>(s));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write wav file: " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
}

AudioBuffer resample(const AudioBuffer& a, int target_rate) {
  if (target_rate <= 0) throw DataError("resample: target rate must be positive");
  if (a.sample_rate <= 0) throw DataError("resample: invalid source rate");
  if (target_rate == a.sample_rate) return a;

  const std::int64_t g = std::gcd(a.sample_rate, target_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = a.sample_rate / g;

  // Cutoff at the lower of the two Nyquists, in source-sample units.
  const double fc = 0.5 * std::min(1.0, static_cast<double>(target_rate) / a.sample_rate);
  const int half = static_cast<int>(std::ceil(32.0 / (2.0 * fc)));

  const Eigen::Index n_in = a.samples.size();
  const Eigen::Index n_out =
      static_cast<Eigen::Index>(std::llround(static_cast<double>(n_in) * up / down));

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.id = a.id;
  out.samples.resize(n_out);

  const double pi = std::numbers::pi;
  for (Eigen::Index i = 0; i < n_out; ++i) {
    // Source-time position of output sample i.
    const double t = static_cast<double>(i) * down / up;
    const auto center = static_cast<std::int64_t>(std::floor(t));
    double acc = 0.0;
    for (std::int64_t m = center - half; m <= center + half; ++m) {
      if (m < 0 || m >= n_in) continue;
      const double tau = t - static_cast<double>(m);
      double kernel;
      if (std::abs(tau) < 1e-12) {
        kernel = 2.0 * fc;
      } else {
        kernel = std::sin(2.0 * pi * fc * tau) / (pi * tau);
      }
      // Blackman window over [-half, half].
      const double w = 0.42 + 0.5 * std::cos(pi * tau / half) +
                       0.08 * std::cos(2.0 * pi * tau / half);
      acc += a.samples[static_cast<Eigen::Index>(m)] * kernel * w;
    }
    out.samples[i] = acc;
  }
  return out;
}

}  // namespace sinv
