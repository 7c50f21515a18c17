#ifndef SINV_COMMON_HPP
#define SINV_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sinv {

/// Bad or inconsistent input data (malformed files, shape mismatches, ...).
/// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Cross-stage provenance mismatch (feature/basis/model built from a
/// different configuration). The CLI maps this to exit code 3.
class ProvenanceError : public std::runtime_error {
 public:
  explicit ProvenanceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or command usage. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

void log_info(const std::string& msg);
void log_warn(const std::string& msg);
void set_log_quiet(bool quiet);

// ---------------------------------------------------------------------------
// Hashing (FNV-1a, 64 bit). Used for artifact provenance and checkpoint
// checksums; not cryptographic.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  return fnv1a64(s.data(), s.size(), h);
}

std::string hash_hex(std::uint64_t h);

// ---------------------------------------------------------------------------
// Deterministic RNG. splitmix64 core with explicit distributions so that
// streams are bit-reproducible across platforms and standard libraries
// (std:: distributions are implementation-defined).
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Multiply-shift reduction, n > 0.
  std::uint64_t uniform_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (no rejection, deterministic stream).
  double gauss();

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Derive an independent stream from this seed and a tag.
  Rng fork(std::uint64_t tag) const {
    std::uint64_t h = kFnvOffset;
    h = fnv1a64(&state_, sizeof(state_), h);
    h = fnv1a64(&tag, sizeof(tag), h);
    return Rng(h);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sinv

#endif  // SINV_COMMON_HPP
