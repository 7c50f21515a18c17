#include "sinv/common.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

namespace sinv {

namespace {
std::atomic<bool> g_quiet{false};
}

void set_log_quiet(bool quiet) { g_quiet.store(quiet); }

void log_info(const std::string& msg) {
  if (!g_quiet.load()) std::fprintf(stderr, "[sinv] %s\n", msg.c_str());
}

void log_warn(const std::string& msg) {
  std::fprintf(stderr, "[sinv] warning: %s\n", msg.c_str());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

double Rng::gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

}  // namespace sinv
