#include "sphertess/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace sphertess {

namespace {
std::atomic<unsigned> g_override{0};
}

unsigned thread_count() {
  if (const unsigned o = g_override.load()) return o;
  if (const char* env = std::getenv("SPHERTESS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(unsigned n) { g_override.store(n); }

}  // namespace sphertess
