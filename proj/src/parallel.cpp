#include "sicyig/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace sicyig::parallel {
namespace {

unsigned initial_count() {
  if (const char* env = std::getenv("SICYIG_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

std::atomic<unsigned>& count() {
  static std::atomic<unsigned> n{initial_count()};
  return n;
}

}  // namespace

unsigned thread_count() { return count().load(); }

void set_thread_count(unsigned n) { count().store(n ? n : 1); }

}  // namespace sicyig::parallel
