#include "core_kge/threads.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace core_kge {

int worker_threads() {
  if (const char* env = std::getenv("CORE_KGE_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace core_kge
