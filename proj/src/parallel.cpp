#include "focklab/parallel.hpp"

#include <atomic>

namespace focklab {

namespace {
std::atomic<int> g_threads{1};
}

int thread_count() { return g_threads.load(); }

void set_thread_count(int n) {
    if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    g_threads.store(n);
}

}  // namespace focklab
