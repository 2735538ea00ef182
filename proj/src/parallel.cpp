#include "lindblad_modes/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace lindblad {

namespace {

std::atomic<int> g_cap{-1};

int from_env() {
    const char* env = std::getenv("LINDBLAD_MODES_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    try {
        int v = std::stoi(env);
        return v < 0 ? 0 : v;
    } catch (...) {
        return 0;
    }
}

} // namespace

int thread_cap() {
    int cap = g_cap.load();
    if (cap < 0) {
        cap = from_env();
        g_cap.store(cap);
    }
    return cap == 0 ? omp_get_max_threads() : cap;
}

void set_thread_cap(int threads) { g_cap.store(threads < 0 ? 0 : threads); }

} // namespace lindblad
