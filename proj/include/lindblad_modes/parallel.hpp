#pragma once

namespace lindblad {

// Thread count used by the OpenMP kernels. Reads LINDBLAD_MODES_THREADS on
// first use (0 or unset = OpenMP default); set_thread_cap overrides it.
int thread_cap();
void set_thread_cap(int threads);

} // namespace lindblad
