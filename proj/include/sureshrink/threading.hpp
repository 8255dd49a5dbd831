#pragma once

namespace sureshrink {

// Applies the SURESHRINK_THREADS environment variable (if set and >= 1) as a
// cap on the OpenMP worker count. Called once at tool startup; a no-op in
// serial builds or when the variable is absent/malformed.
void apply_thread_cap_from_env();

// Current worker count the kernels will use (1 in serial builds).
int worker_count();

}  // namespace sureshrink
