#pragma once

namespace turntaker {

/// Worker count for parallel regions: the OpenMP maximum, capped by the
/// TURNTAKER_THREADS environment variable when set. Always >= 1. Reads the
/// environment on every call so tests can change the cap at runtime.
int worker_thread_count();

}  // namespace turntaker
