#pragma once

namespace hgsim {

// Resolve the worker count for a parallel kernel.
//
//   requested <= 0  ->  use the OpenMP default (or 1 in a non-OpenMP build)
//   requested  > 0  ->  use exactly that many, hardware permitting
//
// Either way the SIM_THREADS environment variable, when set to a positive
// integer, caps the result.  Returns at least 1.
int resolve_threads(int requested);

}  // namespace hgsim
