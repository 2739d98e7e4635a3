#pragma once

namespace uvscatter::threads {

/// Worker count for the parallel kernels. The UVSCATTER_THREADS
/// environment variable caps it; 0 or unset means one worker per
/// available hardware thread.
int worker_count();

}  // namespace uvscatter::threads
