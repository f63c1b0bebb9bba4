#pragma once

namespace patchweave {

/// Caps the OpenMP worker count. Values < 1 restore the runtime default.
void set_thread_count(int n);
int thread_count();

}  // namespace patchweave
