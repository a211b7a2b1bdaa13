#pragma once

namespace expdyn::kernels {

enum class Backend { kScalar, kAvx2 };

bool backend_available(Backend b);
// Best available backend; EXPDYN_KERNEL=scalar forces the reference path.
Backend default_backend();
const char* backend_name(Backend b);

}  // namespace expdyn::kernels
