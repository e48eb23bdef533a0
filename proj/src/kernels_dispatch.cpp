#include "gravcat/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#include "gravcat/errors.hpp"

namespace gravcat {

#if !GRAVCAT_BUILD_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

const KernelTable& active_kernels() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const KernelTable* avx2 = avx2_kernels();
    if (const char* env = std::getenv("GRAVCAT_KERNEL")) {
      if (std::strcmp(env, "scalar") == 0) return scalar_kernels();
      if (std::strcmp(env, "avx2") == 0) {
        // requesting a variant this machine lacks falls back to scalar
        return avx2 != nullptr ? *avx2 : scalar_kernels();
      }
      throw Error(ErrorCode::InvalidConfig,
                  "GRAVCAT_KERNEL must be 'scalar' or 'avx2', got '" +
                      std::string(env) + "'");
    }
    return avx2 != nullptr ? *avx2 : scalar_kernels();
  }();
  return chosen;
}

}  // namespace gravcat
