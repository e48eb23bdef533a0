#pragma once

#include <cstddef>
#include <cstdint>

namespace gravcat {

/// One implementation of the fused decay kernels. Shared contract:
///  - `t` holds travel times in minutes (t >= 0), `idx` destination indices
///    into `values`; both length `n`.
///  - an entry contributes iff t[k] <= tau (inclusive); t[k] == 0 has
///    weight exactly 1.
///  - alpha > 0, beta > 0; weight = exp(-alpha * t^beta).
///  - each variant accumulates in a fixed order that does not depend on the
///    caller's threading, so a given variant is bit-reproducible. Different
///    variants may differ by O(1e-14) relative; tests pin the agreement.
struct KernelTable {
  const char* name;

  /// w_out[k] = t[k] <= tau ? exp(-alpha * t[k]^beta) : 0
  void (*decay_weights)(const double* t, std::size_t n, double alpha,
                        double beta, double tau, double* w_out);

  /// sum over k of [t[k] <= tau] * values[idx[k]] * exp(-alpha * t[k]^beta)
  double (*decay_dot)(const double* t, const std::uint32_t* idx,
                      const double* values, std::size_t n, double alpha,
                      double beta, double tau);

  /// sum over k of [t[k] <= tau] * values[idx[k]]   (constant unit weight)
  double (*contour_dot)(const double* t, const std::uint32_t* idx,
                        const double* values, std::size_t n, double tau);
};

/// Portable reference implementation (std::exp / std::pow, strict
/// left-to-right accumulation).
const KernelTable& scalar_kernels();

/// AVX2+FMA implementation, or nullptr when the build or the running CPU
/// does not support it.
const KernelTable* avx2_kernels();

/// The variant picked at startup: AVX2 when available, else scalar.
/// Env var GRAVCAT_KERNEL={scalar|avx2} forces a variant; forcing avx2 on
/// an unsupported machine falls back to scalar, and any other name is
/// rejected (InvalidConfig) rather than silently ignored.
const KernelTable& active_kernels();

}  // namespace gravcat
