#include "gravcat/kernels.hpp"

#include <cmath>

namespace gravcat {
namespace {

inline double decay(double t, double alpha, double beta) {
  if (t == 0.0) return 1.0;
  return std::exp(-alpha * std::pow(t, beta));
}

void decay_weights_scalar(const double* t, std::size_t n, double alpha,
                          double beta, double tau, double* w_out) {
  for (std::size_t k = 0; k < n; ++k) {
    w_out[k] = (t[k] <= tau) ? decay(t[k], alpha, beta) : 0.0;
  }
}

double decay_dot_scalar(const double* t, const std::uint32_t* idx,
                        const double* values, std::size_t n, double alpha,
                        double beta, double tau) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (t[k] <= tau) acc += values[idx[k]] * decay(t[k], alpha, beta);
  }
  return acc;
}

double contour_dot_scalar(const double* t, const std::uint32_t* idx,
                          const double* values, std::size_t n, double tau) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (t[k] <= tau) acc += values[idx[k]];
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table = {"scalar", decay_weights_scalar,
                                    decay_dot_scalar, contour_dot_scalar};
  return table;
}

}  // namespace gravcat
