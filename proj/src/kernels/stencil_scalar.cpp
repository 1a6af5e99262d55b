#include <cmath>
#include <limits>

#include "qcd/kernels.hpp"

namespace qcd::kernels::scalar {

void accumulate(const StencilView& stencil, std::size_t begin, std::size_t end, const double* values,
                const double* base, double* out) {
  for (std::size_t g = begin; g < end; ++g) {
    double acc = base[g];
    for (std::size_t s = 0; s < stencil.width; ++s) {
      const std::size_t slot = s * stencil.stride + g;
      acc = acc + stencil.weights[slot] * values[stencil.indices[slot]];
    }
    out[g] = acc;
  }
}

double relax(std::size_t begin, std::size_t end, const double* h, const double* cont,
             const double* prev, double* next) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double delta = 0.0;
  bool bad = false;
  for (std::size_t g = begin; g < end; ++g) {
    const double v = h[g] < cont[g] ? h[g] : cont[g];
    next[g] = v;
    if (!(std::fabs(v) < kInf)) bad = true;
    const double d = std::fabs(v - prev[g]);
    delta = delta > d ? delta : d;
  }
  return bad ? std::numeric_limits<double>::quiet_NaN() : delta;
}

}  // namespace qcd::kernels::scalar
