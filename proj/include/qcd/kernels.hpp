#pragma once

// Data-parallel inner loops of the Bellman sweep.
//
// Each grid point g carries a fixed-width stencil of (weight, index) pairs,
// stored transposed: entry s of point g lives at [s * stride + g]. The
// reference kernels are plain C++; the AVX2 variants process four points per
// lane group with the same per-point operation order and no fused
// multiply-add, so both produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace qcd::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Lane width all stencil buffers are padded to.
inline constexpr std::size_t kLaneWidth = 4;

struct StencilView {
  std::size_t width = 0;   // entries per point
  std::size_t stride = 0;  // padded point count, multiple of kLaneWidth
  const double* weights = nullptr;
  const std::int32_t* indices = nullptr;
};

/// out[g] = base[g] + sum_s w[s][g] * values[idx[s][g]], for g in [begin, end),
/// summed in increasing s.
using AccumulateFn = void (*)(const StencilView& stencil, std::size_t begin, std::size_t end,
                              const double* values, const double* base, double* out);

/// next[g] = (h[g] < cont[g]) ? h[g] : cont[g]; returns max_g |next[g] - prev[g]|,
/// or NaN if any next[g] is not finite.
using RelaxFn = double (*)(std::size_t begin, std::size_t end, const double* h, const double* cont,
                           const double* prev, double* next);

struct KernelTable {
  Isa isa;
  AccumulateFn accumulate;
  RelaxFn relax;
};

/// True when this build contains the variant and the CPU supports it.
bool available(Isa isa);

/// Best available variant. QCD_ISA=scalar in the environment forces the
/// reference kernels.
Isa detect();

/// Throws std::invalid_argument for an unavailable variant.
const KernelTable& table(Isa isa);

namespace scalar {
void accumulate(const StencilView& stencil, std::size_t begin, std::size_t end, const double* values,
                const double* base, double* out);
double relax(std::size_t begin, std::size_t end, const double* h, const double* cont,
             const double* prev, double* next);
}  // namespace scalar

namespace avx2 {
bool compiled();
void accumulate(const StencilView& stencil, std::size_t begin, std::size_t end, const double* values,
                const double* base, double* out);
double relax(std::size_t begin, std::size_t end, const double* h, const double* cont,
             const double* prev, double* next);
}  // namespace avx2

}  // namespace qcd::kernels
