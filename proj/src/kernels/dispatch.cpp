#include <cstdlib>
#include <stdexcept>
#include <string>

#include "qcd/kernels.hpp"

namespace qcd::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::accumulate, &scalar::relax};
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::accumulate, &avx2::relax};

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
      return avx2::compiled() && cpu_has_avx2();
  }
  return false;
}

Isa detect() {
  if (const char* forced = std::getenv("QCD_ISA"); forced && std::string(forced) == "scalar") {
    return Isa::Scalar;
  }
  return available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) {
    throw std::invalid_argument("kernel variant " + std::string(to_string(isa)) +
                                " is not available on this machine");
  }
  return isa == Isa::Avx2 ? kAvx2 : kScalar;
}

}  // namespace qcd::kernels
