#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "qcd/kernels.hpp"

using namespace qcd::kernels;

namespace {

struct RandomStencil {
  std::size_t width, stride, n;
  std::vector<double> weights;
  std::vector<std::int32_t> indices;
  std::vector<double> values, base;

  RandomStencil(std::size_t width_, std::size_t n_, std::uint64_t seed) : width(width_), n(n_) {
    stride = (n + kLaneWidth - 1) / kLaneWidth * kLaneWidth;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    weights.resize(width * stride);
    indices.resize(width * stride);
    values.resize(n);
    base.resize(stride);
    for (auto& w : weights) w = u(rng) * 0.3;
    for (auto& i : indices) i = static_cast<std::int32_t>(rng() % n);
    for (auto& v : values) v = u(rng) * 17.0;
    for (auto& b : base) b = u(rng);
  }
  StencilView view() const { return {width, stride, weights.data(), indices.data()}; }
};

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar accumulate matches the definition") {
    const RandomStencil s(6, 37, 1);
    std::vector<double> out(s.n);
    scalar::accumulate(s.view(), 0, s.n, s.values.data(), s.base.data(), out.data());
    for (std::size_t g = 0; g < s.n; ++g) {
      double acc = s.base[g];
      for (std::size_t k = 0; k < s.width; ++k) {
        acc += s.weights[k * s.stride + g] * s.values[s.indices[k * s.stride + g]];
      }
      REQUIRE(out[g] == acc);
    }
  }

  TEST_CASE("scalar relax") {
    const std::vector<double> h{1, 2, 3, 4};
    const std::vector<double> cont{2, 1, 3, 0.5};
    const std::vector<double> prev{1, 1.5, 3, 3};
    std::vector<double> next(4);
    const double d = scalar::relax(0, 4, h.data(), cont.data(), prev.data(), next.data());
    CHECK(next == std::vector<double>{1, 1, 3, 0.5});
    CHECK(d == 2.5);
    std::vector<double> bad{1, std::numeric_limits<double>::quiet_NaN(), 3, 4};
    CHECK(std::isnan(scalar::relax(0, 4, h.data(), bad.data(), prev.data(), next.data()) ));
  }

  TEST_CASE("AVX2 kernels are bit-identical to the reference") {
    if (!available(Isa::Avx2)) {
      MESSAGE("AVX2 not available; skipping");
      return;
    }
    for (std::size_t n : {1, 3, 4, 5, 17, 64, 1001}) {
      for (std::size_t width : {2, 3, 12}) {
        const RandomStencil s(width, n, n * 31 + width);
        for (auto [begin, end] : {std::pair<std::size_t, std::size_t>{0, n}, {1, n}, {n / 3, n}}) {
          if (begin >= end) continue;
          std::vector<double> a(s.n, -1.0), b(s.n, -1.0);
          scalar::accumulate(s.view(), begin, end, s.values.data(), s.base.data(), a.data());
          avx2::accumulate(s.view(), begin, end, s.values.data(), s.base.data(), b.data());
          REQUIRE(same_bits(a, b));

          std::vector<double> na(s.n, 0.0), nb(s.n, 0.0);
          std::vector<double> h(s.base.begin(), s.base.begin() + s.n);
          for (auto& v : h) v *= 8.0;
          const double da = scalar::relax(begin, end, h.data(), a.data(), s.values.data(), na.data());
          const double db = avx2::relax(begin, end, h.data(), b.data(), s.values.data(), nb.data());
          REQUIRE(same_bits(na, nb));
          REQUIRE(std::bit_cast<std::uint64_t>(da) == std::bit_cast<std::uint64_t>(db));
        }
      }
    }
  }

  TEST_CASE("AVX2 relax reports non-finite values") {
    if (!available(Isa::Avx2)) return;
    std::vector<double> h(9, 1.0), cont(9, 0.5), prev(9, 0.0), next(9);
    cont[6] = std::numeric_limits<double>::quiet_NaN();
    CHECK(std::isnan(avx2::relax(0, 9, h.data(), cont.data(), prev.data(), next.data())));
  }

  TEST_CASE("dispatch") {
    CHECK(available(Isa::Scalar));
    CHECK(table(Isa::Scalar).isa == Isa::Scalar);
    CHECK(to_string(Isa::Scalar) == "scalar");
    CHECK(available(detect()));
  }
}
