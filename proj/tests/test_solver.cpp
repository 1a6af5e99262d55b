#include <bit>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "qcd/posterior.hpp"
#include "qcd/solver.hpp"
#include "support.hpp"

using namespace qcd;

namespace {

std::shared_ptr<const SimplexGrid> make_grid(std::size_t M, std::size_t G) {
  return std::make_shared<const SimplexGrid>(M, G);
}

std::vector<double> h_on(const SimplexGrid& grid, const CostSpec& k) {
  std::vector<double> h(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) h[g] = min_terminal_cost(grid.coordinates(g), k).value;
  return h;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("certified gap") {
    const auto k = test::connected_costs();
    CHECK(certified_gap(k, 0.05, 300) == doctest::Approx(1.0));
    CHECK(std::isinf(certified_gap(k, 0.05, 0)));
    CHECK(default_max_iterations(k, 0.05) == 3'000'000);
    CHECK(default_stop_tolerance(k) == doctest::Approx(1.1e-7));
  }

  TEST_CASE("V^0 is h and iterates decrease within [0, h]") {
    const auto m = test::common_model();
    const auto k = test::two_costs(14, 20, 8, 8, 1);
    const auto grid = make_grid(2, 30);
    const auto h = h_on(*grid, k);
    SolverOptions opt;
    opt.fixed_iterations = 0;
    CHECK(value_iterate(m, k, grid, opt).values == h);

    std::vector<double> prev = h;
    for (std::size_t n = 1; n <= 25; ++n) {
      const auto next = bellman(prev, m, k, *grid);
      for (std::size_t g = 0; g < grid->size(); ++g) {
        REQUIRE(next[g] <= prev[g] + 1e-12);
        REQUIRE(next[g] >= 0.0);
        REQUIRE(next[g] <= h[g] + 1e-9);
      }
      prev = next;
    }
    opt.fixed_iterations = 25;
    const auto vf = value_iterate(m, k, grid, opt);
    CHECK(vf.values == prev);
    CHECK(vf.iteration_count == 25);
    CHECK(vf.certified_gap == doctest::Approx(certified_gap(k, m.p, 25)));
  }

  TEST_CASE("zero costs give V = 0 after one iteration") {
    const auto grid = make_grid(2, 10);
    SolverOptions opt;
    opt.fixed_iterations = 1;
    const auto vf = value_iterate(test::common_model(), test::two_costs(0, 0, 0, 0, 1), grid, opt);
    for (double v : vf.values) CHECK(v == 0.0);
  }

  TEST_CASE("one Bellman step at e_0 for change detection") {
    const auto m = test::one_change_model();
    CostSpec k;
    k.c = 0.05;
    k.a = {{1.0}, {0.0}};
    const auto grid = make_grid(1, 50);
    const auto next = bellman(h_on(*grid, k), m, k, *grid);
    // h(pi) = pi_0 is linear, so T h (e_0) = sum_x D_0(e_0, x) = 1 - p.
    const double th = apply_T([](std::span<const double> q) { return q[0]; }, Belief({1.0, 0.0}), m);
    CHECK(next[0] == doctest::Approx(std::min(1.0, 0.0 + th)).epsilon(1e-14));
    CHECK(next[0] == doctest::Approx(0.95));
  }

  TEST_CASE("prohibitive delay cost stops immediately") {
    const auto m = test::common_model();
    const auto k = test::two_costs(10, 10, 3, 3, 1e9);
    const auto grid = make_grid(2, 20);
    const auto h = h_on(*grid, k);
    const auto next = bellman(h, m, k, *grid);
    const auto vf = value_iterate(m, k, grid);
    const auto policy = extract_policy(vf, m, k);
    // Waiting at e_0 costs nothing, so only that point continues.
    for (std::size_t g = 0; g < grid->size(); ++g) {
      if (grid->coordinates(g)[0] == 1.0) {
        CHECK_FALSE(policy.stops(g));
        continue;
      }
      CHECK(next[g] == h[g]);
      CHECK(policy.stops(g));
    }
  }

  TEST_CASE("uninformative observations: V = h") {
    auto m = test::one_change_model();
    m.f[1] = m.f[0];
    CostSpec k;
    k.c = 10.0;
    k.a = {{1.0}, {0.0}};
    const auto grid = make_grid(1, 100);
    const auto vf = value_iterate(m, k, grid);
    // At e_0 one free stage moves the belief to pi_0 = 1 - p, where stopping wins.
    CHECK(vf.values[0] == doctest::Approx(1 - m.p).epsilon(1e-12));
    for (std::size_t g = 1; g < grid->size(); ++g) {
      CHECK(vf.values[g] == doctest::Approx(grid->coordinates(g)[0]).epsilon(1e-12));
    }
  }

  TEST_CASE("results do not depend on threads or kernels") {
    const auto m = test::common_model();
    const auto k = test::connected_costs();
    const auto grid = make_grid(2, 60);
    SolverOptions base;
    base.isa = kernels::Isa::Scalar;
    const auto ref = value_iterate(m, k, grid, base);
    for (std::size_t threads : {2, 3, 7}) {
      for (auto isa : {kernels::Isa::Scalar, kernels::Isa::Avx2}) {
        if (!kernels::available(isa)) continue;
        SolverOptions opt = base;
        opt.threads = threads;
        opt.isa = isa;
        const auto vf = value_iterate(m, k, grid, opt);
        REQUIRE(vf.iteration_count == ref.iteration_count);
        for (std::size_t g = 0; g < grid->size(); ++g) {
          REQUIRE(std::bit_cast<std::uint64_t>(vf.values[g]) ==
                  std::bit_cast<std::uint64_t>(ref.values[g]));
        }
      }
    }
  }

  TEST_CASE("errors") {
    const auto m = test::common_model();
    const auto k = test::connected_costs();
    SolverOptions opt;
    opt.max_iterations = 3;
    CHECK_THROWS_AS(value_iterate(m, k, make_grid(2, 40), opt), IterationBudgetExceeded);
    auto zero_nu = m;
    zero_nu.nu = {1.0, 0.0};
    CHECK_THROWS_AS(value_iterate(zero_nu, k, make_grid(2, 10)), std::invalid_argument);
    CHECK_THROWS_AS(value_iterate(m, k, make_grid(3, 10)), std::invalid_argument);
    auto bad = k;
    bad.c = -1;
    CHECK_THROWS_AS(value_iterate(m, bad, make_grid(2, 10)), std::invalid_argument);
  }

  TEST_CASE("converged solution: residual, vertices, interpolation, policy") {
    const auto m = test::common_model();
    const auto k = test::connected_costs();
    const auto grid = make_grid(2, 80);
    SolverOptions opt;
    opt.record_snapshots = true;
    const auto vf = value_iterate(m, k, grid, opt);
    CHECK(vf.final_delta <= 1e-6);
    CHECK(bellman_residual(vf, m, k) <= vf.final_delta);

    for (std::size_t j = 1; j <= 2; ++j) {
      const auto ej = Belief::vertex(2, j);
      CHECK(interpolate(vf, ej) == 0.0);
    }
    for (std::size_t g = 0; g < grid->size(); g += 17) {
      CHECK(interpolate(vf, grid->coordinates(g)) == doctest::Approx(vf.values[g]).epsilon(1e-13));
    }

    const auto policy = extract_policy(vf, m, k);
    for (std::size_t j = 1; j <= 2; ++j) {
      const std::vector<std::int32_t> kj = j == 1 ? std::vector<std::int32_t>{0, 80, 0}
                                                  : std::vector<std::int32_t>{0, 0, 80};
      const auto g = *grid->index_of(kj);
      CHECK(policy.verdicts[g] == j);
      CHECK(policy.in_region(g, j));
    }
    std::vector<double> pi(3);
    for (std::size_t g = 0; g < grid->size(); ++g) {
      grid->coordinates(g, pi);
      const auto best = min_terminal_cost(pi, k);
      if (best.value <= k.c * (1 - pi[0])) REQUIRE(policy.stops(g));
      if (policy.stops(g)) {
        REQUIRE(policy.verdicts[g] == best.label);
        REQUIRE(policy.in_region(g, best.label));
      }
    }

    // Gamma_0 is everything and the snapshots shrink.
    REQUIRE(vf.snapshots.size() == vf.iteration_count + 1);
    for (auto v : vf.snapshots[0]) REQUIRE(v != 0);
    for (std::size_t n = 1; n < vf.snapshots.size(); ++n) {
      for (std::size_t g = 0; g < grid->size(); ++g) {
        if (vf.snapshots[n][g]) REQUIRE(vf.snapshots[n - 1][g]);
      }
    }
  }

  TEST_CASE("tie mask marks both labels on the h_1 = h_2 locus") {
    const auto k = test::connected_costs();
    const std::vector<double> on{0.2, 0.4, 0.4};
    CHECK(tie_mask(on, k) == 3U);
    const std::vector<double> off{0.2, 0.5, 0.3};
    CHECK(tie_mask(off, k) == 1U);
  }
}
