#include <cmath>
#include <random>

#include "doctest.h"
#include "qcd/evaluation.hpp"
#include "qcd/posterior.hpp"
#include "support.hpp"

using namespace qcd;

namespace {

// Posterior by brute force over the joint law of (theta, mu, X_1..X_n).
std::vector<double> bayes_posterior(const ModelSpec& m, const std::vector<std::size_t>& xs) {
  const std::size_t n = xs.size();
  std::vector<double> post(m.M + 1, 0.0);
  auto likelihood = [&](std::size_t t, std::size_t mu) {
    double l = 1.0;
    for (std::size_t s = 1; s <= n; ++s) l *= s < t ? m.f[0][xs[s - 1]] : m.f[mu][xs[s - 1]];
    return l;
  };
  // theta > n: every observation from f_0.
  post[0] = (1 - m.p0) * std::pow(1 - m.p, static_cast<double>(n)) * likelihood(n + 1, 0);
  for (std::size_t t = 0; t <= n; ++t) {
    const double prior_t = t == 0 ? m.p0 : (1 - m.p0) * std::pow(1 - m.p, t - 1.0) * m.p;
    for (std::size_t mu = 1; mu <= m.M; ++mu) post[mu] += prior_t * m.nu[mu - 1] * likelihood(t, mu);
  }
  double s = 0.0;
  for (double v : post) s += v;
  for (double& v : post) v /= s;
  return post;
}

}  // namespace

TEST_SUITE("posterior") {
  TEST_CASE("weights at the initial belief") {
    const auto m = test::common_model();
    const auto w = weights(Belief({0.98, 0.01, 0.01}), 0, m);
    CHECK(w.d[0] == doctest::Approx(0.23275).epsilon(1e-14));
    CHECK(w.d[1] == doctest::Approx(0.0138).epsilon(1e-14));
    CHECK(w.d[2] == doctest::Approx(0.00345).epsilon(1e-14));
    CHECK(w.total == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(weights(Belief({0.98, 0.01, 0.01}), 4, m), std::out_of_range);
  }

  TEST_CASE("weights at a vertex and for a pre-change-impossible symbol") {
    auto m = test::common_model();
    for (std::size_t x = 0; x < 4; ++x) {
      const auto w = weights(Belief::vertex(2, 1), x, m);
      CHECK(w.d[0] == 0.0);
      CHECK(w.d[1] == m.f[1][x]);
      CHECK(w.d[2] == 0.0);
    }
    m.f[0] = {0.5, 0.5, 0.0, 0.0};
    const auto w = weights(Belief::vertex(2, 0), 3, m);
    CHECK(w.d[0] == 0.0);
    CHECK(w.d[1] == doctest::Approx(m.p * 0.5 * 0.1));
    CHECK(w.d[2] == doctest::Approx(m.p * 0.5 * 0.4));
  }

  TEST_CASE("update") {
    const auto m = test::common_model();
    const auto b = update(Belief({0.98, 0.01, 0.01}), 0, m);
    CHECK(b[0] == doctest::Approx(0.931).epsilon(1e-13));
    CHECK(b[1] == doctest::Approx(0.0552).epsilon(1e-13));
    CHECK(b[2] == doctest::Approx(0.0138).epsilon(1e-13));
    for (std::size_t x = 0; x < 4; ++x) CHECK(update(Belief::vertex(2, 1), x, m) == Belief::vertex(2, 1));

    auto flat = test::one_change_model();
    flat.f[1] = flat.f[0];
    const auto f = update(Belief({1.0, 0.0}), 2, flat);
    CHECK(f[0] == doctest::Approx(0.95));
    CHECK(f[1] == doctest::Approx(0.05));
  }

  TEST_CASE("chained updates agree with brute-force Bayes") {
    const auto m = test::common_model();
    for (std::size_t n = 1; n <= 3; ++n) {
      std::vector<std::size_t> xs(n, 0);
      for (std::size_t code = 0; code < (1u << (2 * n)); ++code) {
        for (std::size_t s = 0; s < n; ++s) xs[s] = (code >> (2 * s)) & 3;
        Belief b = initial_belief(m);
        for (auto x : xs) b = update(b, x, m);
        const auto oracle = bayes_posterior(m, xs);
        for (std::size_t i = 0; i <= 2; ++i) REQUIRE(b[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("impossible observation is an error") {
    auto m = test::common_model();
    m.f[1] = {0.0, 0.5, 0.5, 0.0};
    CHECK_THROWS_AS(update(Belief::vertex(2, 1), 0, m), ImpossibleObservation);
  }

  TEST_CASE("apply_T") {
    const auto m = test::common_model();
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
      const auto pi = test::random_simplex_point(2, rng);
      CHECK(apply_T([](std::span<const double>) { return 1.0; }, pi, m) == doctest::Approx(1.0));
    }
    const auto one = test::one_change_model();
    const double v = apply_T([](std::span<const double> q) { return q[0]; }, Belief({1.0, 0.0}), one);
    CHECK(v == doctest::Approx(1 - one.p).epsilon(1e-14));
  }

  TEST_CASE("apply_T of h matches a Monte Carlo average") {
    const auto m = test::common_model();
    const auto k = test::connected_costs();
    const auto pi = initial_belief(m);
    const double exact =
        apply_T([&](std::span<const double> q) { return min_terminal_cost(q, k).value; }, pi, m);
    std::mt19937_64 rng(11);
    const auto pred = predictive(pi.values(), m);
    std::vector<double> draws(1'000'000);
    for (auto& d : draws) {
      const auto x = categorical_quantile(uniform01(rng), pred);
      d = min_terminal_cost(update(pi, x, m).values(), k).value;
    }
    const auto mc = sample_moments(draws);
    CHECK(std::abs(mc.mean - exact) <= 3 * mc.standard_error + 1e-12);
  }

  TEST_CASE("random linear functions satisfy the expectation identity") {
    const auto m = test::common_model();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int t = 0; t < 5; ++t) {
      const Belief pi(test::random_simplex_point(2, rng));
      std::vector<double> coeff{u(rng), u(rng), u(rng)};
      const auto check = expectation_identity(m, pi, coeff, 20000, 100 + t);
      CHECK(check.pass);
    }
  }

  TEST_CASE("normalization survives long chains") {
    const auto m = test::common_model();
    std::mt19937_64 rng(9);
    Belief b = initial_belief(m);
    for (int t = 0; t < 10000; ++t) b = update(b, rng() % 4, m);
    double s = 0.0;
    for (double v : b.values()) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }

  TEST_CASE("change time quantile") {
    CHECK(change_time_quantile(0.0, 0.02, 0.05) == 0);
    CHECK(change_time_quantile(0.0199, 0.02, 0.05) == 0);
    CHECK(change_time_quantile(0.02, 0.02, 0.05) == 1);
    // P(theta <= 1) = 0.02 + 0.98 * 0.05 = 0.069.
    CHECK(change_time_quantile(0.0689, 0.02, 0.05) == 1);
    CHECK(change_time_quantile(0.0691, 0.02, 0.05) == 2);
    CHECK(change_time_quantile(0.999, 1.0, 0.05) == 0);
  }

  TEST_CASE("episode sampling is deterministic and has the right law") {
    const auto m = test::common_model();
    const auto a = sample_episode(m, 50, 1234);
    const auto b = sample_episode(m, 50, 1234);
    CHECK(a.theta == b.theta);
    CHECK(a.mu == b.mu);
    CHECK(a.observations == b.observations);
    CHECK(a.observations.size() == 50);

    const std::size_t n = 1'000'000;
    std::size_t zero = 0, one = 0;
    for (std::size_t e = 0; e < n; ++e) {
      ObservationStream s(m, episode_seed(42, e));
      zero += s.theta() == 0;
      one += s.theta() == 1;
    }
    auto within = [&](std::size_t count, double p) {
      const double se = std::sqrt(p * (1 - p) / n);
      return std::abs(static_cast<double>(count) / n - p) <= 3 * se;
    };
    CHECK(within(zero, 0.02));
    CHECK(within(one, 0.98 * 0.05));
  }

  TEST_CASE("degenerate priors") {
    auto m = test::common_model();
    m.p0 = 1.0;
    for (std::uint64_t s = 0; s < 100; ++s) CHECK(sample_episode(m, 5, s).theta == 0);
    m.nu = {1.0, 0.0};
    for (std::uint64_t s = 0; s < 100; ++s) CHECK(sample_episode(m, 5, s).mu == 1);
  }

  TEST_CASE("observations follow f_0 before and f_mu after the change") {
    const auto m = test::common_model();
    std::vector<double> pre(4, 0.0), post(4, 0.0);
    double npre = 0, npost = 0;
    for (std::uint64_t s = 0; s < 20000; ++s) {
      const auto ep = sample_episode(m, 40, s);
      for (std::size_t k = 0; k < ep.observations.size(); ++k) {
        if (k + 1 < ep.theta) {
          pre[ep.observations[k]] += 1;
          npre += 1;
        } else if (ep.mu == 1) {
          post[ep.observations[k]] += 1;
          npost += 1;
        }
      }
    }
    for (std::size_t x = 0; x < 4; ++x) {
      CHECK(pre[x] / npre == doctest::Approx(m.f[0][x]).epsilon(0.02));
      CHECK(post[x] / npost == doctest::Approx(m.f[1][x]).epsilon(0.02));
    }
  }
}
