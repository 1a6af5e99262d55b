#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "qcd/model.hpp"

namespace qcd {

/// The observed symbol has probability zero under every regime that the
/// current belief still admits.
class ImpossibleObservation : public std::runtime_error {
 public:
  ImpossibleObservation(std::size_t symbol);
  std::size_t symbol() const { return symbol_; }

 private:
  std::size_t symbol_;
};

/// (D_0, ..., D_M) and their sum D for one belief and one symbol.
struct UnnormalizedWeights {
  std::vector<double> d;
  double total = 0.0;
};

/// D_0 = (1-p) pi_0 f_0(x), D_i = (pi_i + pi_0 p nu_i) f_i(x).
UnnormalizedWeights weights(const Belief& belief, std::size_t symbol, const ModelSpec& model);

/// Writes D_0..D_M into `out` and returns D. No allocation.
double weights_into(std::span<const double> pi, std::size_t symbol, const ModelSpec& model,
                    std::span<double> out);

/// Posterior after observing `symbol`: D_i / D. Throws ImpossibleObservation
/// when D = 0.
Belief update(const Belief& belief, std::size_t symbol, const ModelSpec& model);

/// (T f)(pi) = sum_x D(pi,x) f(D_0/D, ..., D_M/D). Symbols with D = 0 are
/// skipped. `f` receives the normalized posterior as a span of M+1 doubles.
template <class F>
double apply_T(F&& f, std::span<const double> pi, const ModelSpec& model) {
  std::vector<double> d(model.M + 1);
  double sum = 0.0;
  for (std::size_t x = 0; x < model.alphabet.size; ++x) {
    const double total = weights_into(pi, x, model, d);
    if (total <= 0.0) continue;
    for (double& v : d) v /= total;
    sum += total * f(std::span<const double>(d));
  }
  return sum;
}

template <class F>
double apply_T(F&& f, const Belief& belief, const ModelSpec& model) {
  return apply_T(std::forward<F>(f), belief.values(), model);
}

/// Predictive probability of every symbol, sum_i D_i(pi, x).
std::vector<double> predictive(std::span<const double> pi, const ModelSpec& model);

// ---------------------------------------------------------------------------
// Sampling

/// Per-episode seed derived from a master seed and the episode counter with
/// the splitmix64 finalizer, so episodes can be generated in any order.
std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t episode_id);

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draw of the zero-modified geometric change time.
std::size_t change_time_quantile(double u, double p0, double p);

/// Index i with cdf(i-1) <= u < cdf(i), skipping zero-mass entries.
std::size_t categorical_quantile(double u, std::span<const double> pmf);

class SymbolSource {
 public:
  virtual ~SymbolSource() = default;
  /// Next observation X_{n+1}, or nothing when the source is exhausted.
  virtual std::optional<std::size_t> next() = 0;
};

/// Unbounded observation stream of one episode. Draw order is fixed:
/// theta, mu, then one uniform per observation.
class ObservationStream : public SymbolSource {
 public:
  ObservationStream(const ModelSpec& model, std::uint64_t seed);

  std::size_t theta() const { return theta_; }
  std::size_t mu() const { return mu_; }
  /// Number of observations drawn so far.
  std::size_t stage() const { return stage_; }

  std::optional<std::size_t> next() override;

 private:
  const ModelSpec* model_;
  std::mt19937_64 rng_;
  std::size_t theta_ = 0;
  std::size_t mu_ = 1;
  std::size_t stage_ = 0;
};

/// Replays a fixed sequence of symbols.
class SpanSource : public SymbolSource {
 public:
  explicit SpanSource(std::span<const std::size_t> symbols) : symbols_(symbols) {}
  std::optional<std::size_t> next() override {
    if (pos_ >= symbols_.size()) return std::nullopt;
    return symbols_[pos_++];
  }

 private:
  std::span<const std::size_t> symbols_;
  std::size_t pos_ = 0;
};

struct EpisodeSample {
  std::size_t theta = 0;
  std::size_t mu = 1;
  std::vector<std::size_t> observations;  // X_1..X_horizon
};

/// First `horizon` observations of ObservationStream(model, seed). theta may
/// exceed the horizon.
EpisodeSample sample_episode(const ModelSpec& model, std::size_t horizon, std::uint64_t seed);

}  // namespace qcd
