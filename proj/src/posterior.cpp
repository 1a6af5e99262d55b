#include "qcd/posterior.hpp"

#include <cmath>

#include <fmt/format.h>

namespace qcd {

ImpossibleObservation::ImpossibleObservation(std::size_t symbol)
    : std::runtime_error(
          fmt::format("symbol {} has zero probability under the current belief", symbol)),
      symbol_(symbol) {}

double weights_into(std::span<const double> pi, std::size_t symbol, const ModelSpec& model,
                    std::span<double> out) {
  const double pi0 = pi[0];
  out[0] = (1.0 - model.p) * pi0 * model.f[0][symbol];
  double total = out[0];
  for (std::size_t i = 1; i <= model.M; ++i) {
    out[i] = (pi[i] + pi0 * model.p * model.nu[i - 1]) * model.f[i][symbol];
    total += out[i];
  }
  return total;
}

UnnormalizedWeights weights(const Belief& belief, std::size_t symbol, const ModelSpec& model) {
  if (symbol >= model.alphabet.size) {
    throw std::out_of_range(fmt::format("symbol {} outside alphabet of size {}", symbol,
                                        model.alphabet.size));
  }
  UnnormalizedWeights w;
  w.d.resize(model.M + 1);
  w.total = weights_into(belief.values(), symbol, model, w.d);
  return w;
}

Belief update(const Belief& belief, std::size_t symbol, const ModelSpec& model) {
  auto w = weights(belief, symbol, model);
  if (!(w.total > 0.0)) throw ImpossibleObservation(symbol);
  for (double& v : w.d) v /= w.total;
  return Belief(std::move(w.d));
}

std::vector<double> predictive(std::span<const double> pi, const ModelSpec& model) {
  std::vector<double> d(model.M + 1);
  std::vector<double> out(model.alphabet.size);
  for (std::size_t x = 0; x < model.alphabet.size; ++x) out[x] = weights_into(pi, x, model, d);
  return out;
}

std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t episode_id) {
  std::uint64_t z = master_seed + (episode_id + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t change_time_quantile(double u, double p0, double p) {
  if (u < p0) return 0;
  // Conditionally on theta >= 1, theta - 1 is geometric on {0, 1, ...}
  // with P{theta - 1 >= k} = (1-p)^k.
  const double v = (u - p0) / (1.0 - p0);
  const double k = std::floor(std::log1p(-v) / std::log1p(-p));
  if (!(k < 1e18)) return static_cast<std::size_t>(1e18);
  return 1 + static_cast<std::size_t>(k);
}

std::size_t categorical_quantile(double u, std::span<const double> pmf) {
  double cdf = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] <= 0.0) continue;
    last_positive = i;
    cdf += pmf[i];
    if (u < cdf) return i;
  }
  return last_positive;
}

ObservationStream::ObservationStream(const ModelSpec& model, std::uint64_t seed)
    : model_(&model), rng_(seed) {
  theta_ = change_time_quantile(uniform01(rng_), model.p0, model.p);
  mu_ = 1 + categorical_quantile(uniform01(rng_), model.nu);
}

std::optional<std::size_t> ObservationStream::next() {
  ++stage_;
  const std::size_t regime = stage_ < theta_ ? 0 : mu_;
  return categorical_quantile(uniform01(rng_), model_->f[regime]);
}

EpisodeSample sample_episode(const ModelSpec& model, std::size_t horizon, std::uint64_t seed) {
  ObservationStream stream(model, seed);
  EpisodeSample sample;
  sample.theta = stream.theta();
  sample.mu = stream.mu();
  sample.observations.reserve(horizon);
  for (std::size_t n = 0; n < horizon; ++n) sample.observations.push_back(*stream.next());
  return sample;
}

}  // namespace qcd
