#include "qcd/strategy.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace qcd {

StreamExhausted::StreamExhausted(std::size_t stage)
    : std::runtime_error(fmt::format("observation stream ended at stage {} before stopping", stage)),
      stage_(stage) {}

RealizedLoss realized_loss(std::size_t tau, std::size_t decision, std::size_t theta, std::size_t mu,
                           const CostSpec& costs) {
  RealizedLoss loss;
  loss.delay = tau > theta ? tau - theta : 0;
  loss.false_alarm = tau < theta;
  loss.misidentified = !loss.false_alarm && decision != mu;
  loss.delay_cost = costs.c * static_cast<double>(loss.delay);
  loss.false_alarm_cost = loss.false_alarm ? costs.terminal(0, decision) : 0.0;
  loss.misidentification_cost = loss.false_alarm ? 0.0 : costs.terminal(mu, decision);
  loss.total = loss.delay_cost + loss.false_alarm_cost + loss.misidentification_cost;
  return loss;
}

void score(RunResult& run, std::size_t theta, std::size_t mu, const CostSpec& costs) {
  run.loss = realized_loss(run.tau, run.decision, theta, mu, costs);
}

std::size_t terminal_decision(const Belief& belief, const CostSpec& costs) {
  return min_terminal_cost(belief.values(), costs).label;
}

namespace {

// Shared driver: checks `stop(n, pi)` before each observation, starting at
// n = 0 with the initial belief.
template <class StopFn, class DecideFn>
RunResult drive(const ModelSpec& model, const CostSpec& costs, SymbolSource& source,
                bool keep_trajectory, StopFn&& stop, DecideFn&& decide) {
  const Belief start = initial_belief(model);
  std::vector<double> pi(start.values().begin(), start.values().end());
  std::vector<double> d(model.M + 1);
  RunResult result;
  std::optional<std::size_t> last_symbol;
  for (std::size_t n = 0;; ++n) {
    const bool halt = stop(n, std::span<const double>(pi));
    if (keep_trajectory) {
      result.trajectory.push_back(
          {n, last_symbol, pi, halt, min_terminal_cost(pi, costs).label});
    }
    if (halt) {
      result.tau = n;
      result.decision = decide(std::span<const double>(pi));
      return result;
    }
    const auto symbol = source.next();
    if (!symbol) throw StreamExhausted(n);
    if (*symbol >= model.alphabet.size) {
      throw std::out_of_range(fmt::format("symbol {} outside alphabet", *symbol));
    }
    const double total = weights_into(pi, *symbol, model, d);
    if (!(total > 0.0)) throw ImpossibleObservation(*symbol);
    for (std::size_t i = 0; i <= model.M; ++i) pi[i] = d[i] / total;
    last_symbol = symbol;
  }
}

}  // namespace

OptimalStrategy::OptimalStrategy(const ModelSpec& model, const CostSpec& costs,
                                 const ValueFunction& vf, std::optional<double> stop_tolerance)
    : model_(&model),
      costs_(&costs),
      vf_(&vf),
      stop_tolerance_(stop_tolerance.value_or(default_stop_tolerance(costs))) {
  if (vf.grid->dimension() != model.M) {
    throw std::invalid_argument("value function dimension does not match the model");
  }
}

bool OptimalStrategy::stops_at(std::span<const double> pi) const {
  const double h = min_terminal_cost(pi, *costs_).value;
  const double running = costs_->c * (1.0 - pi[0]);
  if (h <= running) return true;
  return stop_test(h, running, continuation_value(*vf_, *model_, *costs_, pi), stop_tolerance_);
}

RunResult OptimalStrategy::run(SymbolSource& source, bool keep_trajectory) const {
  return drive(
      *model_, *costs_, source, keep_trajectory,
      [&](std::size_t, std::span<const double> pi) { return stops_at(pi); },
      [&](std::span<const double> pi) { return min_terminal_cost(pi, *costs_).label; });
}

TruncatedStrategy::TruncatedStrategy(const ModelSpec& model, const CostSpec& costs,
                                     const SimplexGrid& grid,
                                     std::span<const RegionSnapshot> snapshots, std::size_t horizon)
    : model_(&model), costs_(&costs), grid_(&grid), snapshots_(snapshots), horizon_(horizon) {
  if (horizon > 0 && snapshots.empty()) {
    throw std::invalid_argument("truncated strategy needs recorded stopping-region snapshots");
  }
}

std::string TruncatedStrategy::name() const { return fmt::format("truncated_N{}", horizon_); }

RunResult TruncatedStrategy::run(SymbolSource& source, bool keep_trajectory) const {
  return drive(
      *model_, *costs_, source, keep_trajectory,
      [&](std::size_t n, std::span<const double> pi) {
        if (n >= horizon_) return true;
        // Snapshots past the last recorded iterate equal the converged region.
        const std::size_t left = std::min(horizon_ - n, snapshots_.size() - 1);
        return snapshots_[left][grid_->nearest(pi)] != 0;
      },
      [&](std::span<const double> pi) { return min_terminal_cost(pi, *costs_).label; });
}

ThresholdStrategy::ThresholdStrategy(const ModelSpec& model, const CostSpec& costs, double threshold)
    : model_(&model), costs_(&costs), threshold_(threshold) {}

std::string ThresholdStrategy::name() const { return fmt::format("threshold_pi0_{}", threshold_); }

RunResult ThresholdStrategy::run(SymbolSource& source, bool keep_trajectory) const {
  return drive(
      *model_, *costs_, source, keep_trajectory,
      [&](std::size_t, std::span<const double> pi) { return pi[0] <= threshold_; },
      [&](std::span<const double> pi) { return min_terminal_cost(pi, *costs_).label; });
}

FixedSampleStrategy::FixedSampleStrategy(const ModelSpec& model, const CostSpec& costs,
                                         std::size_t n, std::optional<std::size_t> decision)
    : model_(&model), costs_(&costs), n_(n), decision_(decision) {
  if (decision && (*decision < 1 || *decision > model.M)) {
    throw std::invalid_argument("fixed decision outside 1..M");
  }
}

std::string FixedSampleStrategy::name() const {
  return decision_ ? fmt::format("fixed_n{}_d{}", n_, *decision_) : fmt::format("fixed_n{}", n_);
}

RunResult FixedSampleStrategy::run(SymbolSource& source, bool keep_trajectory) const {
  return drive(
      *model_, *costs_, source, keep_trajectory,
      [&](std::size_t n, std::span<const double>) { return n >= n_; },
      [&](std::span<const double> pi) {
        return decision_ ? *decision_ : min_terminal_cost(pi, *costs_).label;
      });
}

RunResult run_optimal(const ModelSpec& model, const CostSpec& costs, const ValueFunction& vf,
                      std::span<const std::size_t> observations, bool keep_trajectory) {
  SpanSource source(observations);
  return OptimalStrategy(model, costs, vf).run(source, keep_trajectory);
}

RunResult run_truncated(const ModelSpec& model, const CostSpec& costs, const SimplexGrid& grid,
                        std::span<const RegionSnapshot> snapshots, std::size_t horizon,
                        std::span<const std::size_t> observations, bool keep_trajectory) {
  SpanSource source(observations);
  return TruncatedStrategy(model, costs, grid, snapshots, horizon).run(source, keep_trajectory);
}

}  // namespace qcd
