#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcd/model.hpp"
#include "qcd/posterior.hpp"
#include "qcd/solver.hpp"

namespace qcd {

class StreamExhausted : public std::runtime_error {
 public:
  explicit StreamExhausted(std::size_t stage);
  std::size_t stage() const { return stage_; }

 private:
  std::size_t stage_;
};

/// Loss of one stopped episode: c (tau - theta)^+ + a_{0d} 1{tau < theta}
/// + a_{mu d} 1{theta <= tau}.
struct RealizedLoss {
  std::size_t delay = 0;  // (tau - theta)^+
  bool false_alarm = false;
  bool misidentified = false;
  double delay_cost = 0.0;
  double false_alarm_cost = 0.0;
  double misidentification_cost = 0.0;
  double total = 0.0;
};

RealizedLoss realized_loss(std::size_t tau, std::size_t decision, std::size_t theta, std::size_t mu,
                           const CostSpec& costs);

struct TrajectoryPoint {
  std::size_t n = 0;
  std::optional<std::size_t> symbol;  // X_n; none at n = 0
  std::vector<double> pi;
  bool stop = false;
  std::size_t label = 0;  // argmin_j h_j(pi)
};

struct RunResult {
  std::size_t tau = 0;
  std::size_t decision = 1;
  std::vector<TrajectoryPoint> trajectory;  // filled when requested
  std::optional<RealizedLoss> loss;         // filled by score()
};

/// Attaches the realized loss for the given truth.
void score(RunResult& run, std::size_t theta, std::size_t mu, const CostSpec& costs);

/// Lowest-index argmin of h_j.
std::size_t terminal_decision(const Belief& belief, const CostSpec& costs);

/// A sequential strategy (tau, d) driven by the posterior process.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  /// Runs from the initial belief; throws StreamExhausted or
  /// ImpossibleObservation.
  virtual RunResult run(SymbolSource& source, bool keep_trajectory = false) const = 0;
};

/// sigma = first n with Pi_n in Gamma, decided at the exact belief by the
/// Bellman residual against the interpolated value function; d* = argmin h_j.
class OptimalStrategy : public Strategy {
 public:
  OptimalStrategy(const ModelSpec& model, const CostSpec& costs, const ValueFunction& vf,
                  std::optional<double> stop_tolerance = std::nullopt);
  std::string name() const override { return "optimal"; }
  RunResult run(SymbolSource& source, bool keep_trajectory = false) const override;

  bool stops_at(std::span<const double> pi) const;

 private:
  const ModelSpec* model_;
  const CostSpec* costs_;
  const ValueFunction* vf_;
  double stop_tolerance_;
};

/// sigma_N = first n with Pi_n in Gamma_{N-n}, membership by the verdict of
/// the nearest grid point. Always stops by stage N.
class TruncatedStrategy : public Strategy {
 public:
  TruncatedStrategy(const ModelSpec& model, const CostSpec& costs, const SimplexGrid& grid,
                    std::span<const RegionSnapshot> snapshots, std::size_t horizon);
  std::string name() const override;
  RunResult run(SymbolSource& source, bool keep_trajectory = false) const override;

 private:
  const ModelSpec* model_;
  const CostSpec* costs_;
  const SimplexGrid* grid_;
  std::span<const RegionSnapshot> snapshots_;
  std::size_t horizon_;
};

/// Stops the first time pi_0 <= threshold and announces argmin h_j.
class ThresholdStrategy : public Strategy {
 public:
  ThresholdStrategy(const ModelSpec& model, const CostSpec& costs, double threshold);
  std::string name() const override;
  RunResult run(SymbolSource& source, bool keep_trajectory = false) const override;

 private:
  const ModelSpec* model_;
  const CostSpec* costs_;
  double threshold_;
};

/// Stops after exactly n observations; announces `decision` if given, else
/// argmin h_j.
class FixedSampleStrategy : public Strategy {
 public:
  FixedSampleStrategy(const ModelSpec& model, const CostSpec& costs, std::size_t n,
                      std::optional<std::size_t> decision = std::nullopt);
  std::string name() const override;
  RunResult run(SymbolSource& source, bool keep_trajectory = false) const override;

 private:
  const ModelSpec* model_;
  const CostSpec* costs_;
  std::size_t n_;
  std::optional<std::size_t> decision_;
};

RunResult run_optimal(const ModelSpec& model, const CostSpec& costs, const ValueFunction& vf,
                      std::span<const std::size_t> observations, bool keep_trajectory = false);

RunResult run_truncated(const ModelSpec& model, const CostSpec& costs, const SimplexGrid& grid,
                        std::span<const RegionSnapshot> snapshots, std::size_t horizon,
                        std::span<const std::size_t> observations, bool keep_trajectory = false);

}  // namespace qcd
