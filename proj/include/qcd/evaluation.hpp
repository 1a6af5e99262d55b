#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcd/model.hpp"
#include "qcd/strategy.hpp"

namespace qcd {

struct EvaluationOptions {
  std::size_t episodes = 10'000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// Stages after which an episode that has not stopped is an error.
  std::size_t horizon_guard = 100'000;
};

class HorizonGuardTripped : public std::runtime_error {
 public:
  HorizonGuardTripped(std::string strategy, std::vector<std::size_t> episodes);
  const std::vector<std::size_t>& episodes() const { return episodes_; }

 private:
  std::vector<std::size_t> episodes_;
};

struct EpisodeOutcome {
  std::size_t theta = 0;
  std::size_t mu = 1;
  std::size_t tau = 0;
  std::size_t decision = 1;
  RealizedLoss loss;
};

struct RiskEstimate {
  std::string strategy;
  double mean = 0.0;
  double standard_error = 0.0;
  double delay_cost_mean = 0.0;          // c E[(tau - theta)^+]
  double false_alarm_cost_mean = 0.0;    // E[a_{0d} 1{tau < theta}]
  double misidentification_cost_mean = 0.0;  // E[a_{mu d} 1{theta <= tau}]
  double false_alarm_rate = 0.0;
  double misidentification_rate = 0.0;
  double mean_tau = 0.0;
  std::size_t episodes = 0;
  std::uint64_t seed = 0;
};

/// Sum by recursive halving in index order; the result depends only on the
/// input sequence.
double pairwise_sum(std::span<const double> values);

/// Mean and standard error (sample std / sqrt(n)) with pairwise sums.
struct SampleMoments {
  double mean = 0.0;
  double standard_error = 0.0;
};
SampleMoments sample_moments(std::span<const double> values);

/// Runs `strategy` on episodes 0..episodes-1, each fed by
/// ObservationStream(model, episode_seed(seed, id)). Results are indexed by
/// episode and independent of the thread count.
std::vector<EpisodeOutcome> simulate_outcomes(const ModelSpec& model, const CostSpec& costs,
                                              const Strategy& strategy,
                                              const EvaluationOptions& options);

RiskEstimate summarize(const std::string& strategy, std::span<const EpisodeOutcome> outcomes,
                       std::uint64_t seed);

RiskEstimate estimate_risk(const ModelSpec& model, const CostSpec& costs, const Strategy& strategy,
                           const EvaluationOptions& options);

struct DominanceEntry {
  RiskEstimate risk;
  double difference = 0.0;     // alternative - optimal, paired on common streams
  double difference_se = 0.0;  // SE of the paired differences
  double slack = 0.0;          // 3 SE + certified gap + grid delta
  bool pass = false;           // difference >= -slack
};

struct DominanceReport {
  RiskEstimate optimal;
  std::vector<DominanceEntry> entries;
  double certified_gap = 0.0;
  double grid_delta = 0.0;

  bool all_pass() const;
};

/// Compares every alternative against `optimal` on common random numbers.
DominanceReport dominance_check(const ModelSpec& model, const CostSpec& costs,
                                const Strategy& optimal,
                                std::span<const Strategy* const> alternatives,
                                const EvaluationOptions& options, double certified_gap,
                                double grid_delta);

struct StageDiagnostics {
  std::size_t n = 0;
  SampleMoments pi0;       // Pi_n^(0)
  double pi0_bound = 0.0;  // (1-p)^n
  bool pi0_pass = false;   // mean <= bound + 3 SE
  std::vector<SampleMoments> increments;  // Pi_{n+1}^(i) - Pi_n^(i), i = 1..M
  std::vector<bool> increment_pass;       // mean >= -3 SE
};

struct PosteriorDiagnostics {
  std::vector<StageDiagnostics> stages;
  std::size_t episodes = 0;
  std::uint64_t seed = 0;

  bool all_pass() const;
};

PosteriorDiagnostics posterior_diagnostics(const ModelSpec& model, std::size_t episodes,
                                           std::uint64_t seed, std::span<const std::size_t> stages,
                                           std::size_t threads = 1);

/// Monte Carlo check of E[f(Pi_1) | Pi_0 = pi] = (T f)(pi) for a linear f
/// with the given coefficients, X drawn from the predictive distribution.
struct ExpectationCheck {
  double exact = 0.0;
  SampleMoments monte_carlo;
  bool pass = false;  // within 4 SE
};
ExpectationCheck expectation_identity(const ModelSpec& model, const Belief& belief,
                                      std::span<const double> coefficients, std::size_t samples,
                                      std::uint64_t seed);

/// Fraction of episodes with Pi_n^(0) below `level` at stage n.
double dissipation_fraction(const ModelSpec& model, std::size_t episodes, std::uint64_t seed,
                            std::size_t n, double level, std::size_t threads = 1);

// Reports. CSV uses '.' as decimal separator and '\n' line endings.
std::string risk_csv(std::span<const RiskEstimate> estimates);
std::string dominance_csv(const DominanceReport& report);
std::string dominance_text(const DominanceReport& report);
std::string diagnostics_csv(const PosteriorDiagnostics& report);
std::string diagnostics_text(const PosteriorDiagnostics& report);

}  // namespace qcd
