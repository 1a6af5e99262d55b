#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qcd {

/// Tolerance on the unit sum of pmfs and of the hypothesis prior.
inline constexpr double kStochasticTolerance = 1e-12;
/// Tolerance on the unit sum of a belief before renormalization.
inline constexpr double kBeliefTolerance = 1e-9;

/// Finite observation space; symbols are the indices 0..size-1.
struct ObservationAlphabet {
  std::size_t size = 0;
};

/// Generative model: zero-modified geometric change time with parameters
/// (p0, p), change index drawn from nu, and i.i.d. observations drawn from
/// f[0] before the change and from f[mu] from the change time on.
struct ModelSpec {
  ObservationAlphabet alphabet;
  std::size_t M = 0;
  double p0 = 0.0;
  double p = 0.0;
  std::vector<double> nu;              // length M, nu[i-1] is the prior of hypothesis i
  std::vector<std::vector<double>> f;  // M+1 pmfs over the alphabet
};

/// Delay cost per stage and the (M+1) x M terminal cost matrix.
/// Row i = 0 is the false-alarm row; column j-1 is the decision "j".
struct CostSpec {
  double c = 0.0;
  std::vector<std::vector<double>> a;

  double terminal(std::size_t i, std::size_t j) const { return a[i][j - 1]; }
};

struct ValidationIssue {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const;
  bool has_warnings() const;
  std::string summary() const;
};

/// Reports every violated invariant of the instance instead of stopping at
/// the first one. A zero entry of nu is a warning: sampling tolerates it,
/// the solver does not.
ValidationReport validate(const ModelSpec& model, const CostSpec& costs);
ValidationReport validate(const ModelSpec& model);

/// A point of the probability simplex S^M, stored as (pi_0, pi_1, ..., pi_M).
class Belief {
 public:
  /// Renormalizes when the entries sum to 1 within kBeliefTolerance and
  /// throws std::invalid_argument otherwise, or on a negative entry.
  explicit Belief(std::vector<double> pi);

  static Belief vertex(std::size_t M, std::size_t j);

  std::size_t dimension() const { return pi_.size() - 1; }
  std::span<const double> values() const { return pi_; }
  double operator[](std::size_t i) const { return pi_[i]; }

  friend bool operator==(const Belief&, const Belief&) = default;

 private:
  std::vector<double> pi_;
};

/// (1 - p0, p0 nu_1, ..., p0 nu_M).
Belief initial_belief(const ModelSpec& model);

struct TerminalCosts {
  std::vector<double> per_label;  // h_1..h_M
  double minimum = 0.0;           // h
  std::size_t label = 1;          // lowest index attaining the minimum
};

/// h_j(pi) = sum_i pi_i a_ij and their minimum.
TerminalCosts terminal_costs(const Belief& belief, const CostSpec& costs);

/// Allocation-free variant for inner loops; returns (h, label).
struct MinCost {
  double value;
  std::size_t label;
};
MinCost min_terminal_cost(std::span<const double> pi, const CostSpec& costs);
double terminal_cost(std::span<const double> pi, const CostSpec& costs, std::size_t j);

/// min_j max_i a_ij. Dominates sup h on the whole simplex, since h <= h_j and
/// h_j is linear with vertex values a_ij.
double h_sup_bound(const CostSpec& costs);

}  // namespace qcd
