#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qcd/grid.hpp"
#include "qcd/kernels.hpp"
#include "qcd/model.hpp"

namespace qcd {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value iteration hit its iteration cap before reaching the tolerance.
class IterationBudgetExceeded : public SolverError {
 public:
  using SolverError::SolverError;
};

class NonFiniteValue : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Stopping region of a truncated problem on the grid: 0 = continue,
/// j >= 1 = stop and announce j.
using RegionSnapshot = std::vector<std::uint8_t>;

struct SolverOptions {
  /// Run exactly this many iterations (V^N = M^N h) instead of a tolerance.
  std::optional<std::size_t> fixed_iterations;
  /// Sup-norm change between successive iterates that ends the iteration.
  double tolerance = 1e-6;
  /// Iteration cap in tolerance mode; defaults to default_max_iterations().
  std::optional<std::size_t> max_iterations;
  /// Record Gamma_0 .. Gamma_N for the truncated strategies.
  bool record_snapshots = false;
  /// Stop tolerance used for snapshots; defaults to default_stop_tolerance().
  std::optional<double> stop_tolerance;
  std::size_t threads = 1;
  std::optional<kernels::Isa> isa;
};

struct ValueFunction {
  std::shared_ptr<const SimplexGrid> grid;
  std::vector<double> values;
  std::size_t iteration_count = 0;
  /// Upper bound on sup |V^N - V| for the N performed.
  double certified_gap = 0.0;
  /// sup |V^N - V^{N-1}| of the last iteration.
  double final_delta = 0.0;
  double h_bound = 0.0;
  std::vector<RegionSnapshot> snapshots;
};

/// (|h|^2 / c + |h| / p) / N with |h| replaced by h_sup_bound; +inf for N = 0.
double certified_gap(const CostSpec& costs, double p, std::size_t N);

/// 10 (|h|^2 / c + |h| / p) / 1e-3, at least 1.
std::size_t default_max_iterations(const CostSpec& costs, double p);

/// 1e-8 (1 + |h|).
double default_stop_tolerance(const CostSpec& costs);

/// Piecewise-linear interpolation on the Kuhn triangulation of the grid.
double interpolate(const ValueFunction& vf, std::span<const double> pi);
double interpolate(const ValueFunction& vf, const Belief& belief);

/// The operator M on grid functions,
///   (M f)(pi) = min{ h(pi), c (1 - pi_0) + (T f~)(pi) },
/// with f~ the interpolant of f. Since the posterior of a grid point under
/// each symbol does not depend on f, T is precomputed once as a gather
/// stencil of K (M+1) weighted grid indices per point.
class BellmanOperator {
 public:
  BellmanOperator(const ModelSpec& model, const CostSpec& costs, const SimplexGrid& grid,
                  kernels::Isa isa = kernels::detect(), std::size_t threads = 1);

  const SimplexGrid& grid() const { return *grid_; }
  std::span<const double> stop_cost() const { return stop_cost_; }
  std::span<const double> running_cost() const { return running_cost_; }
  std::span<const std::uint8_t> stop_label() const { return stop_label_; }
  const kernels::StencilView stencil() const;
  kernels::Isa isa() const { return kernels_->isa; }

  /// cont = c (1 - pi_0) + T values.
  void continuation(std::span<const double> values, std::span<double> cont) const;

  /// next = min(h, cont) with cont from `prev`; returns sup |next - prev|.
  double apply(std::span<const double> prev, std::span<double> next, std::span<double> cont) const;

 private:
  const SimplexGrid* grid_;
  const kernels::KernelTable* kernels_;
  std::size_t threads_;
  std::size_t width_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> weights_;
  std::vector<std::int32_t> indices_;
  std::vector<double> stop_cost_;
  std::vector<double> running_cost_;
  std::vector<std::uint8_t> stop_label_;
};

/// One application of M to grid values `prev`.
std::vector<double> bellman(std::span<const double> prev, const ModelSpec& model,
                            const CostSpec& costs, const SimplexGrid& grid);

/// Value iteration from V^0 = h. Iterates are pointwise nonincreasing.
ValueFunction value_iterate(const ModelSpec& model, const CostSpec& costs,
                            std::shared_ptr<const SimplexGrid> grid,
                            const SolverOptions& options = {});

/// sup over the grid of |V - M V|.
double bellman_residual(const ValueFunction& vf, const ModelSpec& model, const CostSpec& costs);

/// c (1 - pi_0) + (T V~)(pi) at an arbitrary belief.
double continuation_value(const ValueFunction& vf, const ModelSpec& model, const CostSpec& costs,
                          std::span<const double> pi);

/// Stop rule shared by the policy and the online strategy: stop when
/// h <= c (1 - pi_0), which lies inside Gamma analytically, or when
/// h <= continuation + stop_tolerance.
bool stop_test(double h, double running_cost, double continuation, double stop_tolerance);

struct Policy {
  std::shared_ptr<const SimplexGrid> grid;
  /// 0 = continue, j = Stop(j).
  std::vector<std::uint8_t> verdicts;
  /// For stop points, bit j-1 is set when h_j attains h within tie tolerance;
  /// this is membership in Gamma^(j).
  std::vector<std::uint32_t> stop_sets;
  std::vector<RegionSnapshot> snapshots;
  std::size_t iteration_count = 0;
  double certified_gap = 0.0;
  double stop_tolerance = 0.0;

  bool stops(std::size_t index) const { return verdicts[index] != 0; }
  bool in_region(std::size_t index, std::size_t j) const {
    return (stop_sets[index] >> (j - 1)) & 1U;
  }
};

/// Membership mask of labels attaining min_j h_j within 1e-12 (1 + |h|).
std::uint32_t tie_mask(std::span<const double> pi, const CostSpec& costs);

Policy extract_policy(const ValueFunction& vf, const ModelSpec& model, const CostSpec& costs,
                      std::optional<double> stop_tolerance = std::nullopt);

}  // namespace qcd
