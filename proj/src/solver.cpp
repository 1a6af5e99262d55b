#include "qcd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qcd/parallel.hpp"
#include "qcd/posterior.hpp"

namespace qcd {

namespace {

void require_solvable(const ModelSpec& model, const CostSpec& costs, const SimplexGrid& grid) {
  const auto report = validate(model, costs);
  if (!report.ok()) throw std::invalid_argument("invalid instance: " + report.summary());
  for (std::size_t i = 0; i < model.nu.size(); ++i) {
    if (!(model.nu[i] > 0.0)) {
      throw std::invalid_argument(fmt::format("solver requires nu_{} > 0", i + 1));
    }
  }
  if (grid.dimension() != model.M) {
    throw std::invalid_argument(
        fmt::format("grid dimension {} does not match M = {}", grid.dimension(), model.M));
  }
}

}  // namespace

double certified_gap(const CostSpec& costs, double p, std::size_t N) {
  if (N == 0) return std::numeric_limits<double>::infinity();
  const double hb = h_sup_bound(costs);
  return (hb * hb / costs.c + hb / p) / static_cast<double>(N);
}

std::size_t default_max_iterations(const CostSpec& costs, double p) {
  const double hb = h_sup_bound(costs);
  const double cap = 10.0 * (hb * hb / costs.c + hb / p) / 1e-3;
  if (!(cap < 1e9)) return 1'000'000'000;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cap)));
}

double default_stop_tolerance(const CostSpec& costs) { return 1e-8 * (1.0 + h_sup_bound(costs)); }

double interpolate(const ValueFunction& vf, std::span<const double> pi) {
  const SimplexCell cell = vf.grid->locate(pi);
  double v = 0.0;
  for (std::size_t k = 0; k < cell.count; ++k) {
    v += cell.weight[k] * vf.values[static_cast<std::size_t>(cell.index[k])];
  }
  return v;
}

double interpolate(const ValueFunction& vf, const Belief& belief) {
  return interpolate(vf, belief.values());
}

BellmanOperator::BellmanOperator(const ModelSpec& model, const CostSpec& costs,
                                 const SimplexGrid& grid, kernels::Isa isa, std::size_t threads)
    : grid_(&grid), kernels_(&kernels::table(isa)), threads_(std::max<std::size_t>(threads, 1)) {
  const std::size_t M = model.M;
  const std::size_t K = model.alphabet.size;
  const std::size_t n = grid.size();
  width_ = K * (M + 1);
  stride_ = (n + kernels::kLaneWidth - 1) / kernels::kLaneWidth * kernels::kLaneWidth;
  weights_.assign(width_ * stride_, 0.0);
  indices_.assign(width_ * stride_, 0);
  stop_cost_.resize(n);
  running_cost_.resize(n);
  stop_label_.resize(n);

  parallel_for(n, threads_, kernels::kLaneWidth, [&](std::size_t begin, std::size_t end) {
    std::vector<double> pi(M + 1);
    std::vector<double> d(M + 1);
    for (std::size_t g = begin; g < end; ++g) {
      grid.coordinates(g, pi);
      const auto best = min_terminal_cost(pi, costs);
      stop_cost_[g] = best.value;
      stop_label_[g] = static_cast<std::uint8_t>(best.label);
      running_cost_[g] = costs.c * (1.0 - pi[0]);
      for (std::size_t x = 0; x < K; ++x) {
        const double total = weights_into(pi, x, model, d);
        const std::size_t first = x * (M + 1);
        if (!(total > 0.0)) {
          for (std::size_t k = 0; k <= M; ++k) indices_[(first + k) * stride_ + g] = 0;
          continue;
        }
        for (double& v : d) v /= total;
        const SimplexCell cell = grid.locate(d);
        for (std::size_t k = 0; k <= M; ++k) {
          const std::size_t slot = (first + k) * stride_ + g;
          weights_[slot] = total * cell.weight[k];
          indices_[slot] = cell.index[k];
        }
      }
    }
  });
}

const kernels::StencilView BellmanOperator::stencil() const {
  return {width_, stride_, weights_.data(), indices_.data()};
}

void BellmanOperator::continuation(std::span<const double> values, std::span<double> cont) const {
  const auto view = stencil();
  parallel_for(grid_->size(), threads_, kernels::kLaneWidth, [&](std::size_t begin, std::size_t end) {
    kernels_->accumulate(view, begin, end, values.data(), running_cost_.data(), cont.data());
  });
}

double BellmanOperator::apply(std::span<const double> prev, std::span<double> next,
                              std::span<double> cont) const {
  const auto view = stencil();
  const std::size_t n = grid_->size();
  // Max is order independent, so the result does not depend on the chunking.
  std::vector<double> deltas(chunk_count(n, threads_, kernels::kLaneWidth), 0.0);
  parallel_chunks(n, threads_, kernels::kLaneWidth,
                  [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                    kernels_->accumulate(view, begin, end, prev.data(), running_cost_.data(),
                                         cont.data());
                    deltas[chunk] = kernels_->relax(begin, end, stop_cost_.data(), cont.data(),
                                                    prev.data(), next.data());
                  });
  double delta = 0.0;
  for (double d : deltas) {
    if (std::isnan(d)) return d;
    delta = std::max(delta, d);
  }
  return delta;
}

std::vector<double> bellman(std::span<const double> prev, const ModelSpec& model,
                            const CostSpec& costs, const SimplexGrid& grid) {
  if (prev.size() != grid.size()) throw std::invalid_argument("value vector does not match grid");
  const BellmanOperator op(model, costs, grid);
  std::vector<double> next(grid.size());
  std::vector<double> cont(grid.size());
  op.apply(prev, next, cont);
  return next;
}

bool stop_test(double h, double running_cost, double continuation, double stop_tolerance) {
  return h <= running_cost || h <= continuation + stop_tolerance;
}

namespace {

RegionSnapshot snapshot_from(const BellmanOperator& op, std::span<const double> cont,
                             double stop_tolerance) {
  const auto h = op.stop_cost();
  const auto run = op.running_cost();
  const auto label = op.stop_label();
  RegionSnapshot snap(h.size());
  for (std::size_t g = 0; g < h.size(); ++g) {
    snap[g] = stop_test(h[g], run[g], cont[g], stop_tolerance) ? label[g] : 0;
  }
  return snap;
}

}  // namespace

ValueFunction value_iterate(const ModelSpec& model, const CostSpec& costs,
                            std::shared_ptr<const SimplexGrid> grid, const SolverOptions& options) {
  require_solvable(model, costs, *grid);
  const BellmanOperator op(model, costs, *grid, options.isa.value_or(kernels::detect()),
                           options.threads);
  const double stop_tolerance = options.stop_tolerance.value_or(default_stop_tolerance(costs));
  const std::size_t n = grid->size();

  ValueFunction vf;
  vf.grid = grid;
  vf.h_bound = h_sup_bound(costs);
  vf.values.assign(op.stop_cost().begin(), op.stop_cost().end());
  if (options.record_snapshots) {
    vf.snapshots.emplace_back(op.stop_label().begin(), op.stop_label().end());
  }

  const bool fixed = options.fixed_iterations.has_value();
  const std::size_t cap =
      fixed ? *options.fixed_iterations
            : options.max_iterations.value_or(default_max_iterations(costs, model.p));

  std::vector<double> next(n);
  std::vector<double> cont(n);
  double delta = 0.0;
  std::size_t iterations = 0;
  bool converged = fixed;
  while (iterations < cap) {
    delta = op.apply(vf.values, next, cont);
    ++iterations;
    if (!std::isfinite(delta)) {
      throw NonFiniteValue(fmt::format("non-finite value at iteration {}", iterations));
    }
    if (options.record_snapshots) vf.snapshots.push_back(snapshot_from(op, cont, stop_tolerance));
    vf.values.swap(next);
    if (!fixed && delta <= options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw IterationBudgetExceeded(fmt::format(
        "value iteration did not reach tolerance {:g} within {} iterations (last delta {:g})",
        options.tolerance, cap, delta));
  }
  vf.iteration_count = iterations;
  vf.final_delta = iterations == 0 ? std::numeric_limits<double>::infinity() : delta;
  vf.certified_gap = certified_gap(costs, model.p, iterations);
  return vf;
}

double bellman_residual(const ValueFunction& vf, const ModelSpec& model, const CostSpec& costs) {
  const BellmanOperator op(model, costs, *vf.grid);
  std::vector<double> next(vf.values.size());
  std::vector<double> cont(vf.values.size());
  return op.apply(vf.values, next, cont);
}

double continuation_value(const ValueFunction& vf, const ModelSpec& model, const CostSpec& costs,
                          std::span<const double> pi) {
  const double expected = apply_T(
      [&](std::span<const double> post) { return interpolate(vf, post); }, pi, model);
  return costs.c * (1.0 - pi[0]) + expected;
}

std::uint32_t tie_mask(std::span<const double> pi, const CostSpec& costs) {
  const auto best = min_terminal_cost(pi, costs);
  const double tol = 1e-12 * (1.0 + h_sup_bound(costs));
  std::uint32_t mask = 0;
  for (std::size_t j = 1; j < pi.size(); ++j) {
    if (terminal_cost(pi, costs, j) <= best.value + tol) mask |= 1U << (j - 1);
  }
  return mask;
}

Policy extract_policy(const ValueFunction& vf, const ModelSpec& model, const CostSpec& costs,
                      std::optional<double> stop_tolerance) {
  require_solvable(model, costs, *vf.grid);
  const BellmanOperator op(model, costs, *vf.grid);
  const std::size_t n = vf.grid->size();
  std::vector<double> cont(n);
  op.continuation(vf.values, cont);

  Policy policy;
  policy.grid = vf.grid;
  policy.stop_tolerance = stop_tolerance.value_or(default_stop_tolerance(costs));
  policy.iteration_count = vf.iteration_count;
  policy.certified_gap = vf.certified_gap;
  policy.snapshots = vf.snapshots;
  policy.verdicts = snapshot_from(op, cont, policy.stop_tolerance);
  policy.stop_sets.assign(n, 0);
  std::vector<double> pi(model.M + 1);
  for (std::size_t g = 0; g < n; ++g) {
    if (!policy.verdicts[g]) continue;
    vf.grid->coordinates(g, pi);
    policy.stop_sets[g] = tie_mask(pi, costs);
  }
  return policy;
}

}  // namespace qcd
