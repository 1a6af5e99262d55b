#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qcd {

class GridBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Barycentric stencil of one point: M+1 grid vertices and their weights.
/// Vertices carrying zero weight may repeat the base vertex.
struct SimplexCell {
  static constexpr std::size_t kMaxVertices = 16;
  std::size_t count = 0;
  std::int32_t index[kMaxVertices];
  double weight[kMaxVertices];
};

/// Uniform grid {k / G : k_i >= 0, sum k = G} on S^M.
///
/// Points are indexed through the suffix sums s_j = k_j + ... + k_M
/// (j = 1..M), which satisfy G >= s_1 >= ... >= s_M >= 0. Enumeration is
/// lexicographic in (s_1, ..., s_M), so for M = 1 the order runs from e_0 to
/// e_1, and the rank of a chain is sum_j C(s_j + M - j, M - j + 1).
///
/// In s-coordinates the region is a union of Kuhn (Freudenthal) simplices of
/// the unit lattice, which gives the piecewise-linear interpolation used by
/// the solver.
class SimplexGrid {
 public:
  static constexpr std::size_t kDefaultPointBudget = 5'000'000;
  static constexpr std::size_t kMaxDimension = SimplexCell::kMaxVertices - 1;

  SimplexGrid(std::size_t M, std::size_t G, std::size_t point_budget = kDefaultPointBudget);

  std::size_t dimension() const { return M_; }
  std::size_t resolution() const { return G_; }
  std::size_t size() const { return count_; }

  /// Integer composition (k_0, ..., k_M) of point `index`.
  std::span<const std::int32_t> composition(std::size_t index) const {
    return {points_.data() + index * (M_ + 1), M_ + 1};
  }
  /// k / G written into `out` (M+1 entries).
  void coordinates(std::size_t index, std::span<double> out) const;
  std::vector<double> coordinates(std::size_t index) const;

  /// Index of composition k, or nothing if k is not a grid point.
  std::optional<std::size_t> index_of(std::span<const std::int32_t> k) const;

  /// Point reached by moving one 1/G unit from coordinate `from` to `to`.
  std::optional<std::size_t> neighbor(std::size_t index, std::size_t from, std::size_t to) const;

  /// All adjacency pairs (a, b) with a < b. Intended for small grids.
  std::vector<std::pair<std::size_t, std::size_t>> adjacency() const;

  /// Kuhn simplex containing `pi` and its barycentric weights. `pi` is
  /// clamped into the simplex first, so small rounding drift is harmless.
  SimplexCell locate(std::span<const double> pi) const;

  /// Grid point closest to `pi` in suffix-sum coordinates.
  std::size_t nearest(std::span<const double> pi) const;

  /// Number of points for (M, G), saturating at SIZE_MAX.
  static std::size_t point_count(std::size_t M, std::size_t G);

 private:
  std::size_t rank_of_chain(const std::int32_t* s) const;

  std::size_t M_;
  std::size_t G_;
  std::size_t count_;
  std::vector<std::int32_t> points_;
  // binom_[r * (M_ + 2) + c] = C(r, c) for r <= G + M, c <= M + 1.
  std::vector<std::size_t> binom_;
};

}  // namespace qcd
