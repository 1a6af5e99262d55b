#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcd/grid.hpp"
#include "qcd/solver.hpp"

namespace qcd {

struct RegionStats {
  std::size_t points = 0;
  /// Components with at least two points. Single-point components are one-cell
  /// resolution jitter (typically at a cusp) and are counted separately,
  /// unless the set has nothing else.
  std::size_t components = 0;
  std::size_t isolated_points = 0;
  /// Grid lines meeting the set, and how many of those meet it in more than
  /// one run once single-cell gaps are closed. Zero for the continuation set.
  std::size_t lines_checked = 0;
  std::size_t non_convex_lines = 0;

  bool convex_on_grid() const { return non_convex_lines == 0; }
};

/// M = 1 only: whether the stopping set is {pi_0 <= threshold} on the grid.
struct IntervalCheck {
  bool is_interval = false;
  double threshold = 0.0;
};

struct RegionReport {
  std::vector<RegionStats> per_label;  // Gamma^(1) .. Gamma^(M)
  RegionStats stopping;                // Gamma
  RegionStats continuation;            // complement of Gamma
  std::optional<IntervalCheck> interval;
};

using Membership = std::function<bool(std::size_t)>;

/// Sizes of the connected components of a grid subset under the
/// move-one-unit adjacency, in order of their lowest index.
std::vector<std::size_t> component_sizes(const SimplexGrid& grid, const Membership& member);
std::size_t count_components(const SimplexGrid& grid, const Membership& member);

/// Walks every grid line (directions e_a - e_b) and counts lines on which the
/// subset forms more than one run after closing gaps of a single cell.
/// Returns (lines meeting the subset, offending lines).
std::pair<std::size_t, std::size_t> grid_line_convexity(const SimplexGrid& grid,
                                                        const Membership& member);

RegionReport region_analysis(const Policy& policy);

/// Human-readable report, one statement per line.
std::string describe(const RegionReport& report);

}  // namespace qcd
