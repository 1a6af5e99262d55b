#include "qcd/regions.hpp"

#include <fmt/format.h>

namespace qcd {

std::vector<std::size_t> component_sizes(const SimplexGrid& grid, const Membership& member) {
  const std::size_t n = grid.size();
  const std::size_t M = grid.dimension();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> sizes;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start] || !member(start)) continue;
    sizes.push_back(0);
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      ++sizes.back();
      for (std::size_t from = 0; from <= M; ++from) {
        for (std::size_t to = 0; to <= M; ++to) {
          const auto nb = grid.neighbor(cur, from, to);
          if (!nb || seen[*nb] || !member(*nb)) continue;
          seen[*nb] = 1;
          stack.push_back(*nb);
        }
      }
    }
  }
  return sizes;
}

std::size_t count_components(const SimplexGrid& grid, const Membership& member) {
  return component_sizes(grid, member).size();
}

std::pair<std::size_t, std::size_t> grid_line_convexity(const SimplexGrid& grid,
                                                        const Membership& member) {
  const std::size_t M = grid.dimension();
  std::size_t lines = 0;
  std::size_t offending = 0;
  std::vector<char> run;
  for (std::size_t a = 0; a <= M; ++a) {
    for (std::size_t b = a + 1; b <= M; ++b) {
      // A line in direction e_a - e_b starts where k_a = 0.
      for (std::size_t start = 0; start < grid.size(); ++start) {
        if (grid.composition(start)[a] != 0) continue;
        run.clear();
        std::optional<std::size_t> cur = start;
        while (cur) {
          run.push_back(member(*cur) ? 1 : 0);
          cur = grid.neighbor(*cur, b, a);
        }
        std::size_t runs = 0;
        bool inside = false;
        for (std::size_t i = 0; i < run.size(); ++i) {
          const bool gap_fill = !run[i] && i > 0 && i + 1 < run.size() && run[i - 1] && run[i + 1];
          const bool on = run[i] || gap_fill;
          if (on && !inside) ++runs;
          inside = on;
        }
        if (runs > 0) ++lines;
        if (runs > 1) ++offending;
      }
    }
  }
  return {lines, offending};
}

namespace {

RegionStats stats_for(const SimplexGrid& grid, const Membership& member, bool check_lines) {
  RegionStats stats;
  for (std::size_t g = 0; g < grid.size(); ++g) stats.points += member(g) ? 1 : 0;
  const auto sizes = component_sizes(grid, member);
  for (const std::size_t size : sizes) {
    if (size > 1) {
      ++stats.components;
    } else {
      ++stats.isolated_points;
    }
  }
  // A set made only of isolated cells still counts each of them.
  if (stats.components == 0) {
    stats.components = stats.isolated_points;
    stats.isolated_points = 0;
  }
  if (check_lines) {
    const auto [lines, bad] = grid_line_convexity(grid, member);
    stats.lines_checked = lines;
    stats.non_convex_lines = bad;
  }
  return stats;
}

}  // namespace

RegionReport region_analysis(const Policy& policy) {
  const SimplexGrid& grid = *policy.grid;
  const std::size_t M = grid.dimension();
  RegionReport report;
  for (std::size_t j = 1; j <= M; ++j) {
    report.per_label.push_back(stats_for(
        grid, [&](std::size_t g) { return policy.stops(g) && policy.in_region(g, j); }, true));
  }
  report.stopping = stats_for(grid, [&](std::size_t g) { return policy.stops(g); }, false);
  report.continuation = stats_for(grid, [&](std::size_t g) { return !policy.stops(g); }, false);

  if (M == 1) {
    // Index order runs from e_0 (pi_0 = 1) to e_1 (pi_0 = 0); an interval
    // {pi_0 <= t} is a suffix of the index range.
    IntervalCheck check;
    std::size_t first = grid.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (policy.stops(g)) {
        first = g;
        break;
      }
    }
    check.is_interval = first < grid.size();
    for (std::size_t g = first; g < grid.size(); ++g) check.is_interval &= policy.stops(g);
    if (first < grid.size()) check.threshold = grid.coordinates(first)[0];
    report.interval = check;
  }
  return report;
}

std::string describe(const RegionReport& report) {
  std::string out;
  for (std::size_t j = 0; j < report.per_label.size(); ++j) {
    const auto& s = report.per_label[j];
    out += fmt::format("stop_region_{}: points={} components={} isolated_points={} grid_lines={} non_convex_lines={}\n",
                       j + 1, s.points, s.components, s.isolated_points, s.lines_checked, s.non_convex_lines);
  }
  for (const auto& [name, s] : {std::pair{"stopping_region", &report.stopping},
                                 std::pair{"continuation_region", &report.continuation}}) {
    out += fmt::format("{}: points={} components={} isolated_points={} {}\n", name, s->points,
                       s->components, s->isolated_points,
                       s->components <= 1 ? "connected" : "disconnected");
  }
  if (report.interval) {
    if (report.interval->is_interval) {
      out += fmt::format("stopping set is an interval [0, {}] in pi_0\n", report.interval->threshold);
    } else {
      out += "stopping set is not an interval in pi_0\n";
    }
  }
  return out;
}

}  // namespace qcd
