#include "qcd/export.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "qcd/projection.hpp"

namespace qcd {

namespace {

std::size_t first_label(const Policy& policy, std::size_t g) {
  if (!policy.stops(g)) return 0;
  const std::size_t M = policy.grid->dimension();
  for (std::size_t j = 1; j <= M; ++j) {
    if (policy.in_region(g, j)) return j;
  }
  return policy.verdicts[g];
}

ProjectedPoint project(const std::vector<double>& pi) {
  return pi.size() == 3 ? project2(Belief(pi)) : project3(Belief(pi));
}

}  // namespace

std::string policy_csv(const ValueFunction& vf, const Policy& policy) {
  const SimplexGrid& grid = *vf.grid;
  const std::size_t M = grid.dimension();
  std::string out;
  for (std::size_t i = 0; i <= M; ++i) out += fmt::format("k_{},", i);
  out += "value,verdict,label\n";
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (const auto k : grid.composition(g)) out += fmt::format("{},", k);
    out += fmt::format("{},{},{}\n", vf.values[g], policy.verdicts[g], first_label(policy, g));
  }
  return out;
}

std::string raster_csv(const Policy& policy) {
  const SimplexGrid& grid = *policy.grid;
  const std::size_t M = grid.dimension();
  std::string out;
  if (M == 2) {
    out += "x,y";
  } else if (M == 3) {
    out += "x,y,z";
  } else {
    for (std::size_t i = 0; i <= M; ++i) out += fmt::format("{}pi_{}", i ? "," : "", i);
  }
  out += ",verdict";
  for (std::size_t j = 1; j <= M; ++j) out += fmt::format(",in_{}", j);
  out += '\n';

  std::vector<double> pi(M + 1);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    grid.coordinates(g, pi);
    if (M == 2 || M == 3) {
      const auto p = project(pi);
      out += fmt::format("{},{}", p.x(), p.y());
      if (M == 3) out += fmt::format(",{}", p.z());
    } else {
      for (std::size_t i = 0; i <= M; ++i) out += fmt::format("{}{}", i ? "," : "", pi[i]);
    }
    out += fmt::format(",{}", policy.verdicts[g]);
    for (std::size_t j = 1; j <= M; ++j) {
      out += policy.stops(g) && policy.in_region(g, j) ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

std::string region_svg(const Policy& policy, const CostSpec& costs,
                       std::span<const TrajectoryPoint> path) {
  const SimplexGrid& grid = *policy.grid;
  if (grid.dimension() != 2) {
    throw UnsupportedDimension(
        fmt::format("SVG output needs M = 2, got M = {}; use the raster CSV", grid.dimension()));
  }
  constexpr double kScale = 500.0;
  constexpr double kMargin = 20.0;
  const double width = 2.0 / std::sqrt(3.0) * kScale + 2 * kMargin;
  const double height = kScale + 2 * kMargin;
  auto sx = [&](double x) { return kMargin + kScale * x; };
  auto sy = [&](double y) { return kMargin + kScale * (1.0 - y); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.1f}\" "
      "height=\"{:.1f}\" viewBox=\"0 0 {:.1f} {:.1f}\">\n",
      width, height, width, height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Each grid point is drawn as a dot of the lattice spacing; points in both
  // regions (on the tie locus) get the darker colour.
  const double radius = 0.62 * kScale / static_cast<double>(grid.resolution());
  const std::array<const char*, 4> fill{"", "#9ecae1", "#fdae6b", "#8c6bb1"};
  std::array<std::string, 4> layers;
  std::vector<double> pi(3);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!policy.stops(g)) continue;
    const std::size_t kind = (policy.in_region(g, 1) ? 1 : 0) | (policy.in_region(g, 2) ? 2 : 0);
    if (kind == 0) continue;
    grid.coordinates(g, pi);
    const auto p = project2(Belief(pi));
    layers[kind] += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\"/>\n", sx(p.x()),
                                sy(p.y()), radius);
  }
  const std::array<const char*, 4> id{"", "gamma1", "gamma2", "gamma12"};
  for (std::size_t kind = 1; kind < 4; ++kind) {
    out += fmt::format("<g id=\"{}\" fill=\"{}\" stroke=\"none\">\n", id[kind], fill[kind]);
    out += layers[kind];
    out += "</g>\n";
  }

  // h_1 - h_2 is linear in pi; its zero set meets the triangle in a segment.
  const double a01 = costs.terminal(0, 1), a02 = costs.terminal(0, 2);
  const double a21 = costs.terminal(2, 1), a12 = costs.terminal(1, 2);
  const std::array<double, 3> g{a01 - a02, -a12, a21};  // (h_1 - h_2)(e_i)
  std::vector<ProjectedPoint> ends;
  const std::array<ProjectedPoint, 3> corners{project2(Belief::vertex(2, 0)),
                                              project2(Belief::vertex(2, 1)),
                                              project2(Belief::vertex(2, 2))};
  for (std::size_t a = 0; a < 3; ++a) {
    const std::size_t b = (a + 1) % 3;
    if (g[a] == 0.0) ends.push_back(corners[a]);
    if ((g[a] < 0.0 && g[b] > 0.0) || (g[a] > 0.0 && g[b] < 0.0)) {
      const double t = g[a] / (g[a] - g[b]);
      ProjectedPoint q;
      for (std::size_t k = 0; k < 2; ++k) {
        q.coords[k] = (1 - t) * corners[a].coords[k] + t * corners[b].coords[k];
      }
      ends.push_back(q);
    }
  }
  if (ends.size() >= 2) {
    out += fmt::format(
        "<line id=\"tie-locus\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
        "stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n",
        sx(ends[0].x()), sy(ends[0].y()), sx(ends[1].x()), sy(ends[1].y()));
  }

  out += fmt::format(
      "<polygon id=\"simplex\" points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" "
      "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
      sx(corners[0].x()), sy(corners[0].y()), sx(corners[1].x()), sy(corners[1].y()),
      sx(corners[2].x()), sy(corners[2].y()));

  if (!path.empty()) {
    out += "<polyline id=\"sample-path\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto p = project2(Belief(path[k].pi));
      out += fmt::format("{}{:.2f},{:.2f}", k ? " " : "", sx(p.x()), sy(p.y()));
    }
    out += "\"/>\n";
    const auto last = project2(Belief(path.back().pi));
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"#d62728\"/>\n",
                       sx(last.x()), sy(last.y()));
  }
  out += "</svg>\n";
  return out;
}

std::string trajectory_csv_header(std::size_t M) {
  std::string out = "episode,n,symbol";
  for (std::size_t i = 0; i <= M; ++i) out += fmt::format(",pi_{}", i);
  out += ",stop,label\n";
  return out;
}

std::string trajectory_csv_rows(std::size_t episode, std::span<const TrajectoryPoint> path) {
  std::string out;
  for (const auto& pt : path) {
    out += fmt::format("{},{},", episode, pt.n);
    if (pt.symbol) out += fmt::format("{}", *pt.symbol);
    for (const double v : pt.pi) out += fmt::format(",{}", v);
    out += fmt::format(",{},{}\n", pt.stop ? 1 : 0, pt.label);
  }
  return out;
}

std::string outcomes_csv(std::span<const EpisodeOutcome> outcomes) {
  std::string out =
      "episode,theta,mu,tau,decision,delay_cost,false_alarm_cost,misidentification_cost,loss\n";
  for (std::size_t e = 0; e < outcomes.size(); ++e) {
    const auto& o = outcomes[e];
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", e, o.theta, o.mu, o.tau, o.decision,
                       o.loss.delay_cost, o.loss.false_alarm_cost, o.loss.misidentification_cost,
                       o.loss.total);
  }
  return out;
}

}  // namespace qcd
