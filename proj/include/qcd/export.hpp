#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "qcd/evaluation.hpp"
#include "qcd/model.hpp"
#include "qcd/posterior.hpp"
#include "qcd/solver.hpp"
#include "qcd/strategy.hpp"

namespace qcd {

class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// All CSV below: header row, ',' separator, '.' decimals, '\n' line endings,
// reals in shortest round-trip form.

/// k_0..k_M,value,verdict,label. `label` is the lowest index in Gamma^(j)
/// for stop points and 0 otherwise.
std::string policy_csv(const ValueFunction& vf, const Policy& policy);

/// One row per grid point. M = 2: x,y; M = 3: x,y,z; other M: pi_0..pi_M.
/// Then verdict,in_1..in_M (membership in Gamma^(j)).
std::string raster_csv(const Policy& policy);

/// SVG 1.1 picture of Gamma^(1) and Gamma^(2) in the plane for M = 2, with
/// the h_1 = h_2 locus dashed and an optional sample path overlaid.
std::string region_svg(const Policy& policy, const CostSpec& costs,
                       std::span<const TrajectoryPoint> path = {});

std::string trajectory_csv_header(std::size_t M);
/// episode,n,symbol,pi_0..pi_M,stop,label. `symbol` is empty at n = 0.
std::string trajectory_csv_rows(std::size_t episode, std::span<const TrajectoryPoint> path);

/// episode,theta,mu,tau,decision,delay_cost,false_alarm_cost,misidentification_cost,loss
std::string outcomes_csv(std::span<const EpisodeOutcome> outcomes);

}  // namespace qcd
