#include "qcd/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcd {

ProjectedPoint project2(const Belief& belief) {
  if (belief.dimension() != 2) throw std::invalid_argument("project2 needs a belief with M = 2");
  const double s3 = std::sqrt(3.0);
  ProjectedPoint out;
  out.dimension = 2;
  out.coords = {2.0 / s3 * belief[1] + 1.0 / s3 * belief[2], belief[2], 0.0};
  return out;
}

ProjectedPoint project3(const Belief& belief) {
  if (belief.dimension() != 3) throw std::invalid_argument("project3 needs a belief with M = 3");
  const double r32 = std::sqrt(1.5);
  const double r12 = std::sqrt(0.5);
  ProjectedPoint out;
  out.dimension = 3;
  out.coords = {r32 * belief[1] + 0.5 * r32 * belief[2] + 0.5 * r32 * belief[3],
                1.5 * r12 * belief[2] + 0.5 * r12 * belief[3], belief[3]};
  return out;
}

Belief unproject2(double x, double y) {
  const double pi2 = y;
  const double pi1 = (std::sqrt(3.0) * x - y) / 2.0;
  const double pi0 = 1.0 - pi1 - pi2;
  constexpr double kSlack = 1e-12;
  if (pi0 < -kSlack || pi1 < -kSlack || pi2 < -kSlack) {
    throw std::invalid_argument("point lies outside the image triangle");
  }
  return Belief({std::max(pi0, 0.0), std::max(pi1, 0.0), std::max(pi2, 0.0)});
}

}  // namespace qcd
