#pragma once

#include <array>
#include <cstddef>

#include "qcd/model.hpp"

namespace qcd {

/// Image of a belief in the plane (M = 2) or in 3-space (M = 3). Unused
/// trailing coordinates are zero.
struct ProjectedPoint {
  std::array<double, 3> coords{};
  std::size_t dimension = 2;

  double x() const { return coords[0]; }
  double y() const { return coords[1]; }
  double z() const { return coords[2]; }
};

/// (2/sqrt3 pi_1 + 1/sqrt3 pi_2, pi_2). The distance from the image to the
/// edge opposite L(e_i) equals pi_i.
ProjectedPoint project2(const Belief& belief);

/// (sqrt(3/2) (pi_1 + pi_2/2 + pi_3/2), sqrt(1/2) (3/2 pi_2 + 1/2 pi_3), pi_3).
ProjectedPoint project3(const Belief& belief);

/// Inverse of project2 on the image triangle.
Belief unproject2(double x, double y);

}  // namespace qcd
