#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qcd/config.hpp"

namespace qcd {

struct PresetInfo {
  std::string name;
  std::string description;
};

/// Named instances: the two-alternative examples fig2d1a/b, fig2d2a/b,
/// fig2d3a/b, the three-alternative fig3d, the single-alternative detection
/// problem shiryaev-m1 and the pure testing problem wald (p0 = 1).
std::vector<PresetInfo> preset_catalog();

/// Throws std::invalid_argument for an unknown name.
Instance preset(std::string_view name);

}  // namespace qcd
