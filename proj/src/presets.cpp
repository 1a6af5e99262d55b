#include "qcd/presets.hpp"

#include <stdexcept>

namespace qcd {

namespace {

// Shared by all two- and three-alternative examples.
ModelSpec two_alternative_model() {
  ModelSpec m;
  m.alphabet.size = 4;
  m.M = 2;
  m.p0 = 1.0 / 50.0;
  m.p = 1.0 / 20.0;
  m.nu = {0.5, 0.5};
  m.f = {{0.25, 0.25, 0.25, 0.25}, {0.4, 0.3, 0.2, 0.1}, {0.1, 0.2, 0.3, 0.4}};
  return m;
}

Instance two_alternative(std::string name, double a01, double a02, double a12, double a21,
                         double c) {
  Instance inst;
  inst.name = std::move(name);
  inst.model = two_alternative_model();
  inst.costs.c = c;
  inst.costs.a = {{a01, a02}, {0.0, a12}, {a21, 0.0}};
  return inst;
}

Instance three_alternative() {
  Instance inst;
  inst.name = "fig3d";
  inst.model.alphabet.size = 4;
  inst.model.M = 3;
  inst.model.p0 = 1.0 / 50.0;
  inst.model.p = 1.0 / 20.0;
  inst.model.nu = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  inst.model.f = {{0.25, 0.25, 0.25, 0.25},
                  {0.4, 0.3, 0.2, 0.1},
                  {0.1, 0.2, 0.3, 0.4},
                  {0.3, 0.2, 0.2, 0.3}};
  inst.costs.c = 1.0;
  inst.costs.a = {{40, 40, 40}, {0, 20, 20}, {20, 0, 20}, {20, 20, 0}};
  return inst;
}

// Detection only: a_0j = 1, a_ij = 0, so h(pi) = pi_0.
Instance shiryaev() {
  Instance inst;
  inst.name = "shiryaev-m1";
  inst.model.alphabet.size = 4;
  inst.model.M = 1;
  inst.model.p0 = 1.0 / 50.0;
  inst.model.p = 1.0 / 20.0;
  inst.model.nu = {1.0};
  inst.model.f = {{0.25, 0.25, 0.25, 0.25}, {0.4, 0.3, 0.2, 0.1}};
  inst.costs.c = 0.05;
  inst.costs.a = {{1.0}, {0.0}};
  return inst;
}

// Testing only: p0 = 1 puts the change at time 0, so pi_0 stays 0.
Instance wald() {
  Instance inst;
  inst.name = "wald";
  inst.model.alphabet.size = 2;
  inst.model.M = 2;
  inst.model.p0 = 1.0;
  inst.model.p = 1.0 / 20.0;
  inst.model.nu = {0.5, 0.5};
  inst.model.f = {{0.5, 0.5}, {0.7, 0.3}, {0.3, 0.7}};
  inst.costs.c = 1.0;
  inst.costs.a = {{20, 20}, {0, 20}, {20, 0}};
  return inst;
}

}  // namespace

std::vector<PresetInfo> preset_catalog() {
  return {
      {"fig2d1a", "M=2, a01=a02=10, a12=a21=3, c=1 (connected stopping regions)"},
      {"fig2d1b", "M=2, a01=a02=50, a12=a21=3, c=1 (connected stopping regions)"},
      {"fig2d2a", "M=2, a01=a02=10, a12=a21=10, c=1 (disconnected stopping regions)"},
      {"fig2d2b", "M=2, a01=a02=10, a12=16, a21=4, c=1 (disconnected stopping regions)"},
      {"fig2d3a", "M=2, a01=14, a02=20, a12=a21=8, c=1"},
      {"fig2d3b", "M=2, a01=14, a02=20, a12=a21=8, c=2 (disconnected continuation region)"},
      {"fig3d", "M=3, a0j=40, aij=20 (i!=j), c=1"},
      {"shiryaev-m1", "M=1 change detection, a01=1, c=0.05"},
      {"wald", "M=2 sequential testing on a 2-symbol alphabet, p0=1, c=1, aij=20"},
  };
}

Instance preset(std::string_view name) {
  if (name == "fig2d1a") return two_alternative("fig2d1a", 10, 10, 3, 3, 1);
  if (name == "fig2d1b") return two_alternative("fig2d1b", 50, 50, 3, 3, 1);
  if (name == "fig2d2a") return two_alternative("fig2d2a", 10, 10, 10, 10, 1);
  if (name == "fig2d2b") return two_alternative("fig2d2b", 10, 10, 16, 4, 1);
  if (name == "fig2d3a") return two_alternative("fig2d3a", 14, 20, 8, 8, 1);
  if (name == "fig2d3b") return two_alternative("fig2d3b", 14, 20, 8, 8, 2);
  if (name == "fig3d") return three_alternative();
  if (name == "shiryaev-m1") return shiryaev();
  if (name == "wald") return wald();
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace qcd
