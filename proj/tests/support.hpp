#pragma once

// Instances written out by hand so the tests do not depend on the presets
// they are meant to check.

#include <cmath>
#include <random>
#include <vector>

#include "qcd/model.hpp"

namespace qcd::test {

inline ModelSpec common_model() {
  ModelSpec m;
  m.alphabet.size = 4;
  m.M = 2;
  m.p0 = 1.0 / 50.0;
  m.p = 1.0 / 20.0;
  m.nu = {0.5, 0.5};
  m.f = {{0.25, 0.25, 0.25, 0.25}, {0.4, 0.3, 0.2, 0.1}, {0.1, 0.2, 0.3, 0.4}};
  return m;
}

inline CostSpec two_costs(double a01, double a02, double a12, double a21, double c) {
  CostSpec k;
  k.c = c;
  k.a = {{a01, a02}, {0.0, a12}, {a21, 0.0}};
  return k;
}

inline CostSpec connected_costs() { return two_costs(10, 10, 3, 3, 1); }

inline ModelSpec one_change_model() {
  ModelSpec m;
  m.alphabet.size = 4;
  m.M = 1;
  m.p0 = 0.0;
  m.p = 0.05;
  m.nu = {1.0};
  m.f = {{0.25, 0.25, 0.25, 0.25}, {0.4, 0.3, 0.2, 0.1}};
  return m;
}

inline std::vector<double> random_simplex_point(std::size_t M, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> pi(M + 1);
  double s = 0.0;
  for (double& v : pi) s += (v = e(rng));
  for (double& v : pi) v /= s;
  return pi;
}

}  // namespace qcd::test
