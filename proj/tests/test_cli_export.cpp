#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qcd/config.hpp"
#include "qcd/export.hpp"
#include "qcd/policy_store.hpp"
#include "qcd/presets.hpp"
#include "qcd/projection.hpp"
#include "qcd/regions.hpp"
#include "support.hpp"

using namespace qcd;

namespace {

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

SolvedInstance solve_preset(const std::string& name, std::size_t G, bool snapshots = false) {
  SolvedInstance s;
  s.instance = preset(name);
  SolverOptions opt;
  opt.record_snapshots = snapshots;
  s.value_function = value_iterate(s.instance.model, s.instance.costs,
                                   std::make_shared<const SimplexGrid>(s.instance.model.M, G), opt);
  s.policy = extract_policy(s.value_function, s.instance.model, s.instance.costs);
  return s;
}

}  // namespace

TEST_SUITE("cli_export") {
  TEST_CASE("planar projection") {
    const auto a = project2(Belief::vertex(2, 0));
    CHECK(a.x() == 0.0);
    CHECK(a.y() == 0.0);
    const auto b = project2(Belief::vertex(2, 1));
    CHECK(b.x() == doctest::Approx(1.154701).epsilon(1e-6));
    CHECK(b.y() == 0.0);
    const auto c = project2(Belief::vertex(2, 2));
    CHECK(c.x() == doctest::Approx(0.577350).epsilon(1e-6));
    CHECK(c.y() == 1.0);
    CHECK_THROWS_AS(project2(Belief::vertex(3, 0)), std::invalid_argument);
  }

  TEST_CASE("spatial projection") {
    const auto a = project3(Belief::vertex(3, 0));
    CHECK(a.coords == std::array<double, 3>{0, 0, 0});
    const auto b = project3(Belief::vertex(3, 1));
    CHECK(b.x() == doctest::Approx(std::sqrt(1.5)));
    CHECK(b.y() == 0.0);
    const auto d = project3(Belief::vertex(3, 3));
    CHECK(d.x() == doctest::Approx(0.5 * std::sqrt(1.5)));
    CHECK(d.y() == doctest::Approx(0.5 * std::sqrt(0.5)));
    CHECK(d.z() == 1.0);
    CHECK_THROWS_AS(project3(Belief::vertex(2, 0)), std::invalid_argument);
  }

  TEST_CASE("projections are affine and invertible in the plane") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 1000; ++t) {
      for (std::size_t M : {2, 3}) {
        const auto a = test::random_simplex_point(M, rng);
        const auto b = test::random_simplex_point(M, rng);
        const double l = u(rng);
        std::vector<double> mix(M + 1);
        for (std::size_t i = 0; i <= M; ++i) mix[i] = l * a[i] + (1 - l) * b[i];
        auto proj = [&](const std::vector<double>& p) {
          return M == 2 ? project2(Belief(p)) : project3(Belief(p));
        };
        const auto pa = proj(a), pb = proj(b), pm = proj(mix);
        for (std::size_t k = 0; k < 3; ++k) {
          REQUIRE(std::abs(pm.coords[k] - (l * pa.coords[k] + (1 - l) * pb.coords[k])) <= 1e-12);
        }
      }
      const auto p = test::random_simplex_point(2, rng);
      const auto img = project2(Belief(p));
      const auto back = unproject2(img.x(), img.y());
      for (std::size_t i = 0; i < 3; ++i) REQUIRE(std::abs(back[i] - p[i]) <= 1e-12);
    }
    CHECK_THROWS_AS(unproject2(2.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("presets validate") {
    const auto catalog = preset_catalog();
    CHECK(catalog.size() == 9);
    for (const auto& p : catalog) {
      const auto inst = preset(p.name);
      const auto r = validate(inst.model, inst.costs);
      CHECK_MESSAGE(r.ok(), p.name);
      CHECK_FALSE(r.has_warnings());
      CHECK(inst.name == p.name);
    }
    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
    const auto d1 = preset("fig2d1a");
    CHECK(d1.model.p0 == 1.0 / 50);
    CHECK(d1.costs.a[0][0] == 10.0);
    const auto d3 = preset("fig3d");
    CHECK(d3.model.M == 3);
    CHECK(h_sup_bound(d3.costs) == 40.0);
  }

  TEST_CASE("config round trip and parsing") {
    for (const auto& p : preset_catalog()) {
      const auto inst = preset(p.name);
      const auto again = parse_instance(to_json(inst));
      CHECK(again.model.f == inst.model.f);
      CHECK(again.model.nu == inst.model.nu);
      CHECK(again.model.p0 == inst.model.p0);
      CHECK(again.costs.a == inst.costs.a);
      CHECK(instance_digest(again) == instance_digest(inst));
    }
    const auto inst = parse_instance(R"({
      "schema": "qcd-instance/v1", "name": "t", "alphabet_size": 2, "M": 1,
      "p0": "1/50", "p": "0.05", "nu": [1], "f": [["1/2", "1/2"], [0.7, 0.3]],
      "c": 1, "a": [[1], [0]]})");
    CHECK(inst.model.p0 == 1.0 / 50);
    CHECK(inst.model.p == 0.05);
    CHECK(inst.model.f[0][1] == 0.5);
    CHECK_THROWS_AS(parse_instance("{"), ConfigError);
    CHECK_THROWS_AS(parse_instance(R"({"schema": "other"})"), ConfigError);
    CHECK_THROWS_AS(parse_instance(R"({"schema": "qcd-instance/v1", "M": 1})"), ConfigError);
  }

  TEST_CASE("policy store round trip") {
    const auto s = solve_preset("fig2d1a", 30, true);
    std::stringstream buf;
    write_policy(buf, s);
    const std::string bytes = buf.str();
    std::istringstream in(bytes);
    const auto back = read_policy(in);
    CHECK(back.value_function.values == s.value_function.values);
    CHECK(back.policy.verdicts == s.policy.verdicts);
    CHECK(back.policy.stop_sets == s.policy.stop_sets);
    CHECK(back.policy.snapshots == s.policy.snapshots);
    CHECK(back.value_function.iteration_count == s.value_function.iteration_count);
    CHECK(back.value_function.certified_gap == s.value_function.certified_gap);
    CHECK(instance_digest(back.instance) == instance_digest(s.instance));

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    std::istringstream in1(bad_magic);
    CHECK_THROWS_AS(read_policy(in1), PolicyFormatError);
    std::istringstream in2(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(read_policy(in2), PolicyFormatError);
    std::string bad_version = bytes;
    bad_version[8] = 9;
    std::istringstream in3(bad_version);
    CHECK_THROWS_AS(read_policy(in3), PolicyFormatError);
  }

  TEST_CASE("raster, value and trajectory CSV") {
    const auto s = solve_preset("fig2d1a", 20);
    const auto raster = raster_csv(s.policy);
    CHECK(count_lines(raster) == s.policy.grid->size() + 1);
    CHECK(raster.rfind("x,y,verdict,in_1,in_2\n", 0) == 0);
    const auto values = policy_csv(s.value_function, s.policy);
    CHECK(count_lines(values) == s.policy.grid->size() + 1);
    CHECK(values.rfind("k_0,k_1,k_2,value,verdict,label\n", 0) == 0);

    const auto s3 = solve_preset("fig3d", 8);
    const auto r3 = raster_csv(s3.policy);
    CHECK(count_lines(r3) == s3.policy.grid->size() + 1);
    CHECK(r3.rfind("x,y,z,", 0) == 0);
    CHECK_THROWS_AS(region_svg(s3.policy, s3.instance.costs), UnsupportedDimension);

    const auto s1 = solve_preset("shiryaev-m1", 50);
    CHECK(raster_csv(s1.policy).rfind("pi_0,pi_1,verdict,in_1\n", 0) == 0);

    const auto& m = s.instance.model;
    const auto ep = sample_episode(m, 1000, 2);
    const auto run = run_optimal(m, s.instance.costs, s.value_function, ep.observations, true);
    const auto rows = trajectory_csv_rows(3, run.trajectory);
    CHECK(count_lines(rows) == run.trajectory.size());
    CHECK(rows.rfind("3,0,,", 0) == 0);
    CHECK(trajectory_csv_header(2) == "episode,n,symbol,pi_0,pi_1,pi_2,stop,label\n");
  }

  TEST_CASE("SVG") {
    const auto s = solve_preset("fig2d1a", 40);
    const auto& m = s.instance.model;
    const auto ep = sample_episode(m, 1000, 2);
    const auto run = run_optimal(m, s.instance.costs, s.value_function, ep.observations, true);
    const auto svg = region_svg(s.policy, s.instance.costs, run.trajectory);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(svg.find("id=\"gamma1\"") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("sample-path") != std::string::npos);

    // Prohibitive delay: every grid point except e_0 is shaded.
    auto inst = preset("fig2d1a");
    inst.costs.c = 1e9;
    SolvedInstance all;
    all.instance = inst;
    all.value_function = value_iterate(inst.model, inst.costs, std::make_shared<const SimplexGrid>(2, 10));
    all.policy = extract_policy(all.value_function, inst.model, inst.costs);
    const auto full = region_svg(all.policy, inst.costs);
    std::size_t circles = 0;
    for (std::size_t pos = full.find("<circle"); pos != std::string::npos; pos = full.find("<circle", pos + 1)) {
      ++circles;
    }
    CHECK(circles == all.policy.grid->size() - 1);
  }

  TEST_CASE("region analysis on small synthetic sets") {
    const SimplexGrid grid(2, 6);
    // Two opposite corners: two components, each convex.
    auto corners = [&](std::size_t g) {
      const auto k = grid.composition(g);
      return k[1] >= 5 || k[2] >= 5;
    };
    CHECK(count_components(grid, corners) == 2);
    CHECK(grid_line_convexity(grid, corners).second > 0);
    const auto sizes = component_sizes(grid, corners);
    CHECK(sizes == std::vector<std::size_t>{3, 3});
    // A line with a one-cell gap counts as one run.
    auto gap = [&](std::size_t g) {
      const auto k = grid.composition(g);
      return k[2] == 0 && k[1] != 3;
    };
    CHECK(grid_line_convexity(grid, gap).second == 0);
  }

  TEST_CASE("change detection regions form an interval") {
    const auto s = solve_preset("shiryaev-m1", 400);
    const auto rep = region_analysis(s.policy);
    REQUIRE(rep.interval.has_value());
    CHECK(rep.interval->is_interval);
    CHECK(rep.interval->threshold > 0.0);
    CHECK(rep.interval->threshold < 1.0);
    const auto text = describe(rep);
    CHECK(text.find("stopping set is an interval [0, ") != std::string::npos);
  }
}
