#include <condcap/condenser.hpp>
#include <condcap/errors.hpp>
#include <condcap/measures.hpp>
#include <condcap/solver.hpp>

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace condcap;
using doctest::Approx;

namespace {
using P = std::vector<double>;

PlateSpec shell(int id, int sign, double r, std::size_t n, double a = 1.0, P center = {0, 0, 0}) {
  return PlateSpec{id, sign, SphereShell{std::move(center), r}, n, a};
}

const ValidationCheck& check_named(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  return r.checks.front();
}
}  // namespace

TEST_CASE("discretize a unit shell") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 4)};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 0);
  REQUIRE(c.plates.size() == 1);
  const auto& p = c.plates[0];
  CHECK(p.points.size() == 4);
  CHECK(p.g_values == std::vector<double>{1, 1, 1, 1});
  CHECK(min_pairwise_distance(p.points) > 0.0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(norm(p.points[k]) == Approx(1.0).epsilon(1e-14));
  CHECK(std::isinf(c.separation));
}

TEST_CASE("concentric shells: separation and kernel bound") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 400), shell(2, -1, 2.0, 400)};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 0, KernelSpec::newtonian(3));
  CHECK(c.separation == Approx(1.0).epsilon(1e-12));
  REQUIRE(c.analytic_separation.has_value());
  CHECK(*c.analytic_separation == Approx(1.0).epsilon(1e-15));
  REQUIRE(c.kernel_sup_bound.has_value());
  CHECK(*c.kernel_sup_bound <= 1.0 + 1e-12);
  CHECK(*c.kernel_sup_bound > 0.99);
  // Brute-force separation agrees with the reported one.
  CHECK(min_cross_distance(c.plates[0].points, c.plates[1].points) == c.separation);
  CHECK(c.total_mass() == 2.0);
}

TEST_CASE("discretization is deterministic") {
  const std::vector<PlateSpec> specs{PlateSpec{1, 1, BallVolume{{0, 0, 0}, 1.0}, 100, 1.0},
                                     PlateSpec{2, -1, Segment{{2, 0, 0}, {3, 0, 0}}, 10, 1.0}};
  const auto a = discretize(specs, WeightFunction::constant(1.0), 42);
  const auto b = discretize(specs, WeightFunction::constant(1.0), 42);
  CHECK(a.plates[0].points == b.plates[0].points);
  CHECK(a.plates[1].points == b.plates[1].points);
  CHECK(fingerprint(a) == fingerprint(b));
  const auto other = discretize(specs, WeightFunction::constant(1.0), 43);
  CHECK_FALSE(other.plates[0].points == a.plates[0].points);
}

TEST_CASE("ball plates include boundary points and stay inside") {
  const std::vector<PlateSpec> specs{PlateSpec{1, 1, BallVolume{{0, 0, 0}, 2.0}, 200, 1.0}};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 1);
  std::size_t boundary = 0;
  for (std::size_t k = 0; k < c.plates[0].points.size(); ++k) {
    const double r = norm(c.plates[0].points[k]);
    CHECK(r <= 2.0 + 1e-12);
    if (std::abs(r - 2.0) < 1e-12) ++boundary;
  }
  CHECK(boundary == 200);
  CHECK(c.plates[0].points.size() > 200);
}

TEST_CASE("segments are equispaced") {
  const std::vector<PlateSpec> specs{PlateSpec{1, 1, Segment{{0, 0}, {1, 0}}, 5, 1.0}};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 0);
  for (std::size_t k = 0; k < 5; ++k) CHECK(c.plates[0].points[k][0] == Approx(0.25 * k));
}

TEST_CASE("radial weight function") {
  const auto g = WeightFunction::radial_polynomial({1.0, 0.0, 1.0});
  CHECK(g(P{0, 0, 0}) == 1.0);
  CHECK(g(P{0, 1, 0}) == Approx(2.0));
  CHECK_THROWS_AS(WeightFunction::radial_polynomial({0.0, 1.0}), InputError);
  CHECK_THROWS_AS(WeightFunction::constant(0.0), InputError);
}

TEST_CASE("discretize rejects bad specs") {
  const std::vector<PlateSpec> dup{shell(1, 1, 1.0, 10), shell(1, 1, 2.0, 10)};
  CHECK_THROWS_AS(discretize(dup, WeightFunction::constant(1.0), 0), InputError);
  const std::vector<PlateSpec> none;
  CHECK_THROWS_AS(discretize(none, WeightFunction::constant(1.0), 0), InputError);
  const std::vector<PlateSpec> bad_radius{shell(1, 1, -1.0, 10)};
  CHECK_THROWS_AS(discretize(bad_radius, WeightFunction::constant(1.0), 0), InputError);
  const std::vector<PlateSpec> bad_mass{shell(1, 1, 1.0, 10, 0.0)};
  CHECK_THROWS_AS(discretize(bad_mass, WeightFunction::constant(1.0), 0), InputError);

  PointCloud twice(3);
  twice.push_back(P{0, 0, 0});
  twice.push_back(P{0, 0, 0});
  const std::vector<PlateSpec> dup_points{PlateSpec{1, 1, ExplicitPoints{twice}, 2, 1.0}};
  CHECK_THROWS_AS(discretize(dup_points, WeightFunction::constant(1.0), 0, KernelSpec::newtonian(3)), InputError);
  CHECK_NOTHROW(discretize(dup_points, WeightFunction::constant(1.0), 0, KernelSpec::newtonian(3, 0.1)));
}

TEST_CASE("validate: concentric shells pass") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 100), shell(2, -1, 2.0, 100)};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 0, KernelSpec::newtonian(3));
  const auto r = validate(c, true);
  CHECK(r.ok());
}

TEST_CASE("validate: overlapping opposite-sign shells fail separation") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 100), shell(2, -1, 1.0, 100, 1.0, {0.5, 0, 0})};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 0, KernelSpec::newtonian(3, 0.05));
  const auto r = validate(c, true);
  CHECK_FALSE(r.ok());
  const auto& sep = check_named(r, "opposite_sign_separation");
  CHECK_FALSE(sep.passed);
  CHECK(sep.detail.find("disjoint") != std::string::npos);
}

TEST_CASE("validate: single positive plate skips signed assumptions") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 50)};
  auto c = discretize(specs, WeightFunction::constant(1.0), 0, KernelSpec::newtonian(3));
  const auto r = validate(c, true);
  CHECK(r.ok());
  CHECK_FALSE(check_named(r, "g_inf_positive").applicable);
  CHECK_FALSE(check_named(r, "opposite_sign_separation").applicable);
}

TEST_CASE("equal-signed plates may overlap; shared points are reported") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 50), shell(2, 1, 1.0, 50)};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 0, KernelSpec::newtonian(3, 0.1));
  CHECK(validate(c, true).ok());
  CHECK(c.shared_points == 50);
  CHECK(c.equal_sign_gap == 0.0);
}

TEST_CASE("exhaustion by radius fractions is nested") {
  const std::vector<PlateSpec> specs{PlateSpec{1, 1, BallVolume{{0, 0, 0}, 1.0}, 100, 1.0}};
  const auto seq = exhaustion_sequence(specs, WeightFunction::constant(1.0),
                                       {ExhaustionLevels::Kind::RadiusFractions, {0.5, 0.75, 1.0}}, 0);
  REQUIRE(seq.size() == 3);
  CHECK(is_prefix_nested(seq[0], seq[1]));
  CHECK(is_prefix_nested(seq[1], seq[2]));
  CHECK(seq[0].plates[0].points.size() < seq[1].plates[0].points.size());
  for (std::size_t k = 0; k < seq[0].plates[0].points.size(); ++k) CHECK(norm(seq[0].plates[0].points[k]) <= 0.5 + 1e-12);
}

TEST_CASE("exhaustion by point counts is nested") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 16), PlateSpec{2, -1, Segment{{3, 0, 0}, {4, 0, 0}}, 4, 1.0}};
  const auto seq = exhaustion_sequence(specs, WeightFunction::constant(1.0),
                                       {ExhaustionLevels::Kind::PointCounts, {16, 64, 256}}, 0);
  REQUIRE(seq.size() == 3);
  CHECK(seq[2].plates[0].points.size() == 256);
  CHECK(seq[2].plates[1].points.size() == 256);
  CHECK(is_prefix_nested(seq[0], seq[1]));
  CHECK(is_prefix_nested(seq[1], seq[2]));
  CHECK_FALSE(is_prefix_nested(seq[2], seq[1]));
}

TEST_CASE("exhaustion rejects non-nested levels") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 16)};
  CHECK_THROWS_AS(exhaustion_sequence(specs, WeightFunction::constant(1.0),
                                      {ExhaustionLevels::Kind::PointCounts, {64, 16}}, 0),
                  InputError);
  CHECK_THROWS_AS(exhaustion_sequence(specs, WeightFunction::constant(1.0),
                                      {ExhaustionLevels::Kind::PointCounts, {16, 16}}, 0),
                  InputError);
  // Two independently generated lattices are not nested.
  const auto a = discretize(std::vector<PlateSpec>{shell(1, 1, 1.0, 16)}, WeightFunction::constant(1.0), 0);
  const auto b = discretize(std::vector<PlateSpec>{shell(1, 1, 1.0, 64)}, WeightFunction::constant(1.0), 0);
  CHECK_FALSE(is_prefix_nested(a, b));
}

TEST_CASE("truncate_family") {
  const auto unit = shell_chain(1.0, 4.0, {1, 0, 0}, 20, [](std::size_t) { return 1.0; });
  const auto c = truncate_family(unit, 3, WeightFunction::constant(1.0), 0);
  REQUIRE(c.plates.size() == 3);
  CHECK(std::isinf(c.separation));
  CHECK(norm(c.plates[2].points[0]) > 10.0);
  CHECK(validate(c, true).ok());

  const auto inv = shell_chain(1.0, 4.0, {1, 0, 0}, 20, [](std::size_t k) { return 1.0 / double(k * k); });
  const auto c5 = truncate_family(inv, 5, WeightFunction::constant(1.0), 0);
  const auto m = c5.masses();
  REQUIRE(m.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(m[k] == Approx(1.0 / double((k + 1) * (k + 1))));

  const auto overlapping = shell_chain(1.0, 1.0, {1, 0, 0}, 20, [](std::size_t) { return 1.0; }, true);
  CHECK_THROWS_AS(truncate_family(overlapping, 3, WeightFunction::constant(1.0), 0), InputError);
  CHECK_THROWS_AS(truncate_family(unit, 0, WeightFunction::constant(1.0), 0), InputError);
}

TEST_CASE("truncated minimal energy with unit masses grows at least linearly") {
  // Oracle: with a nonnegative kernel and all plates positive the cross terms are
  // nonnegative, so the energy is bounded below by the sum of single-plate minima.
  const auto unit = shell_chain(1.0, 4.0, {1, 0, 0}, 60, [](std::size_t) { return 1.0; });
  const auto weight = WeightFunction::constant(1.0);
  const auto spec = KernelSpec::newtonian(3, 0.1);
  SolveOptions opts;
  opts.gap_tolerance = 1e-10;
  double single_sum = 0.0, prev = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto one = unit(n);
    const auto single = discretize(std::vector<PlateSpec>{one}, weight, 0);
    single_sum += solve_min_energy(single, assemble_matrix(spec, single.global_points()), opts).minimal_energy;
    const auto c = truncate_family(unit, n, weight, 0);
    const double e = solve_min_energy(c, assemble_matrix(spec, c.global_points()), opts).minimal_energy;
    CHECK(e >= single_sum * (1 - 1e-9));
    CHECK(e > prev);
    prev = e;
  }
  CHECK(prev >= 4.0 * 0.9);
}

TEST_CASE("default epsilon is half the smallest in-plate spacing") {
  const std::vector<PlateSpec> specs{shell(1, 1, 1.0, 100), shell(2, -1, 2.0, 400)};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 0);
  const double expected = 0.5 * std::min(min_pairwise_distance(c.plates[0].points), min_pairwise_distance(c.plates[1].points));
  CHECK(default_epsilon(c) == expected);
}
