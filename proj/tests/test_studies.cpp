#include <condcap/capacity.hpp>
#include <condcap/errors.hpp>

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace condcap;
using doctest::Approx;

namespace {
SolveOptions tight() {
  SolveOptions o;
  o.gap_tolerance = 1e-12;
  o.max_iterations = 200000;
  return o;
}

std::vector<PlateSpec> concentric(std::size_t n) {
  return {PlateSpec{1, 1, SphereShell{{0, 0, 0}, 1.0}, n, 1.0}, PlateSpec{2, -1, SphereShell{{0, 0, 0}, 2.0}, n, 1.0}};
}
}  // namespace

TEST_CASE("constant sequence yields identical rows") {
  const auto c = discretize(concentric(40), WeightFunction::constant(1.0), 0);
  const std::vector<DiscreteCondenser> seq{c, c, c};
  const auto study = exhaustion_study(seq, KernelSpec::newtonian(3, 0.2), tight());
  REQUIRE(study.rows.size() == 3);
  for (const auto& row : study.rows) {
    CHECK(row.cap == study.rows[0].cap);
    CHECK(row.constants == study.rows[0].constants);
    CHECK(row.distance_to_final == 0.0);
  }
  CHECK(study.cap_nondecreasing);
  CHECK(study.all_converged);
  CHECK(study.epsilon == 0.2);
}

TEST_CASE("non-nested and empty sequences are rejected") {
  const auto a = discretize(concentric(40), WeightFunction::constant(1.0), 0);
  const std::vector<PlateSpec> shifted{PlateSpec{1, 1, SphereShell{{0, 0, 0}, 1.1}, 60, 1.0},
                                       PlateSpec{2, -1, SphereShell{{0, 0, 0}, 2.0}, 60, 1.0}};
  const auto b = discretize(shifted, WeightFunction::constant(1.0), 0);
  CHECK_THROWS_AS(exhaustion_study({a, b}, KernelSpec::newtonian(3, 0.2), tight()), InputError);
  CHECK_THROWS_AS(exhaustion_study({}, KernelSpec::newtonian(3, 0.2), tight()), InputError);
}

TEST_CASE("small shell refinement: capacity grows and distances shrink") {
  const auto specs = concentric(200);
  ExhaustionLevels levels;
  levels.values = {25, 50, 100, 200};
  const auto seq = exhaustion_sequence(specs, WeightFunction::constant(1.0), levels, 0);
  const auto study = exhaustion_study(seq, KernelSpec::newtonian(3, 0.1), tight());
  REQUIRE(study.rows.size() == 4);
  CHECK(study.all_converged);
  CHECK(study.cap_nondecreasing);
  for (std::size_t m = 1; m < study.rows.size(); ++m) {
    CHECK(study.rows[m].cap >= study.rows[m - 1].cap * (1 - kMonotonicityTolerance));
    CHECK(study.rows[m].total_points > study.rows[m - 1].total_points);
  }
  CHECK(study.rows.back().distance_to_final == 0.0);
  CHECK(study.distance_decreasing);
}

TEST_CASE("family with one plate matches a standalone solve") {
  const auto family = shell_chain(1.0, 4.0, {1, 0, 0}, 50, [](std::size_t) { return 1.0; });
  const auto spec = KernelSpec::newtonian(3, 0.15);
  const auto study =
      family_positivity_study(family, WeightFunction::constant(1.0), {1, 2, 3}, spec, false, tight(), 0);
  REQUIRE(study.rows.size() == 3);
  CHECK(study.epsilon == 0.15);

  const auto c = truncate_family(family, 1, WeightFunction::constant(1.0), 0);
  const auto K = assemble_matrix(spec, c.global_points());
  const auto r = solve_min_energy(c, K, tight());
  CHECK(study.rows[0].cap == Approx(1.0 / r.minimal_energy).epsilon(1e-12));
  CHECK(study.rows[0].plate_capacity == Approx(study.rows[0].cap).epsilon(1e-12));
  CHECK(study.rows[0].cap_ratio == 0.0);

  // With unit masses the partial sums grow linearly-ish and the capacity decays.
  for (std::size_t m = 1; m < 3; ++m) {
    CHECK(study.rows[m].partial_sum > study.rows[m - 1].partial_sum);
    CHECK(study.rows[m].cap < study.rows[m - 1].cap);
    CHECK(study.rows[m].cap_ratio == Approx(study.rows[m].cap / study.rows[m - 1].cap));
  }
  CHECK(study.cap_strictly_decreasing);
  CHECK_FALSE(study.rows.back().effectively_infinite_plate);
}

TEST_CASE("family with summable masses stabilizes") {
  const auto family = shell_chain(1.0, 4.0, {1, 0, 0}, 40, [](std::size_t k) { return 1.0 / double(k * k); });
  const auto study = family_positivity_study(family, WeightFunction::constant(1.0), {1, 2, 4, 8, 12},
                                             KernelSpec::newtonian(3), true, tight(), 0);
  CHECK(study.epsilon > 0.0);
  CHECK(study.trend == "stabilizing");
  CHECK(study.last_relative_change < 0.01);
}
