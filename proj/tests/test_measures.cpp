#include <condcap/condenser.hpp>
#include <condcap/errors.hpp>
#include <condcap/kernels.hpp>
#include <condcap/measures.hpp>
#include <condcap/report_io.hpp>

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace condcap;
using doctest::Approx;

namespace {
using P = std::vector<double>;

DiscreteCondenser explicit_condenser(std::vector<std::vector<P>> plates, std::vector<int> signs,
                                     const WeightFunction& g = WeightFunction::constant(1.0)) {
  std::vector<PlateSpec> specs;
  for (std::size_t i = 0; i < plates.size(); ++i) {
    PointCloud pts(static_cast<int>(plates[i][0].size()));
    for (const auto& p : plates[i]) pts.push_back(p);
    specs.push_back(PlateSpec{static_cast<int>(i + 1), signs[i], ExplicitPoints{pts}, pts.size(), 1.0});
  }
  return discretize(specs, g, 0);
}

DiscreteCondenser random_condenser(std::mt19937_64& rng, std::size_t plates, std::size_t per_plate) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<std::vector<P>> pts(plates);
  std::vector<int> signs;
  for (std::size_t i = 0; i < plates; ++i) {
    for (std::size_t k = 0; k < per_plate; ++k) pts[i].push_back(P{U(rng) + 3.0 * i, U(rng), U(rng)});
    signs.push_back(i % 2 == 0 ? 1 : -1);
  }
  return explicit_condenser(pts, signs);
}
}  // namespace

TEST_CASE("flatten applies plate signs") {
  const auto c = explicit_condenser({{P{0, 0, 0}, P{1, 0, 0}}, {P{5, 0, 0}}}, {1, -1});
  const CondenserMeasure m{{{1, 2}, {3}}};
  CHECK(flatten(c, m) == std::vector<double>{1, 2, -3});
  CHECK(flatten(c, CondenserMeasure::zeros(c)) == std::vector<double>{0, 0, 0});

  const auto single = explicit_condenser({{P{0, 0, 0}, P{1, 0, 0}}}, {1});
  CHECK(flatten(single, CondenserMeasure{{{0.25, 0.5}}}) == std::vector<double>{0.25, 0.5});
}

TEST_CASE("measure shape and sign checks") {
  const auto c = explicit_condenser({{P{0, 0, 0}, P{1, 0, 0}}, {P{5, 0, 0}}}, {1, -1});
  CHECK_THROWS_AS(flatten(c, CondenserMeasure{{{1, 2}}}), InputError);
  CHECK_THROWS_AS(flatten(c, CondenserMeasure{{{1}, {3}}}), InputError);
  CHECK_THROWS_AS(check_measure(c, CondenserMeasure{{{1, -2}, {3}}}), InputError);
  CHECK_THROWS_AS(check_measure(c, CondenserMeasure{{{1, NAN}, {3}}}), InputError);
}

TEST_CASE("potential_at") {
  const auto spec = KernelSpec::newtonian(3);
  const auto c = explicit_condenser({{P{0, 0, 0}}}, {1});
  CHECK(potential_at(c, spec, CondenserMeasure{{{1.0}}}, P{0, 0, 2}) == Approx(0.5).epsilon(1e-15));
  CHECK(potential_at(c, spec, CondenserMeasure::zeros(c), P{0, 0, 2}) == 0.0);
  CHECK(potential_at(c, spec, CondenserMeasure::zeros(c), P{0, 0, 0}) == 0.0);
  CHECK(std::isinf(potential_at(c, spec, CondenserMeasure{{{1.0}}}, P{0, 0, 0})));
  CHECK(potential_at(c, spec, CondenserMeasure{{{1.0}}}, P{0, 0, 0}) > 0.0);

  // Equal-signed... and opposite-signed charges at the same location.
  const auto neg = explicit_condenser({{P{1, 0, 0}}, {P{0, 0, 0}}}, {1, -1});
  CHECK(potential_at(neg, spec, CondenserMeasure{{{1.0}, {1.0}}}, P{0, 0, 0}) < 0.0);
  CHECK(std::isinf(potential_at(neg, spec, CondenserMeasure{{{1.0}, {1.0}}}, P{0, 0, 0})));
  PointCloud same(3);
  same.push_back(P{0, 0, 0});
  DiscreteCondenser mixed = neg;
  mixed.plates[0].points = same;
  CHECK_THROWS_AS(potential_at(mixed, spec, CondenserMeasure{{{1.0}, {1.0}}}, P{0, 0, 0}), InputError);
}

TEST_CASE("potential of discretized concentric shells cancels outside") {
  const std::vector<PlateSpec> specs{PlateSpec{1, 1, SphereShell{{0, 0, 0}, 1.0}, 1600, 1.0},
                                     PlateSpec{2, -1, SphereShell{{0, 0, 0}, 2.0}, 1600, 1.0}};
  const auto c = discretize(specs, WeightFunction::constant(1.0), 0);
  const auto m = uniform_measure(c);
  const double at4 = potential_at(c, KernelSpec::newtonian(3), m, P{0, 0, 4});
  const double oracle = shell_potential_oracle(3, 1.0, P{0, 0, 4}) - shell_potential_oracle(3, 2.0, P{0, 0, 4});
  CHECK(oracle == 0.0);
  CHECK(std::abs(at4 - oracle) < 1e-4);
  const double inside = potential_at(c, KernelSpec::newtonian(3), m, P{0.1, 0.2, 0});
  CHECK(inside == Approx(0.5).epsilon(1e-3));
}

TEST_CASE("potential from the matrix row equals direct evaluation") {
  std::mt19937_64 rng(3);
  const auto c = random_condenser(rng, 3, 5);
  const auto spec = KernelSpec::newtonian(3, 0.2);
  const auto K = assemble_matrix(spec, c.global_points());
  const auto m = random_feasible_measure(c, 9);
  const auto v = flatten(c, m);
  const auto pots = carrier_potentials(K, v);
  const auto pts = c.global_points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    CHECK(potential_at(K, v, k) == pots[k]);
    CHECK(potential_at(c, spec, m, pts[k]) == Approx(pots[k]).epsilon(1e-13));
  }
}

TEST_CASE("energy examples") {
  const auto c = explicit_condenser({{P{0, 0, 0}}, {P{0, 0, 1}}}, {1, -1});
  const auto K = assemble_matrix(KernelSpec::newtonian(3, 1.0), c.global_points());
  CHECK(energy(c, K, CondenserMeasure{{{1}, {1}}}) == Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(energy(c, K, CondenserMeasure::zeros(c)) == 0.0);

  // Two identical equal-signed plates: the doubled measure has four times the energy.
  const auto twin = explicit_condenser({{P{0, 0, 0}, P{1, 0, 0}}, {P{0, 0, 0}, P{1, 0, 0}}}, {1, 1});
  const auto Kt = assemble_matrix(KernelSpec::newtonian(3, 0.5), twin.global_points());
  const CondenserMeasure both{{{0.3, 0.7}, {0.3, 0.7}}}, one{{{0.3, 0.7}, {0, 0}}};
  CHECK(energy(twin, Kt, both) == Approx(4.0 * energy(twin, Kt, one)).epsilon(1e-14));
}

TEST_CASE("plate mass") {
  const auto c = explicit_condenser({{P{0, 0, 0}, P{1, 0, 0}}}, {1});
  CHECK(plate_mass(c, CondenserMeasure{{{0.25, 0.75}}}, 0) == 1.0);
  CHECK(plate_mass(c, CondenserMeasure::zeros(c), 0) == 0.0);
  CHECK_THROWS_AS(plate_mass(c, CondenserMeasure::zeros(c), 1), InputError);

  const std::vector<PlateSpec> shell{PlateSpec{1, 1, SphereShell{{0, 0, 0}, 1.0}, 30, 1.0}};
  const auto cs = discretize(shell, WeightFunction::radial_polynomial({1.0, 0.0, 1.0}), 0);
  std::vector<double> w(30, 0.1);
  CHECK(plate_mass(cs, CondenserMeasure{{w}}, 0) == Approx(2.0 * 3.0).epsilon(1e-13));
}

TEST_CASE("bilinearity, nonnegativity and decomposition on random measures") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_condenser(rng, 1 + t % 3, 6);
    const auto K = assemble_matrix(KernelSpec::riesz(1.5, 3, 0.3), c.global_points());
    REQUIRE(K.pd_certificate().positive_definite);
    const auto m1 = random_feasible_measure(c, 100 + t);
    const auto m1b = random_feasible_measure(c, 200 + t);
    const auto m2 = random_feasible_measure(c, 300 + t);
    const double a = U(rng), b = U(rng);
    CondenserMeasure comb = m1;
    for (std::size_t i = 0; i < comb.weights.size(); ++i)
      for (std::size_t k = 0; k < comb.weights[i].size(); ++k)
        comb.weights[i][k] = a * m1.weights[i][k] + b * m1b.weights[i][k];
    const double lhs = mutual_energy(c, K, comb, m2);
    const double rhs = a * mutual_energy(c, K, m1, m2) + b * mutual_energy(c, K, m1b, m2);
    CHECK(lhs == Approx(rhs).epsilon(1e-12));

    const double e = energy(c, K, m1);
    CHECK(e > 0.0);
    // Cauchy-Schwarz in the energy inner product.
    CHECK(std::abs(mutual_energy(c, K, m1, m2)) <= std::sqrt(e * energy(c, K, m2)) * (1 + 1e-12));

    const auto eb = energy_breakdown(c, K, m1);
    double resum = 0.0;
    for (std::size_t i = 0; i < c.plates.size(); ++i) resum += c.plates[i].sign * eb.per_plate_interaction[i];
    CHECK(resum == Approx(eb.total).epsilon(1e-14));
    CHECK(eb.total == e);
  }
}

TEST_CASE("energy is reproducible bit-for-bit against an explicit block sum") {
  std::mt19937_64 rng(8);
  const auto c = random_condenser(rng, 3, 7);
  const auto K = assemble_matrix(KernelSpec::newtonian(3, 0.4), c.global_points());
  const auto m = random_feasible_measure(c, 4);
  const auto off = c.offsets();
  // Blocks in (i, j) order; inside a block, row sums first; then sum alpha_i alpha_j B_ij.
  double total = 0.0;
  for (std::size_t i = 0; i < c.plates.size(); ++i)
    for (std::size_t j = 0; j < c.plates.size(); ++j) {
      double b = 0.0;
      for (std::size_t k = 0; k < c.plates[i].points.size(); ++k) {
        double r = 0.0;
        for (std::size_t l = 0; l < c.plates[j].points.size(); ++l) r += K(off[i] + k, off[j] + l) * m.weights[j][l];
        b += m.weights[i][k] * r;
      }
      total += c.plates[i].sign * c.plates[j].sign * b;
    }
  CHECK(energy(c, K, m) == total);
  CHECK(energy(c, K, m) == energy(c, K, m));
}

TEST_CASE("random feasible measures hit the requested masses") {
  std::mt19937_64 rng(1);
  const auto c = random_condenser(rng, 2, 5);
  const auto m = random_feasible_measure(c, 77, 2.5);
  for (std::size_t i = 0; i < c.plates.size(); ++i) CHECK(plate_mass(c, m, i) == Approx(2.5).epsilon(1e-14));
  const auto u = uniform_measure(c);
  for (std::size_t i = 0; i < c.plates.size(); ++i) CHECK(plate_mass(c, u, i) == Approx(1.0).epsilon(1e-14));
  CHECK(random_feasible_measure(c, 77, 2.5).weights == m.weights);
}

TEST_CASE("measure JSON round trip and fingerprint guard") {
  std::mt19937_64 rng(2);
  const auto c = random_condenser(rng, 2, 4);
  const auto other = random_condenser(rng, 2, 4);
  const auto m = random_feasible_measure(c, 1);
  const auto text = measure_json(c, m);
  CHECK(parse_measure_json(text, c).weights == m.weights);
  CHECK_THROWS_AS(parse_measure_json(text, other), InputError);
  CHECK_THROWS_AS(parse_measure_json("{\"weights\": []}", c), InputError);
  CHECK(fingerprint_hex(c) != fingerprint_hex(other));
}
