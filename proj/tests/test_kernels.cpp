#include <condcap/errors.hpp>
#include <condcap/kernels.hpp>
#include <condcap/sampling.hpp>

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace condcap;
using doctest::Approx;

namespace {
using P = std::vector<double>;
}

TEST_CASE("eval_kernel reference values") {
  CHECK(eval_kernel(KernelSpec::newtonian(3), P{0, 0, 0}, P{0, 0, 2}) == Approx(0.5).epsilon(1e-15));
  CHECK(eval_kernel(KernelSpec::newtonian(3, 1.0), P{1, 2, 3}, P{1, 2, 3}) == Approx(1.0).epsilon(1e-15));
  CHECK(eval_kernel(KernelSpec::log_unit_disk(), P{0, 0}, P{0.5, 0}) == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(eval_kernel(KernelSpec::riesz(1.0, 2), P{0, 0}, P{3, 4}) == Approx(0.2).epsilon(1e-15));
}

TEST_CASE("raw kernel is infinite on the diagonal") {
  CHECK(std::isinf(eval_kernel(KernelSpec::newtonian(3), P{1, 0, 0}, P{1, 0, 0})));
  CHECK(eval_kernel(KernelSpec::newtonian(3), P{1, 0, 0}, P{1, 0, 0}) > 0);
}

TEST_CASE("eval_kernel rejects invalid input") {
  CHECK_THROWS_AS(eval_kernel(KernelSpec::newtonian(3), P{0, 0}, P{0, 0, 1}), InputError);
  CHECK_THROWS_AS(eval_kernel(KernelSpec::log_unit_disk(), P{0, 0}, P{1.0, 0}), InputError);
  CHECK_THROWS_AS(eval_kernel(KernelSpec::riesz(3.0, 3), P{0, 0, 0}, P{1, 0, 0}), InputError);
  CHECK_THROWS_AS(eval_kernel(KernelSpec::riesz(0.0, 3), P{0, 0, 0}, P{1, 0, 0}), InputError);
  CHECK_THROWS_AS(eval_kernel(KernelSpec::riesz(0.5, 1), P{0}, P{1}), InputError);
  CHECK_THROWS_AS(eval_kernel(KernelSpec::newtonian(3, -1.0), P{0, 0, 0}, P{1, 0, 0}), InputError);
}

TEST_CASE("kernel symmetry is bit-exact on random pairs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  const KernelSpec specs[] = {KernelSpec::newtonian(3, 0.1), KernelSpec::riesz(1.3, 3), KernelSpec::riesz(0.7, 2, 0.3)};
  for (const auto& spec : specs)
    for (int t = 0; t < 1000; ++t) {
      P x(static_cast<std::size_t>(spec.dim)), y(x.size());
      for (auto& c : x) c = U(rng);
      for (auto& c : y) c = U(rng);
      CHECK(kernel_value(spec, x, y) == kernel_value(spec, y, x));
    }
  for (int t = 0; t < 1000; ++t) {
    const P x{U(rng), U(rng)}, y{U(rng), U(rng)};
    CHECK(kernel_value(KernelSpec::log_unit_disk(0.01), x, y) == kernel_value(KernelSpec::log_unit_disk(0.01), y, x));
  }
}

TEST_CASE("smoothing makes the kernel nonincreasing in epsilon") {
  const P x{0, 0, 0}, y{0.3, 0.1, -0.2};
  double prev = eval_kernel(KernelSpec::newtonian(3), x, y);
  for (double eps = 0.01; eps < 2.0; eps *= 1.5) {
    const double v = eval_kernel(KernelSpec::newtonian(3, eps), x, y);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("assemble_matrix small cases") {
  PointCloud pts(3);
  pts.push_back(P{0, 0, 0});
  pts.push_back(P{0, 0, 1});
  const auto K = assemble_matrix(KernelSpec::newtonian(3, 1.0), pts);
  CHECK(K(0, 0) == Approx(1.0).epsilon(1e-15));
  CHECK(K(1, 1) == Approx(1.0).epsilon(1e-15));
  CHECK(K(0, 1) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(K(0, 1) == K(1, 0));
  CHECK(K.pd_certificate().positive_definite);

  PointCloud one(3);
  one.push_back(P{0.2, -0.1, 0.4});
  const auto K1 = assemble_matrix(KernelSpec::newtonian(3, 1.0), one);
  CHECK(K1.size() == 1);
  CHECK(K1(0, 0) == eval_kernel(KernelSpec::newtonian(3, 1.0), one[0], one[0]));
}

TEST_CASE("smoothed Riesz matrix on 50 Fibonacci points is certified positive definite") {
  const auto pts = sampling::sphere_lattice(50, P{0, 0, 0}, 1.0);
  const auto K = assemble_matrix(KernelSpec::newtonian(3, 0.1), pts);
  const auto& cert = K.pd_certificate();
  CHECK(cert.positive_definite);
  CHECK(cert.min_pivot > cert.pivot_floor);
  CHECK(cert.pivot_floor == Approx(kPivotFloorFactor * 10.0).epsilon(1e-12));
  for (std::size_t k = 0; k < K.size(); ++k)
    for (std::size_t l = 0; l < K.size(); ++l) CHECK(K(k, l) == K(l, k));
}

TEST_CASE("positive definiteness across kernels, random clouds and quadratic forms") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (int t = 0; t < 10; ++t) {
    PointCloud pts3(3), pts2(2);
    for (int k = 0; k < 40; ++k) {
      pts3.push_back(P{U(rng), U(rng), U(rng)});
      pts2.push_back(P{U(rng), U(rng)});
    }
    for (const auto& [spec, pts] : {std::pair{KernelSpec::riesz(0.5 + 0.2 * t, 3, 0.05), &pts3},
                                    std::pair{KernelSpec::riesz(1.0, 2, 0.05), &pts2}}) {
      const auto K = assemble_matrix(spec, *pts);
      REQUIRE(K.pd_certificate().positive_definite);
      std::vector<double> v(K.size()), Kv(K.size());
      std::normal_distribution<double> N;
      for (auto& x : v) x = N(rng);
      matvec(K, v, Kv);
      double q = 0;
      for (std::size_t k = 0; k < v.size(); ++k) q += v[k] * Kv[k];
      CHECK(q > 0.0);
    }
  }
}

TEST_CASE("raw kernel with coincident points") {
  PointCloud dup(3);
  dup.push_back(P{0, 0, 0});
  dup.push_back(P{0, 0, 0});
  CHECK_THROWS_AS(assemble_matrix(KernelSpec::newtonian(3), dup), InputError);

  PointCloud distinct(3);
  distinct.push_back(P{0, 0, 0});
  distinct.push_back(P{1, 0, 0});
  const auto K = assemble_matrix(KernelSpec::newtonian(3), distinct);
  CHECK(std::isinf(K(0, 0)));
  CHECK_FALSE(K.pd_certificate().positive_definite);
}

TEST_CASE("certificate detects an indefinite matrix") {
  const std::vector<double> a{1.0, 2.0, 2.0, 1.0};
  const auto cert = certify_positive_definite(a, 2);
  CHECK_FALSE(cert.positive_definite);
  CHECK(cert.failed_row == 1);
}

TEST_CASE("shell potential oracle") {
  CHECK(shell_potential_oracle(3, 1.0, P{0, 0, 0.5}) == Approx(1.0));
  CHECK(shell_potential_oracle(3, 1.0, P{0, 0, 4}) == Approx(0.25));
  CHECK(shell_potential_oracle(3, 2.0, P{0, 2, 0}) == Approx(0.5));
  CHECK(shell_potential_oracle(4, 1.0, P{0, 0, 0, 2}) == Approx(0.25));
  CHECK_THROWS_AS(shell_potential_oracle(2, 1.0, P{0, 0}), InputError);
}

TEST_CASE("empirical shell potentials converge to the oracle") {
  const P probes[] = {{0, 0, 0}, {0.3, 0.2, -0.1}, {0, 0, 1.6}, {2.5, 0.5, 0}};
  const auto max_error = [&](std::size_t n) {
    const auto pts = sampling::sphere_lattice(n, P{0, 0, 0}, 1.0);
    double worst = 0;
    for (const auto& x : probes) {
      double pot = 0;
      for (std::size_t k = 0; k < n; ++k) pot += eval_kernel(KernelSpec::newtonian(3), x, pts[k]) / n;
      worst = std::max(worst, std::abs(pot - shell_potential_oracle(3, 1.0, x)));
    }
    return worst;
  };
  const double e1 = max_error(100), e2 = max_error(400), e3 = max_error(1600);
  CHECK(e2 <= 0.5 * e1);
  CHECK(e3 <= 0.5 * e2);
}
