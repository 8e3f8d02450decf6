#include <condcap/acceptance.hpp>

#include <condcap/capacity.hpp>
#include <condcap/condenser.hpp>
#include <condcap/errors.hpp>
#include <condcap/kernels.hpp>
#include <condcap/measures.hpp>
#include <condcap/solver.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <random>

namespace condcap {
namespace {

// Pinned tolerances of the suite.
constexpr double kConcentricCapTol = 0.03;
constexpr double kConcentricConstTol = 0.05;
constexpr double kShellCapTol = 0.02;
constexpr double kSingleConstTol = 1e-10;
constexpr double kSumRuleTol = 1e-10;
constexpr double kOracleTol = 1e-9;
constexpr int kOracleInstances = 20;
constexpr int kOracleResolution = 100;
constexpr double kFrostmanResidualTol = 1e-5;
constexpr double kFrostmanInfTol = 1e-4;
constexpr double kBallCapTol = 0.05;
constexpr double kDualityResidualTol = 1e-5;
constexpr double kDualityEnergyTol = 1e-8;
constexpr double kDualityPairingTol = 1e-4;
constexpr std::size_t kDualityPrimals = 10;
constexpr double kHomogeneityTol = 1e-10;
constexpr double kFamilyChangeTol = 0.01;

constexpr std::size_t kShellPoints = 400;
constexpr std::uint64_t kSeed = 0;

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<double> origin() { return {0.0, 0.0, 0.0}; }

PlateSpec shell(int id, int sign, double radius, std::size_t n, double mass = 1.0) {
  return PlateSpec{id, sign, SphereShell{origin(), radius}, n, mass};
}

struct Solved {
  DiscreteCondenser c;
  KernelSpec spec;
  KernelMatrix K;
  SolveResult result;
  CapacityReport report;
};

}  // namespace

struct AcceptanceSuite::State {
  AcceptanceOptions opts;
  std::optional<Solved> concentric;
  std::optional<Solved> single_shell;
  struct SumRecord {
    std::string label;
    double sum = 0.0;
    bool converged = false;
  };
  std::vector<SumRecord> sums;

  SolveOptions solve_options() const {
    SolveOptions o;
    o.gap_tolerance = opts.gap_tolerance;
    o.max_iterations = opts.max_iterations;
    o.record_trace = false;
    return o;
  }

  Solved solve(const std::string& label, DiscreteCondenser c, const KernelSpec& spec,
               const CapacityTolerances& tol = {}) {
    Solved s{std::move(c), spec, {}, {}, {}};
    bind_kernel(s.c, spec);
    s.K = assemble_matrix(spec, s.c.global_points());
    s.result = solve_min_energy(s.c, s.K, solve_options());
    s.report = build_report(s.c, s.K, spec, s.result, tol);
    sums.push_back({label, s.report.sum_constants, s.result.converged});
    spdlog::debug("{}: cap {} gap {} after {} iterations", label, s.report.cap, s.result.relative_gap,
                  s.result.iterations_used);
    return s;
  }

  Solved solve_default_eps(const std::string& label, const std::vector<PlateSpec>& specs,
                           const CapacityTolerances& tol = {}) {
    auto c = discretize(specs, WeightFunction::constant(1.0), kSeed);
    const auto spec = KernelSpec::newtonian(3, default_epsilon(c));
    return solve(label, std::move(c), spec, tol);
  }

  const Solved& get_concentric() {
    if (!concentric) {
      CapacityTolerances tol;
      tol.primal_tests = kDualityPrimals;
      concentric = solve_default_eps("concentric shells",
                                     {shell(1, 1, 1.0, kShellPoints), shell(2, -1, 2.0, kShellPoints)}, tol);
    }
    return *concentric;
  }
  const Solved& get_single_shell() {
    if (!single_shell) single_shell = solve_default_eps("single shell", {shell(1, 1, 1.0, kShellPoints)});
    return *single_shell;
  }

  // Random tiny instance t: 1-3 plates, at most 6 points, random signs, masses, weight and kernel.
  std::pair<DiscreteCondenser, KernelSpec> oracle_instance(int t) const {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(t));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int plates = 1 + static_cast<int>(rng() % 3);
    const int total = plates + static_cast<int>(rng() % static_cast<std::uint64_t>(7 - plates));
    std::vector<int> counts(static_cast<std::size_t>(plates), 1);
    for (int extra = total - plates; extra > 0; --extra) ++counts[rng() % counts.size()];
    std::vector<PlateSpec> specs;
    for (int i = 0; i < plates; ++i) {
      PointCloud pts(3);
      for (int k = 0; k < counts[static_cast<std::size_t>(i)]; ++k) {
        const double p[3] = {2 * U(rng) - 1, 2 * U(rng) - 1, 2 * U(rng) - 1};
        pts.push_back(p);
      }
      const int sign = i == 0 ? 1 : (U(rng) < 0.5 ? 1 : -1);
      specs.push_back(PlateSpec{i + 1, sign, ExplicitPoints{std::move(pts)}, 1, 0.5 + 1.5 * U(rng)});
    }
    const auto weight = WeightFunction::radial_polynomial({1.0, 0.5 * U(rng)});
    const double alpha = 0.5 + 2.0 * U(rng);
    const auto spec = KernelSpec::riesz(alpha, 3, 0.2 + 0.8 * U(rng));
    return {discretize(specs, weight, kSeed), spec};
  }
};

const std::vector<CriterionInfo>& acceptance_criteria() {
  static const std::vector<CriterionInfo> list{
      {1, "spherical condenser", "r=1, R=2, 400 points per shell: cap within 3% of 2, (C1, C2) within 0.05 of (1, 0)"},
      {2, "single shell", "r=1, 400 points: cap within 2% of 1, C1 = 1 to 1e-10"},
      {3, "sum rule", "every converged solve in the suite: |sum C_i - 1| <= 1e-10"},
      {4, "oracle equivalence", "20 random instances with <= 6 points: energy within 1e-9 relative of the oracle"},
      {5, "Frostman/KKT", "criteria 1-2: scaled min residual >= -1e-5, support max <= 1e-5, |inf - C_i| <= 1e-4"},
      {6, "exhaustion", "growing ball (0.5, 0.75, 1): nondecreasing within 5%; shell refinement 100/400/1600 monotone"},
      {7, "duality sandwich", "criterion 1: feasibility >= -1e-5, energy(omega) = cap to 1e-8, 10 primals pair >= 1-1e-4"},
      {8, "homogeneity", "cap(2a) = cap(a)/4 and minimizer doubles, to 1e-10 relative"},
      {9, "family trend", "shells at (4k,0,0): a_k = 1 strictly decreasing N=1..8; a_k = 1/k^2 change 7->8 below 1%"},
  };
  return list;
}

AcceptanceSuite::AcceptanceSuite(AcceptanceOptions opts) : state_(std::make_unique<State>()) { state_->opts = opts; }
AcceptanceSuite::~AcceptanceSuite() = default;

CriterionOutcome AcceptanceSuite::run(int id) {
  const auto& list = acceptance_criteria();
  if (id < 1 || id > static_cast<int>(list.size())) throw InputError("unknown criterion " + std::to_string(id));
  CriterionOutcome out;
  out.id = id;
  out.title = list[static_cast<std::size_t>(id - 1)].title;
  const auto t0 = std::chrono::steady_clock::now();
  State& s = *state_;

  switch (id) {
    case 1: {
      const auto& r = s.get_concentric();
      const double cap = r.report.cap, C1 = r.report.constants[0], C2 = r.report.constants[1];
      out.passed = std::abs(cap - 2.0) <= kConcentricCapTol * 2.0 && std::abs(C1 - 1.0) <= kConcentricConstTol &&
                   std::abs(C2) <= kConcentricConstTol;
      out.detail = fmt("cap=%.6f (%.2f%% off 2), C=(%.6f, %.6f), eps=%.6g, gap=%.2e", cap, 100 * std::abs(cap - 2) / 2,
                       C1, C2, r.spec.smoothing_epsilon, r.result.relative_gap);
      break;
    }
    case 2: {
      const auto& r = s.get_single_shell();
      const double cap = r.report.cap, C1 = r.report.constants[0];
      out.passed = std::abs(cap - 1.0) <= kShellCapTol && std::abs(C1 - 1.0) <= kSingleConstTol;
      out.detail = fmt("cap=%.6f (%.2f%% off 1), |C1-1|=%.2e, eps=%.6g, gap=%.2e", cap, 100 * std::abs(cap - 1), std::abs(C1 - 1),
                       r.spec.smoothing_epsilon, r.result.relative_gap);
      break;
    }
    case 3: {
      s.get_concentric();
      s.get_single_shell();
      for (int t = 0; t < kOracleInstances; ++t) {
        auto [c, spec] = s.oracle_instance(t);
        s.solve("oracle instance " + std::to_string(t), std::move(c), spec);
      }
      std::size_t checked = 0;
      double worst = 0.0;
      std::string worst_label;
      for (const auto& rec : s.sums) {
        if (!rec.converged) continue;
        ++checked;
        const double err = std::abs(rec.sum - 1.0);
        if (err >= worst) {
          worst = err;
          worst_label = rec.label;
        }
      }
      out.passed = checked > 0 && worst <= kSumRuleTol;
      out.detail = fmt("%zu converged solves, max |sum C - 1| = %.2e (%s)", checked, worst, worst_label.c_str());
      break;
    }
    case 4: {
      double worst = 0.0;
      int failures = 0;
      for (int t = 0; t < kOracleInstances; ++t) {
        auto [c, spec] = s.oracle_instance(t);
        const auto K = assemble_matrix(spec, c.global_points());
        const auto res = solve_min_energy(c, K, s.solve_options());
        const auto orc = brute_force_oracle(c, K, kOracleResolution);
        const double rel = std::abs(res.minimal_energy - orc.energy) / orc.energy;
        worst = std::max(worst, rel);
        if (!(rel <= kOracleTol)) ++failures;
      }
      out.passed = failures == 0;
      out.detail = fmt("%d instances, max relative difference %.2e, %d above 1e-9", kOracleInstances, worst, failures);
      break;
    }
    case 5: {
      bool ok = true;
      std::string detail;
      for (const Solved* r : {&s.get_concentric(), &s.get_single_shell()}) {
        const auto& f = r->report.frostman;
        for (std::size_t i = 0; i < f.plates.size(); ++i) {
          const auto& fp = f.plates[i];
          const double a = r->c.plates[i].mass;
          const double lo = fp.scaled_min_residual(a, f.potential_scale);
          const double hi = fp.scaled_max_support_residual(a, f.potential_scale);
          const double inf_err = std::abs(fp.empirical_inf - r->report.constants[i]);
          ok = ok && lo >= -kFrostmanResidualTol && hi <= kFrostmanResidualTol && inf_err <= kFrostmanInfTol;
          detail += fmt("%s[%s plate %zu: min %.1e, support max %.1e, |inf-C| %.1e]", detail.empty() ? "" : " ",
                        r == &*s.concentric ? "concentric" : "shell", i + 1, lo, hi, inf_err);
        }
      }
      out.passed = ok;
      out.detail = detail;
      break;
    }
    case 6: {
      SolveOptions o = s.solve_options();
      const auto weight = WeightFunction::constant(1.0);
      const std::vector<PlateSpec> ball{PlateSpec{1, 1, BallVolume{origin(), 1.0}, kShellPoints, 1.0}};
      const auto ball_seq = exhaustion_sequence(ball, weight, {ExhaustionLevels::Kind::RadiusFractions, {0.5, 0.75, 1.0}}, kSeed);
      const auto ball_spec = KernelSpec::newtonian(3, default_epsilon(ball_seq.back()));
      const auto bs = exhaustion_study(ball_seq, ball_spec, o);
      bool ball_ok = bs.cap_nondecreasing;
      const double radii[3] = {0.5, 0.75, 1.0};
      for (std::size_t m = 0; m < 3; ++m) ball_ok = ball_ok && std::abs(bs.rows[m].cap - radii[m]) <= kBallCapTol * radii[m];

      const std::vector<PlateSpec> shells{shell(1, 1, 1.0, 100), shell(2, -1, 2.0, 100)};
      const auto shell_seq = exhaustion_sequence(shells, weight, {ExhaustionLevels::Kind::PointCounts, {100, 400, 1600}}, kSeed);
      const auto shell_spec = KernelSpec::newtonian(3, default_epsilon(shell_seq.back()));
      const auto ss = exhaustion_study(shell_seq, shell_spec, o);
      bool shell_ok = ss.distance_decreasing && ss.cap_nondecreasing;
      for (std::size_t m = 1; m < ss.rows.size(); ++m)
        shell_ok = shell_ok && std::abs(ss.rows[m].cap - 2.0) < std::abs(ss.rows[m - 1].cap - 2.0);
      out.passed = ball_ok && shell_ok;
      out.detail = fmt("ball caps (%.4f, %.4f, %.4f); shell caps (%.4f, %.4f, %.4f), distances (%.3e, %.3e, %.1e)",
                       bs.rows[0].cap, bs.rows[1].cap, bs.rows[2].cap, ss.rows[0].cap, ss.rows[1].cap, ss.rows[2].cap,
                       ss.rows[0].distance_to_final, ss.rows[1].distance_to_final, ss.rows[2].distance_to_final);
      break;
    }
    case 7: {
      const auto& d = s.get_concentric().report.duality;
      double worst_feas = 0.0;
      for (double x : d.feasibility_min_residual) worst_feas = std::min(worst_feas, x);
      out.passed = worst_feas >= -kDualityResidualTol && d.energy_identity_rel_error <= kDualityEnergyTol &&
                   d.weak_duality.size() == kDualityPrimals && d.min_pairing >= 1.0 - kDualityPairingTol;
      out.detail = fmt("feasibility min %.2e, |energy(omega)-cap|/cap %.2e, min pairing %.9f over %zu primals",
                       worst_feas, d.energy_identity_rel_error, d.min_pairing, d.weak_duality.size());
      break;
    }
    case 8: {
      const auto base = s.solve_default_eps("homogeneity a", {shell(1, 1, 1.0, 100), shell(2, -1, 2.0, 100)});
      const auto twice = s.solve(
          "homogeneity 2a",
          discretize(std::vector<PlateSpec>{shell(1, 1, 1.0, 100, 2.0), shell(2, -1, 2.0, 100, 2.0)},
                     WeightFunction::constant(1.0), kSeed),
          base.spec);
      const double cap_err = std::abs(twice.report.cap - base.report.cap / 4.0) / (base.report.cap / 4.0);
      double w_err = 0.0, w_max = 0.0;
      for (std::size_t i = 0; i < base.c.plates.size(); ++i)
        for (std::size_t k = 0; k < base.c.plates[i].points.size(); ++k) {
          w_err = std::max(w_err, std::abs(twice.result.minimizer.weights[i][k] - 2.0 * base.result.minimizer.weights[i][k]));
          w_max = std::max(w_max, 2.0 * base.result.minimizer.weights[i][k]);
        }
      const double w_rel = w_err / w_max;
      out.passed = cap_err <= kHomogeneityTol && w_rel <= kHomogeneityTol;
      out.detail = fmt("cap relative error %.2e, minimizer relative error %.2e", cap_err, w_rel);
      break;
    }
    case 9: {
      SolveOptions o = s.solve_options();
      const auto weight = WeightFunction::constant(1.0);
      std::vector<std::size_t> ns{1, 2, 3, 4, 5, 6, 7, 8};
      const auto flat = family_positivity_study(shell_chain(1.0, 4.0, {1.0, 0.0, 0.0}, 100, [](std::size_t) { return 1.0; }),
                                                weight, ns, KernelSpec::newtonian(3), true, o, kSeed);
      const auto decay = family_positivity_study(
          shell_chain(1.0, 4.0, {1.0, 0.0, 0.0}, 100,
                      [](std::size_t k) { return 1.0 / (static_cast<double>(k) * static_cast<double>(k)); }),
          weight, ns, KernelSpec::newtonian(3), true, o, kSeed);
      const double change = std::abs(decay.rows[7].cap - decay.rows[6].cap) / decay.rows[7].cap;
      out.passed = flat.cap_strictly_decreasing && change < kFamilyChangeTol;
      out.detail = fmt("a_k=1: cap(1)=%.4f -> cap(8)=%.4f, strictly decreasing %s; a_k=1/k^2: cap(7)=%.6f cap(8)=%.6f change %.3f%%",
                       flat.rows[0].cap, flat.rows[7].cap, flat.cap_strictly_decreasing ? "yes" : "no",
                       decay.rows[6].cap, decay.rows[7].cap, 100 * change);
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string format_outcome(const CriterionOutcome& o) {
  return fmt("%s  criterion %d  %-20s (%.1f s)  %s", o.passed ? "PASS" : "FAIL", o.id, o.title.c_str(), o.seconds,
             o.detail.c_str());
}

}  // namespace condcap
