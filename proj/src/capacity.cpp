#include <condcap/capacity.hpp>

#include <condcap/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace condcap {
namespace {

bool all_zero(const CondenserMeasure& m) {
  for (const auto& w : m.weights)
    for (double x : w)
      if (x != 0.0) return false;
  return true;
}

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double plate_g_min(const DiscretePlate& p) { return *std::min_element(p.g_values.begin(), p.g_values.end()); }

}  // namespace

double capacity_from_energy(double energy, bool measure_is_zero) {
  if (measure_is_zero) return std::numeric_limits<double>::infinity();
  if (!(energy > 0.0) || !std::isfinite(energy))
    throw NumericalError("minimal energy " + std::to_string(energy) +
                         " at nonzero mass contradicts strict positive definiteness");
  return 1.0 / energy;
}

CapacityReport build_report(const DiscreteCondenser& c, const KernelMatrix& K, const KernelSpec& spec,
                            const SolveResult& result, const CapacityTolerances& tol) {
  check_measure(c, result.minimizer);
  CapacityReport r;
  r.minimal_energy = result.minimal_energy;
  r.relative_gap = result.relative_gap;
  r.iterations = result.iterations_used;
  r.provisional = !result.converged;
  r.cap = capacity_from_energy(result.minimal_energy, all_zero(result.minimizer));
  if (!std::isfinite(r.cap)) {
    // Degenerate all-empty case: nothing further to verify.
    r.gamma = result.minimizer;
    return r;
  }

  r.eta = result.per_plate_interaction;
  r.constants.resize(c.plates.size());
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    r.constants[i] = c.plates[i].sign * r.eta[i] / result.minimal_energy;
    r.sum_constants += r.constants[i];
  }
  r.gamma = result.minimizer.scaled(r.cap);
  r.gamma_energy = energy(c, K, r.gamma);

  r.frostman = verify_frostman(c, K, spec, r, tol);
  r.duality = verify_duality(c, K, r, tol);
  return r;
}

FrostmanReport verify_frostman(const DiscreteCondenser& c, const KernelMatrix& K, const KernelSpec& spec,
                               const CapacityReport& report, const CapacityTolerances& tol) {
  FrostmanReport f;
  f.support_asserted = spec.family != KernelFamily::LogUnitDisk;
  const auto v = flatten(c, report.gamma);
  const auto pot = carrier_potentials(K, v);
  f.potential_scale = max_abs(pot);
  const double scale = f.potential_scale > 0.0 ? f.potential_scale : 1.0;
  const auto off = c.offsets();

  f.passed = true;
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const auto& p = c.plates[i];
    const double a = p.mass;
    const double C = report.constants[i];
    FrostmanPlate fp;
    fp.residuals.resize(p.points.size());
    fp.min_residual = std::numeric_limits<double>::infinity();
    fp.max_support_residual = -std::numeric_limits<double>::infinity();
    fp.empirical_inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.points.size(); ++k) {
      const double weighted = p.sign * a * pot[off[i] + k];
      const double res = weighted - C * p.g_values[k];
      fp.residuals[k] = res;
      fp.min_residual = std::min(fp.min_residual, res);
      fp.empirical_inf = std::min(fp.empirical_inf, weighted / p.g_values[k]);
      // Support of gamma^i is read off the unscaled minimizer lambda = gamma / cap.
      if (report.gamma.weights[i][k] / report.cap > support_threshold(p, k, tol.support_threshold_factor)) {
        ++fp.support_size;
        fp.max_support_residual = std::max(fp.max_support_residual, res);
      }
    }
    fp.tolerance = tol.kkt_tolerance * a * scale;
    fp.lower_ok = fp.min_residual >= -fp.tolerance;
    fp.support_ok = fp.support_size > 0 && fp.max_support_residual <= fp.tolerance;
    fp.inf_ok = std::abs(fp.empirical_inf - C) * plate_g_min(p) <= fp.tolerance;
    f.passed = f.passed && fp.lower_ok && fp.inf_ok && (fp.support_ok || !f.support_asserted);
    f.plates.push_back(std::move(fp));
  }
  return f;
}

DualityReport verify_duality(const DiscreteCondenser& c, const KernelMatrix& K, const CapacityReport& report,
                             const CapacityTolerances& tol) {
  if (!(report.cap > 0.0) || !std::isfinite(report.cap))
    throw InputError("duality checks need a finite, nonzero capacity");
  for (const auto& p : c.plates)
    if (p.points.empty()) throw InputError("cannot build a feasible test measure on an empty plate");

  DualityReport d;
  const auto omega = flatten(c, report.gamma);
  const auto pot = carrier_potentials(K, omega);
  const double scale = std::max(max_abs(pot), std::numeric_limits<double>::min());
  const auto off = c.offsets();

  d.feasibility_ok = true;
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const auto& p = c.plates[i];
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.points.size(); ++k)
      mn = std::min(mn, p.sign * p.mass * pot[off[i] + k] - report.constants[i] * p.g_values[k]);
    d.feasibility_min_residual.push_back(mn / (p.mass * scale));
    d.feasibility_ok = d.feasibility_ok && d.feasibility_min_residual.back() >= -tol.kkt_tolerance;
  }
  for (double C : report.constants) d.constants_sum += C;

  d.energy_of_omega = quadratic_form(K, omega);
  d.energy_identity_rel_error = std::abs(d.energy_of_omega - report.cap) / report.cap;
  d.energy_ok = d.energy_identity_rel_error <= tol.energy_identity_tolerance;

  const double omega_norm = std::sqrt(std::max(d.energy_of_omega, 0.0));
  d.min_pairing = std::numeric_limits<double>::infinity();
  d.weak_duality_ok = true;
  for (std::size_t t = 0; t < tol.primal_tests; ++t) {
    WeakDualityTest w;
    w.seed = tol.primal_seed + t;
    const auto mu = random_feasible_measure(c, w.seed, report.cap);
    w.primal_energy = energy(c, K, mu);
    w.pairing = mutual_energy(c, K, report.gamma, mu) / report.cap;
    w.margin = w.pairing - 1.0;
    w.norm_product = omega_norm * std::sqrt(std::max(w.primal_energy, 0.0)) / report.cap;
    d.min_pairing = std::min(d.min_pairing, w.pairing);
    const bool lower = w.pairing >= 1.0 - tol.duality_tolerance;
    const bool upper = w.pairing <= w.norm_product * (1.0 + 1e-12) + 1e-15;
    const bool primal = w.primal_energy >= report.cap * (1.0 - tol.duality_tolerance);
    d.weak_duality_ok = d.weak_duality_ok && lower && upper && primal;
    d.weak_duality.push_back(w);
  }
  d.passed = d.feasibility_ok && d.energy_ok && d.weak_duality_ok;
  return d;
}

CharacterizationResult verify_characterization(const DiscreteCondenser& c, const KernelMatrix& K,
                                               const CondenserMeasure& candidate, std::span<const double> tau,
                                               const CapacityReport& report, double tolerance) {
  check_measure(c, candidate);
  if (tau.size() != c.plates.size()) throw InputError("tau must have one entry per plate");
  if (!(report.cap > 0.0) || !std::isfinite(report.cap))
    throw InputError("characterization needs a finite, nonzero capacity");

  CharacterizationResult r;
  const auto nu = flatten(c, candidate);
  const auto pot = carrier_potentials(K, nu);
  const double scale = report.frostman.potential_scale > 0.0 ? report.frostman.potential_scale : 1.0;
  const auto off = c.offsets();

  r.min_residual_scaled = std::numeric_limits<double>::infinity();
  std::vector<double> inf(c.plates.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const auto& p = c.plates[i];
    for (std::size_t k = 0; k < p.points.size(); ++k) {
      const double weighted = p.sign * p.mass * pot[off[i] + k];
      r.min_residual_scaled = std::min(r.min_residual_scaled, (weighted - tau[i] * p.g_values[k]) / (p.mass * scale));
      inf[i] = std::min(inf[i], weighted / p.g_values[k]);
    }
    r.tau_sum += tau[i];
  }
  const double nu_energy = quadratic_form(K, nu);
  r.required_sum = (report.cap + nu_energy) / (2.0 * report.cap);
  r.residuals_ok = r.min_residual_scaled >= -tolerance;
  r.sum_ok = std::abs(r.tau_sum - r.required_sum) <= tolerance * std::max(1.0, std::abs(r.required_sum));

  auto diff = flatten(c, report.gamma);
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = nu[k] - diff[k];
  r.distance_rel = std::sqrt(std::max(quadratic_form(K, diff), 0.0)) / std::sqrt(report.gamma_energy);
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    r.tau_max_error = std::max(r.tau_max_error, std::abs(tau[i] - report.constants[i]));
    r.inf_max_error = std::max(r.inf_max_error, std::abs(inf[i] - tau[i]));
  }
  r.conclusion_ok = r.distance_rel <= tolerance && r.tau_max_error <= tolerance && r.inf_max_error <= tolerance;
  r.passed = r.residuals_ok && r.sum_ok && r.conclusion_ok;
  return r;
}

}  // namespace condcap
