// Refinement and truncation studies built on repeated solves under one shared kernel.
#include <condcap/capacity.hpp>

#include <condcap/errors.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace condcap {
namespace {

struct LevelSolve {
  double cap = 0.0;
  std::vector<double> constants;
  CondenserMeasure gamma;
  SolveResult result;
};

LevelSolve solve_level(const DiscreteCondenser& c, const KernelSpec& spec, const SolveOptions& opts) {
  const auto K = assemble_matrix(spec, c.global_points());
  LevelSolve s;
  s.result = solve_min_energy(c, K, opts);
  s.cap = capacity_from_energy(s.result.minimal_energy, false);
  for (std::size_t i = 0; i < c.plates.size(); ++i)
    s.constants.push_back(c.plates[i].sign * s.result.per_plate_interaction[i] / s.result.minimal_energy);
  s.gamma = s.result.minimizer.scaled(s.cap);
  return s;
}

// Places the weights of a nested level into the finest level's point ordering.
std::vector<double> embed(const DiscreteCondenser& coarse, const CondenserMeasure& m, const DiscreteCondenser& fine) {
  const auto off = fine.offsets();
  std::vector<double> v(fine.total_points(), 0.0);
  for (std::size_t i = 0; i < coarse.plates.size(); ++i)
    for (std::size_t k = 0; k < m.weights[i].size(); ++k) v[off[i] + k] = coarse.plates[i].sign * m.weights[i][k];
  return v;
}

}  // namespace

ExhaustionStudy exhaustion_study(const std::vector<DiscreteCondenser>& sequence, const KernelSpec& spec,
                                 const SolveOptions& opts) {
  if (sequence.empty()) throw InputError("exhaustion study needs at least one level");
  for (std::size_t m = 1; m < sequence.size(); ++m)
    if (!is_prefix_nested(sequence[m - 1], sequence[m]))
      throw InputError("non-nested levels: level " + std::to_string(m) + " is not contained in level " +
                       std::to_string(m + 1));

  ExhaustionStudy study;
  study.epsilon = spec.smoothing_epsilon;
  std::vector<LevelSolve> solves;
  for (std::size_t m = 0; m < sequence.size(); ++m) {
    spdlog::info("exhaustion level {}/{}: {} points", m + 1, sequence.size(), sequence[m].total_points());
    solves.push_back(solve_level(sequence[m], spec, opts));
  }

  const auto& fine = sequence.back();
  const auto K_fine = assemble_matrix(spec, fine.global_points());
  const auto gamma_final = embed(fine, solves.back().gamma, fine);
  study.cap_nondecreasing = true;
  study.distance_decreasing = true;
  study.all_converged = true;
  for (std::size_t m = 0; m < sequence.size(); ++m) {
    ExhaustionRow row;
    row.level = m + 1;
    row.total_points = sequence[m].total_points();
    row.cap = solves[m].cap;
    row.constants = solves[m].constants;
    row.relative_gap = solves[m].result.relative_gap;
    row.iterations = solves[m].result.iterations_used;
    row.converged = solves[m].result.converged;
    auto d = embed(sequence[m], solves[m].gamma, fine);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= gamma_final[k];
    row.distance_to_final = std::sqrt(std::max(quadratic_form(K_fine, d), 0.0));
    if (m > 0) {
      const auto& prev = study.rows.back();
      if (row.cap < prev.cap * (1.0 - kMonotonicityTolerance)) study.cap_nondecreasing = false;
      if (!(row.distance_to_final < prev.distance_to_final)) study.distance_decreasing = false;
    }
    study.all_converged = study.all_converged && row.converged;
    study.rows.push_back(std::move(row));
  }
  return study;
}

FamilyStudy family_positivity_study(const PlateGenerator& family, const WeightFunction& weight,
                                    const std::vector<std::size_t>& n_list, const KernelSpec& spec, bool auto_epsilon,
                                    const SolveOptions& opts, std::uint64_t seed, const FamilyOptions& fopts) {
  if (n_list.empty()) throw InputError("family study needs a nonempty N list");
  for (std::size_t n : n_list)
    if (n < 1) throw InputError("family study N values must be >= 1");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());

  // One kernel for every truncation, so rows are comparable.
  KernelSpec kernel = spec;
  if (auto_epsilon) kernel = spec.with_epsilon(default_epsilon(truncate_family(family, n_max, weight, seed)));

  FamilyStudy study;
  study.epsilon = kernel.smoothing_epsilon;

  // Single-plate capacities C(A_k) at unit mass.
  std::vector<double> plate_cap(n_max + 1, 0.0);
  for (std::size_t k = 1; k <= n_max; ++k) {
    PlateSpec ps = family(k);
    ps.mass = 1.0;
    const std::vector<PlateSpec> one{ps};
    const auto single = discretize(one, weight, seed, kernel);
    plate_cap[k] = solve_level(single, kernel, opts).cap;
  }

  study.cap_strictly_decreasing = true;
  for (std::size_t n : n_list) {
    spdlog::info("family truncation N = {}", n);
    const auto c = truncate_family(family, n, weight, seed);
    const auto s = solve_level(c, kernel, opts);
    FamilyRow row;
    row.n = n;
    row.cap = s.cap;
    row.constants = s.constants;
    row.converged = s.result.converged;
    row.plate_capacity = plate_cap[n];
    for (std::size_t k = 1; k <= n; ++k) {
      const double a = c.plates[k - 1].mass;
      row.partial_sum += a * a / plate_cap[k];
      if (plate_cap[k] > fopts.infinite_capacity_threshold) row.effectively_infinite_plate = true;
    }
    if (!study.rows.empty()) {
      const auto& prev = study.rows.back();
      row.cap_ratio = row.cap / prev.cap;
      if (!(row.cap < prev.cap)) study.cap_strictly_decreasing = false;
    }
    study.rows.push_back(std::move(row));
  }

  if (study.rows.size() >= 2) {
    const double last = study.rows.back().cap, prev = study.rows[study.rows.size() - 2].cap;
    study.last_relative_change = std::abs(last - prev) / last;
    if (study.last_relative_change < fopts.stabilization_tolerance) study.trend = "stabilizing";
    else if (study.cap_strictly_decreasing) study.trend = "decaying";
    else study.trend = "undetermined";
  } else {
    study.cap_strictly_decreasing = false;
    study.trend = "undetermined";
  }

  // Plates with effectively infinite single-plate capacity: their constants are expected to be <= 0.
  const auto& final_row = *std::max_element(study.rows.begin(), study.rows.end(),
                                            [](const FamilyRow& a, const FamilyRow& b) { return a.n < b.n; });
  for (std::size_t k = 1; k <= final_row.n; ++k)
    if (plate_cap[k] > fopts.infinite_capacity_threshold)
      study.large_capacity_constants.emplace_back(family(k).id, final_row.constants[k - 1]);
  return study;
}

}  // namespace condcap
