#pragma once

#include <condcap/condenser.hpp>
#include <condcap/kernels.hpp>
#include <condcap/measures.hpp>
#include <condcap/solver.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace condcap {

struct CapacityTolerances {
  double kkt_tolerance = 1e-6;  // relative to a_i * max |potential of gamma|
  double support_threshold_factor = kSupportThresholdFactor;
  double energy_identity_tolerance = 1e-8;
  std::size_t primal_tests = 10;
  std::uint64_t primal_seed = 0;
  double duality_tolerance = 1e-4;
};

struct FrostmanPlate {
  // residual_k = sign_i a_i kernel(x_k, gamma) - C_i g(x_k) at every point of the plate
  std::vector<double> residuals;
  double min_residual = 0.0;
  double max_support_residual = 0.0;
  std::size_t support_size = 0;
  double empirical_inf = 0.0;  // min_k sign_i a_i kernel(x_k, gamma) / g(x_k)
  double tolerance = 0.0;      // kkt_tolerance * a_i * potential_scale
  bool lower_ok = false;
  bool support_ok = false;
  bool inf_ok = false;

  double scaled_min_residual(double a, double scale) const { return min_residual / (a * scale); }
  double scaled_max_support_residual(double a, double scale) const { return max_support_residual / (a * scale); }
};

struct FrostmanReport {
  std::vector<FrostmanPlate> plates;
  double potential_scale = 0.0;  // max |kernel(x_k, gamma)| over all carrier points
  // The upper (support-side) inequality needs the kernel to decay at infinity;
  // for the logarithmic kernel it is reported but not asserted.
  bool support_asserted = true;
  bool passed = false;
};

struct WeakDualityTest {
  std::uint64_t seed = 0;
  double pairing = 0.0;        // kernel(omega, mu_test) / cap, mu_test at mass level a*cap
  double margin = 0.0;         // pairing - 1
  double norm_product = 0.0;   // ||omega|| ||mu_test|| / cap
  double primal_energy = 0.0;  // ||mu_test||^2, bounded below by cap
};

struct DualityReport {
  std::vector<double> feasibility_min_residual;  // per plate, scaled by a_i * potential_scale
  double constants_sum = 0.0;
  double energy_of_omega = 0.0;
  double energy_identity_rel_error = 0.0;  // |energy(omega) - cap| / cap
  std::vector<WeakDualityTest> weak_duality;
  double min_pairing = 0.0;
  bool feasibility_ok = false;
  bool energy_ok = false;
  bool weak_duality_ok = false;
  bool passed = false;
};

struct CapacityReport {
  double cap = 0.0;
  double minimal_energy = 0.0;
  std::vector<double> constants;
  std::vector<double> eta;
  double sum_constants = 0.0;
  CondenserMeasure gamma;
  double gamma_energy = 0.0;
  bool provisional = false;
  double relative_gap = 0.0;
  std::size_t iterations = 0;
  FrostmanReport frostman;
  DualityReport duality;
};

// 1/energy with the convention 1/0 = +inf for the zero measure; throws
// NumericalError for zero energy at nonzero mass.
double capacity_from_energy(double energy, bool measure_is_zero);

CapacityReport build_report(const DiscreteCondenser& c, const KernelMatrix& K, const KernelSpec& spec,
                            const SolveResult& result, const CapacityTolerances& tol = {});

FrostmanReport verify_frostman(const DiscreteCondenser& c, const KernelMatrix& K, const KernelSpec& spec,
                               const CapacityReport& report, const CapacityTolerances& tol = {});

DualityReport verify_duality(const DiscreteCondenser& c, const KernelMatrix& K, const CapacityReport& report,
                             const CapacityTolerances& tol = {});

struct CharacterizationResult {
  double min_residual_scaled = 0.0;  // min over points of [sign a kernel(x, nu) - tau g] / (a * scale)
  double tau_sum = 0.0;
  double required_sum = 0.0;  // (cap + ||nu||^2) / (2 cap)
  bool residuals_ok = false;
  bool sum_ok = false;
  double distance_rel = 0.0;     // ||nu - gamma|| / ||gamma||
  double tau_max_error = 0.0;    // max |tau_i - C_i|
  double inf_max_error = 0.0;    // max |inf_i - tau_i|
  bool conclusion_ok = false;
  bool passed = false;
};

CharacterizationResult verify_characterization(const DiscreteCondenser& c, const KernelMatrix& K,
                                               const CondenserMeasure& candidate, std::span<const double> tau,
                                               const CapacityReport& report, double tolerance = 1e-5);

struct ExhaustionRow {
  std::size_t level = 0;
  std::size_t total_points = 0;
  double cap = 0.0;
  std::vector<double> constants;
  double distance_to_final = 0.0;  // ||gamma_n - gamma_final|| in the final level's energy norm
  double relative_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct ExhaustionStudy {
  std::vector<ExhaustionRow> rows;
  double epsilon = 0.0;
  bool cap_nondecreasing = false;
  bool distance_decreasing = false;
  bool all_converged = false;
};

inline constexpr double kMonotonicityTolerance = 1e-10;

/// Solves every level under one shared kernel. Throws InputError if the
/// sequence is not plate-wise prefix nested.
ExhaustionStudy exhaustion_study(const std::vector<DiscreteCondenser>& sequence, const KernelSpec& spec,
                                 const SolveOptions& opts);

struct FamilyRow {
  std::size_t n = 0;
  double cap = 0.0;
  std::vector<double> constants;
  double plate_capacity = 0.0;  // single-plate capacity estimate C(A_n)
  double partial_sum = 0.0;     // sum_{k<=n} a_k^2 / C(A_k)
  double cap_ratio = 0.0;       // cap(n) / cap(previous row), 0 for the first row
  bool converged = false;
  bool effectively_infinite_plate = false;
};

struct FamilyStudy {
  std::vector<FamilyRow> rows;
  double epsilon = 0.0;
  std::string trend;  // "stabilizing", "decaying" or "undetermined"
  bool cap_strictly_decreasing = false;
  double last_relative_change = 0.0;
  // Plates whose single-plate capacity exceeds the threshold, with C_j of the largest truncation.
  std::vector<std::pair<int, double>> large_capacity_constants;
};

struct FamilyOptions {
  double infinite_capacity_threshold = 1e6;
  double stabilization_tolerance = 0.01;
};

FamilyStudy family_positivity_study(const PlateGenerator& family, const WeightFunction& weight,
                                    const std::vector<std::size_t>& n_list, const KernelSpec& spec, bool auto_epsilon,
                                    const SolveOptions& opts, std::uint64_t seed, const FamilyOptions& fopts = {});

}  // namespace condcap
