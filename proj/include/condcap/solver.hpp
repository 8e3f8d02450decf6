#pragma once

#include <condcap/condenser.hpp>
#include <condcap/kernels.hpp>
#include <condcap/measures.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace condcap {

enum class StepRule { FixedInverseLipschitz, BacktrackingArmijo };

struct SolveOptions {
  std::size_t max_iterations = 50000;
  double gap_tolerance = 1e-8;  // relative to the current energy
  StepRule step_rule = StepRule::BacktrackingArmijo;
  double armijo_shrink = 0.5;
  double armijo_sufficient_decrease = 1e-4;
  std::optional<CondenserMeasure> warm_start;  // UniformPerPlate when empty
  bool record_trace = true;
};

void validate_options(const SolveOptions& opts);

struct TraceEntry {
  std::size_t iteration = 0;
  double energy = 0.0;
  double gap = 0.0;  // absolute Frank-Wolfe gap
};

struct SolveResult {
  CondenserMeasure minimizer;
  double minimal_energy = 0.0;
  double relative_gap = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
  std::vector<double> per_plate_interaction;  // kernel(lambda^i, lambda)
  std::vector<TraceEntry> trace;
  double lipschitz = 0.0;
};

/// Euclidean projection of u onto { x >= 0, sum x = target } (sort and threshold,
/// stable by index on ties).
std::vector<double> project_scaled_simplex(std::span<const double> u, double target);

/// Projected gradient on u_k = w_k g(x_k) over the product of scaled simplices,
/// certified by the Frank-Wolfe gap
///   sum_i [ <grad_i, u_i> - a_i min_k grad_i,k ],  grad_k = 2 sign_k kernel(x_k, lambda) / g(x_k).
/// Requires a PD-certified matrix; throws InputError otherwise.
SolveResult solve_min_energy(const DiscreteCondenser& c, const KernelMatrix& K, const SolveOptions& opts);

/// Support detection threshold for the discrete support of the minimizer on plate i.
inline constexpr double kSupportThresholdFactor = 1e-8;
double support_threshold(const DiscretePlate& plate, std::size_t k, double factor = kSupportThresholdFactor);

struct OracleResult {
  double energy = 0.0;
  CondenserMeasure weights;
  std::size_t grid_points = 0;
  std::size_t refinement_candidates = 0;
};

/// Exhaustive grid search over the product of simplices (resolution >= 100,
/// total points <= 6), then one refinement around the best cell: every support
/// pattern compatible with that cell is solved exactly through its KKT system.
/// Returns the energy of a feasible point (an upper bound on the minimum).
OracleResult brute_force_oracle(const DiscreteCondenser& c, const KernelMatrix& K, int grid_resolution);

}  // namespace condcap
