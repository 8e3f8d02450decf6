#pragma once

#include <condcap/condenser.hpp>
#include <condcap/kernels.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace condcap {

/// One nonnegative weight vector per plate, aligned with the plate's points.
struct CondenserMeasure {
  std::vector<std::vector<double>> weights;

  static CondenserMeasure zeros(const DiscreteCondenser& c);
  CondenserMeasure scaled(double s) const;
};

// Throws InputError if the shape does not match the condenser or a weight is negative/non-finite.
void check_measure(const DiscreteCondenser& c, const CondenserMeasure& m);

/// Global signed vector v_k = sign(plate(k)) * w_k.
std::vector<double> flatten(const DiscreteCondenser& c, const CondenserMeasure& m);

/// Potential of the signed measure at an arbitrary point. With an unsmoothed
/// kernel and x on a charged carrier point the result is +inf (only positive
/// charges hit), -inf (only negative) or an InputError (mixed).
double potential_at(const DiscreteCondenser& c, const KernelSpec& spec, const CondenserMeasure& m,
                    std::span<const double> x);

/// Potential at carrier point k (global index), read from the assembled matrix row.
double potential_at(const KernelMatrix& K, std::span<const double> signed_weights, std::size_t k);

// Potentials at all carrier points (K v), parallel over rows.
std::vector<double> carrier_potentials(const KernelMatrix& K, std::span<const double> signed_weights);

struct EnergyBreakdown {
  double total = 0.0;
  // per_plate_interaction[i] = kernel(mu^i, mu) with mu the signed measure.
  std::vector<double> per_plate_interaction;
};

/// Energy with blocks summed in (i, j) index order and row-major inside blocks.
EnergyBreakdown energy_breakdown(const DiscreteCondenser& c, const KernelMatrix& K, const CondenserMeasure& m);
double energy(const DiscreteCondenser& c, const KernelMatrix& K, const CondenserMeasure& m);
double mutual_energy(const DiscreteCondenser& c, const KernelMatrix& K, const CondenserMeasure& m1,
                     const CondenserMeasure& m2);

// v^T K v for an arbitrary signed vector (used for distances between measures).
double quadratic_form(const KernelMatrix& K, std::span<const double> v);

/// sum_k w_k g(x_k) over plate i.
double plate_mass(const DiscreteCondenser& c, const CondenserMeasure& m, std::size_t plate);

/// Random feasible measure with plate masses mass_scale * a_i (seeded, deterministic).
CondenserMeasure random_feasible_measure(const DiscreteCondenser& c, std::uint64_t seed, double mass_scale = 1.0);

/// Uniform per-plate weights with plate masses a_i.
CondenserMeasure uniform_measure(const DiscreteCondenser& c);

// FNV-1a hash over plate ids, signs and point coordinates.
std::uint64_t fingerprint(const DiscreteCondenser& c);
std::string fingerprint_hex(const DiscreteCondenser& c);

}  // namespace condcap
