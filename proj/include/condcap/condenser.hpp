#pragma once

#include <condcap/geometry.hpp>
#include <condcap/kernels.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace condcap {

struct SphereShell {
  std::vector<double> center;
  double radius = 1.0;
};
struct BallVolume {
  std::vector<double> center;
  double radius = 1.0;
};
struct Segment {
  std::vector<double> a;
  std::vector<double> b;
};
struct ExplicitPoints {
  PointCloud points;
};
using PlateShape = std::variant<SphereShell, BallVolume, Segment, ExplicitPoints>;

/// One plate A_i of a condenser. For BallVolume, point_count is the number of
/// points on the boundary sphere; interior layers follow at the same density.
/// ExplicitPoints ignores point_count.
struct PlateSpec {
  int id = 0;
  int sign = 1;
  PlateShape shape;
  std::size_t point_count = 1;
  double mass = 1.0;  // a_i
};

/// The weight function g: a positive constant, or sum_j c_j |x|^j with c_0 > 0.
class WeightFunction {
 public:
  static WeightFunction constant(double value);
  static WeightFunction radial_polynomial(std::vector<double> coefficients);

  WeightFunction() = default;
  double operator()(std::span<const double> x) const noexcept;
  bool is_constant() const noexcept { return coefficients_.size() == 1; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

 private:
  explicit WeightFunction(std::vector<double> c) : coefficients_(std::move(c)) {}
  std::vector<double> coefficients_{1.0};
};

struct DiscretePlate {
  int id = 0;
  int sign = 1;
  double mass = 1.0;
  PointCloud points;
  std::vector<double> g_values;
  double min_spacing = 0.0;  // minimum pairwise distance inside the plate
  std::optional<PlateShape> shape;
};

struct DiscreteCondenser {
  int dim = 0;
  std::vector<DiscretePlate> plates;
  WeightFunction weight;
  // Min distance between positive- and negative-plate points; +inf when one side is empty.
  double separation = 0.0;
  // Lower bound on the distance between opposite-sign plate closures when the shapes
  // allow an analytic answer (spheres/balls); nullopt otherwise.
  std::optional<double> analytic_separation;
  // sup |kernel| over opposite-sign pairs; set once a kernel is bound.
  std::optional<double> kernel_sup_bound;
  // Diagnostics only: equal-signed plates may overlap.
  double equal_sign_gap = 0.0;
  std::size_t shared_points = 0;

  std::size_t plate_count() const noexcept { return plates.size(); }
  std::size_t total_points() const noexcept;
  std::vector<std::size_t> offsets() const;  // size plate_count()+1
  PointCloud global_points() const;
  bool has_positive() const noexcept;
  bool has_negative() const noexcept;
  double g_inf() const noexcept;
  double g_min() const noexcept { return g_inf(); }
  double total_mass() const noexcept;  // |a|
  std::vector<double> masses() const;
};

/// Deterministic discretization. If a kernel is given, kernel_sup_bound is filled
/// and duplicate points inside a plate are rejected when its epsilon is zero.
DiscreteCondenser discretize(std::span<const PlateSpec> specs, const WeightFunction& weight, std::uint64_t seed,
                             const std::optional<KernelSpec>& kernel = std::nullopt);

// sup |kernel(x, y)| over x in positive plates, y in negative plates (0 if vacuous).
double kernel_sup_bound(const DiscreteCondenser& c, const KernelSpec& spec);
void bind_kernel(DiscreteCondenser& c, const KernelSpec& spec);

// Default smoothing: 0.5 * min over plates of the per-plate minimum spacing.
inline constexpr double kDefaultEpsilonFactor = 0.5;
double default_epsilon(const DiscreteCondenser& c);

struct ValidationCheck {
  std::string name;
  bool applicable = true;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const noexcept;
  std::string summary() const;
};

ValidationReport validate(const DiscreteCondenser& c, bool require_signed_assumptions);

struct ExhaustionLevels {
  enum class Kind { PointCounts, RadiusFractions };
  Kind kind = Kind::PointCounts;
  std::vector<double> values;
};

/// Nested sequence of condensers. PointCounts refines sphere shells and segments
/// with prefix-nested generators; RadiusFractions grows ball plates by radius.
/// Plates the level kind does not act on are repeated unchanged.
std::vector<DiscreteCondenser> exhaustion_sequence(std::span<const PlateSpec> specs, const WeightFunction& weight,
                                                   const ExhaustionLevels& levels, std::uint64_t seed);

// Plate-wise prefix inclusion of `inner` in `outer` (bit-exact point comparison).
bool is_prefix_nested(const DiscreteCondenser& inner, const DiscreteCondenser& outer);

/// Plate k (k = 1, 2, ...) of a countable family.
using PlateGenerator = std::function<PlateSpec(std::size_t k)>;

// Unit-style chain: shells of `radius` centred at k * spacing * axis, mass rule a_k.
PlateGenerator shell_chain(double radius, double spacing, std::vector<double> axis, std::size_t points_per_shell,
                           std::function<double(std::size_t)> mass_rule, bool alternating_signs = false);

DiscreteCondenser truncate_family(const PlateGenerator& family, std::size_t n, const WeightFunction& weight,
                                  std::uint64_t seed);

}  // namespace condcap
