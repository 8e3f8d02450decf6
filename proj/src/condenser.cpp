#include <condcap/condenser.hpp>

#include <condcap/errors.hpp>
#include <condcap/sampling.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace condcap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t plate_seed(std::uint64_t seed, int id) {
  // splitmix64 step so nearby ids get unrelated streams
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(id) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

int shape_dim(const PlateShape& shape) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ExplicitPoints>) return s.points.dim();
        else if constexpr (std::is_same_v<T, Segment>) return static_cast<int>(s.a.size());
        else return static_cast<int>(s.center.size());
      },
      shape);
}

void check_spec(const PlateSpec& spec) {
  if (spec.sign != 1 && spec.sign != -1) throw InputError("plate " + std::to_string(spec.id) + ": sign must be +1 or -1");
  if (!(spec.mass > 0.0) || !std::isfinite(spec.mass))
    throw InputError("plate " + std::to_string(spec.id) + ": mass target must be positive and finite");
  if (spec.point_count < 1) throw InputError("plate " + std::to_string(spec.id) + ": point count must be >= 1");
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SphereShell> || std::is_same_v<T, BallVolume>) {
          if (!(s.radius > 0.0) || !std::isfinite(s.radius))
            throw InputError("plate " + std::to_string(spec.id) + ": radius must be positive");
        } else if constexpr (std::is_same_v<T, Segment>) {
          if (s.a.size() != s.b.size() || s.a.empty())
            throw InputError("plate " + std::to_string(spec.id) + ": segment endpoints must share a dimension");
        }
      },
      spec.shape);
}

// Distance between the closures of two spheres/balls, if both shapes are of that kind.
std::optional<double> closure_distance(const PlateShape& s1, const PlateShape& s2) {
  auto sphere_like = [](const PlateShape& s) -> std::optional<std::pair<const std::vector<double>*, std::pair<double, bool>>> {
    if (const auto* sh = std::get_if<SphereShell>(&s)) return std::make_pair(&sh->center, std::make_pair(sh->radius, false));
    if (const auto* b = std::get_if<BallVolume>(&s)) return std::make_pair(&b->center, std::make_pair(b->radius, true));
    return std::nullopt;
  };
  const auto a = sphere_like(s1), b = sphere_like(s2);
  if (!a || !b || a->first->size() != b->first->size()) return std::nullopt;
  const double D = distance(*a->first, *b->first);
  const auto [r1, ball1] = a->second;
  const auto [r2, ball2] = b->second;
  if (D >= r1 + r2) return D - r1 - r2;
  // One set lies inside the other's outer sphere.
  if (D + r1 <= r2) return ball2 ? 0.0 : r2 - D - r1;
  if (D + r2 <= r1) return ball1 ? 0.0 : r1 - D - r2;
  return 0.0;
}

PointCloud generate(const PlateSpec& spec, std::uint64_t seed) {
  return std::visit(
      [&](const auto& s) -> PointCloud {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SphereShell>) {
          return sampling::sphere_lattice(spec.point_count, s.center, s.radius);
        } else if constexpr (std::is_same_v<T, BallVolume>) {
          return sampling::layered_ball(s.center, s.radius, spec.point_count, {}, plate_seed(seed, spec.id)).points;
        } else if constexpr (std::is_same_v<T, Segment>) {
          return sampling::segment_lattice(spec.point_count, s.a, s.b);
        } else {
          return s.points;
        }
      },
      spec.shape);
}

DiscretePlate make_plate(const PlateSpec& spec, PointCloud points, const WeightFunction& g, PlateShape shape) {
  if (points.empty()) throw InputError("plate " + std::to_string(spec.id) + " is empty after generation");
  DiscretePlate p;
  p.id = spec.id;
  p.sign = spec.sign;
  p.mass = spec.mass;
  p.points = std::move(points);
  p.g_values.reserve(p.points.size());
  for (std::size_t k = 0; k < p.points.size(); ++k) p.g_values.push_back(g(p.points[k]));
  p.min_spacing = min_pairwise_distance(p.points);
  p.shape = std::move(shape);
  return p;
}

// Fills the derived geometry of a condenser whose plates are set.
void finalize(DiscreteCondenser& c) {
  c.separation = kInf;
  c.equal_sign_gap = kInf;
  c.shared_points = 0;
  std::optional<double> analytic;
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    for (std::size_t j = i + 1; j < c.plates.size(); ++j) {
      const auto& pi = c.plates[i];
      const auto& pj = c.plates[j];
      const double d = min_cross_distance(pi.points, pj.points);
      if (pi.sign != pj.sign) {
        c.separation = std::min(c.separation, d);
        if (pi.shape && pj.shape) {
          if (auto cd = closure_distance(*pi.shape, *pj.shape)) analytic = std::min(analytic.value_or(kInf), *cd);
        }
      } else {
        c.equal_sign_gap = std::min(c.equal_sign_gap, d);
        for (std::size_t k = 0; k < pi.points.size(); ++k)
          for (std::size_t l = 0; l < pj.points.size(); ++l)
            if (squared_distance(pi.points[k], pj.points[l]) == 0.0) ++c.shared_points;
      }
    }
  }
  c.analytic_separation = analytic;
}

void check_dims(std::span<const PlateSpec> specs, int& dim) {
  dim = shape_dim(specs.front().shape);
  std::set<int> ids;
  for (const auto& s : specs) {
    check_spec(s);
    if (shape_dim(s.shape) != dim) throw InputError("all plates must live in the same dimension");
    if (!ids.insert(s.id).second) throw InputError("duplicate plate id " + std::to_string(s.id));
  }
  if (dim < 1) throw InputError("plate dimension must be positive");
}

}  // namespace

WeightFunction WeightFunction::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw InputError("constant weight function must be positive");
  return WeightFunction(std::vector<double>{value});
}

WeightFunction WeightFunction::radial_polynomial(std::vector<double> coefficients) {
  if (coefficients.empty() || !(coefficients.front() > 0.0))
    throw InputError("radial polynomial weight needs a positive constant term");
  for (double v : coefficients)
    if (!std::isfinite(v)) throw InputError("radial polynomial coefficients must be finite");
  return WeightFunction(std::move(coefficients));
}

double WeightFunction::operator()(std::span<const double> x) const noexcept {
  if (coefficients_.size() == 1) return coefficients_.front();
  const double r = norm(x);
  double acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * r + *it;
  return acc;
}

std::size_t DiscreteCondenser::total_points() const noexcept {
  std::size_t n = 0;
  for (const auto& p : plates) n += p.points.size();
  return n;
}

std::vector<std::size_t> DiscreteCondenser::offsets() const {
  std::vector<std::size_t> off{0};
  for (const auto& p : plates) off.push_back(off.back() + p.points.size());
  return off;
}

PointCloud DiscreteCondenser::global_points() const {
  PointCloud out(dim);
  out.reserve(total_points());
  for (const auto& p : plates) out.append(p.points);
  return out;
}

bool DiscreteCondenser::has_positive() const noexcept {
  return std::any_of(plates.begin(), plates.end(), [](const auto& p) { return p.sign > 0; });
}

bool DiscreteCondenser::has_negative() const noexcept {
  return std::any_of(plates.begin(), plates.end(), [](const auto& p) { return p.sign < 0; });
}

double DiscreteCondenser::g_inf() const noexcept {
  double m = kInf;
  for (const auto& p : plates)
    for (double g : p.g_values) m = std::min(m, g);
  return m;
}

double DiscreteCondenser::total_mass() const noexcept {
  double s = 0.0;
  for (const auto& p : plates) s += p.mass;
  return s;
}

std::vector<double> DiscreteCondenser::masses() const {
  std::vector<double> a;
  for (const auto& p : plates) a.push_back(p.mass);
  return a;
}

DiscreteCondenser discretize(std::span<const PlateSpec> specs, const WeightFunction& weight, std::uint64_t seed,
                             const std::optional<KernelSpec>& kernel) {
  if (specs.empty()) throw InputError("a condenser needs at least one plate");
  DiscreteCondenser c;
  check_dims(specs, c.dim);
  c.weight = weight;
  for (const auto& s : specs) {
    c.plates.push_back(make_plate(s, generate(s, seed), weight, s.shape));
    if (kernel && kernel->smoothing_epsilon == 0.0 && c.plates.back().min_spacing == 0.0)
      throw InputError("plate " + std::to_string(s.id) + " has duplicate points and the kernel is unsmoothed");
  }
  finalize(c);
  if (kernel) bind_kernel(c, *kernel);
  return c;
}

double kernel_sup_bound(const DiscreteCondenser& c, const KernelSpec& spec) {
  double sup = 0.0;
  for (const auto& pi : c.plates) {
    if (pi.sign < 0) continue;
    for (const auto& pj : c.plates) {
      if (pj.sign > 0) continue;
      for (std::size_t k = 0; k < pi.points.size(); ++k)
        for (std::size_t l = 0; l < pj.points.size(); ++l)
          sup = std::max(sup, std::abs(kernel_value(spec, pi.points[k], pj.points[l])));
    }
  }
  return sup;
}

void bind_kernel(DiscreteCondenser& c, const KernelSpec& spec) {
  validate_spec(spec);
  check_points(spec, c.global_points());
  c.kernel_sup_bound = kernel_sup_bound(c, spec);
}

double default_epsilon(const DiscreteCondenser& c) {
  double m = kInf;
  for (const auto& p : c.plates) m = std::min(m, p.min_spacing);
  if (!std::isfinite(m)) m = min_pairwise_distance(c.global_points());
  if (!std::isfinite(m) || m == 0.0) return 1.0;
  return kDefaultEpsilonFactor * m;
}

bool ValidationReport::ok() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& ch) { return !ch.applicable || ch.passed; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& ch : checks) {
    os << (ch.applicable ? (ch.passed ? "PASS" : "FAIL") : "SKIP") << "  " << ch.name;
    if (!ch.detail.empty()) os << ": " << ch.detail;
    os << '\n';
  }
  return os.str();
}

ValidationReport validate(const DiscreteCondenser& c, bool require_signed_assumptions) {
  ValidationReport r;
  const bool signed_condenser = c.has_positive() && c.has_negative();

  {
    ValidationCheck ch{"plates_nonempty", true, true, ""};
    for (const auto& p : c.plates)
      if (p.points.empty()) {
        ch.passed = false;
        ch.detail = "plate " + std::to_string(p.id) + " has no points";
      }
    r.checks.push_back(ch);
  }
  {
    ValidationCheck ch{"opposite_sign_separation", signed_condenser, true, ""};
    if (signed_condenser) {
      const bool discrete_ok = c.separation > 0.0;
      const bool analytic_ok = !c.analytic_separation || *c.analytic_separation > 0.0;
      ch.passed = discrete_ok && analytic_ok;
      std::ostringstream os;
      os << "closures of opposite-signed plates must be disjoint; sample separation = " << c.separation;
      if (c.analytic_separation) os << ", closure distance = " << *c.analytic_separation;
      ch.detail = os.str();
    } else {
      ch.detail = "only one sign present";
    }
    r.checks.push_back(ch);
  }
  {
    ValidationCheck ch{"g_positive", true, true, ""};
    for (const auto& p : c.plates)
      for (double g : p.g_values)
        if (!(g > 0.0) || !std::isfinite(g)) {
          ch.passed = false;
          ch.detail = "weight function is not positive on plate " + std::to_string(p.id);
        }
    r.checks.push_back(ch);
  }
  {
    const bool applicable = require_signed_assumptions && c.has_negative();
    ValidationCheck ch{"g_inf_positive", applicable, true, ""};
    if (applicable) {
      ch.passed = c.g_inf() > 0.0;
      ch.detail = "g_inf = " + std::to_string(c.g_inf());
    }
    r.checks.push_back(ch);
  }
  {
    const bool applicable = require_signed_assumptions && signed_condenser;
    ValidationCheck ch{"kernel_sup_bound_finite", applicable, true, ""};
    if (applicable) {
      if (!c.kernel_sup_bound) {
        ch.passed = false;
        ch.detail = "no kernel bound to the condenser";
      } else {
        ch.passed = std::isfinite(*c.kernel_sup_bound);
        std::ostringstream os;
        os << "sup over opposite-sign pairs = " << *c.kernel_sup_bound;
        ch.detail = os.str();
      }
    }
    r.checks.push_back(ch);
  }
  {
    ValidationCheck ch{"total_mass_finite", true, std::isfinite(c.total_mass()), ""};
    ch.detail = "|a| = " + std::to_string(c.total_mass());
    r.checks.push_back(ch);
  }
  return r;
}

std::vector<DiscreteCondenser> exhaustion_sequence(std::span<const PlateSpec> specs, const WeightFunction& weight,
                                                   const ExhaustionLevels& levels, std::uint64_t seed) {
  if (specs.empty()) throw InputError("a condenser needs at least one plate");
  if (levels.values.empty()) throw InputError("exhaustion needs at least one level");
  for (std::size_t m = 1; m < levels.values.size(); ++m)
    if (!(levels.values[m] > levels.values[m - 1]))
      throw InputError("non-nested levels: level values must be strictly increasing");
  int dim = 0;
  check_dims(specs, dim);

  std::vector<DiscreteCondenser> out;
  if (levels.kind == ExhaustionLevels::Kind::PointCounts) {
    for (double v : levels.values)
      if (!(v >= 1.0) || v != std::floor(v)) throw InputError("point-count levels must be positive integers");
    for (double v : levels.values) {
      const auto count = static_cast<std::size_t>(v);
      DiscreteCondenser c;
      c.dim = dim;
      c.weight = weight;
      for (const auto& s : specs) {
        PointCloud pts = std::visit(
            [&](const auto& sh) -> PointCloud {
              using T = std::decay_t<decltype(sh)>;
              if constexpr (std::is_same_v<T, SphereShell>) return sampling::nested_sphere(count, sh.center, sh.radius);
              else if constexpr (std::is_same_v<T, Segment>) return sampling::nested_segment(count, sh.a, sh.b);
              else if constexpr (std::is_same_v<T, BallVolume>)
                throw InputError("ball plates refine by radius fractions, not point counts");
              else return sh.points;
            },
            s.shape);
        c.plates.push_back(make_plate(s, std::move(pts), weight, s.shape));
      }
      finalize(c);
      out.push_back(std::move(c));
    }
    return out;
  }

  for (double f : levels.values)
    if (!(f > 0.0 && f <= 1.0)) throw InputError("radius fractions must lie in (0, 1]");
  std::vector<sampling::LayeredBall> balls(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (const auto* b = std::get_if<BallVolume>(&specs[i].shape))
      balls[i] = sampling::layered_ball(b->center, b->radius, specs[i].point_count, levels.values,
                                        plate_seed(seed, specs[i].id));
  for (double f : levels.values) {
    DiscreteCondenser c;
    c.dim = dim;
    c.weight = weight;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& s = specs[i];
      if (const auto* b = std::get_if<BallVolume>(&s.shape)) {
        const double cutoff = f * b->radius * (1.0 + 1e-12);
        const auto& rad = balls[i].point_radius;
        const auto n = static_cast<std::size_t>(std::count_if(rad.begin(), rad.end(), [&](double r) { return r <= cutoff; }));
        c.plates.push_back(make_plate(s, balls[i].points.prefix(n), weight, BallVolume{b->center, f * b->radius}));
      } else {
        c.plates.push_back(make_plate(s, generate(s, seed), weight, s.shape));
      }
    }
    finalize(c);
    out.push_back(std::move(c));
  }
  return out;
}

bool is_prefix_nested(const DiscreteCondenser& inner, const DiscreteCondenser& outer) {
  if (inner.plates.size() != outer.plates.size() || inner.dim != outer.dim) return false;
  for (std::size_t i = 0; i < inner.plates.size(); ++i) {
    const auto& a = inner.plates[i];
    const auto& b = outer.plates[i];
    if (a.id != b.id || a.sign != b.sign || a.mass != b.mass) return false;
    if (a.points.size() > b.points.size()) return false;
    const auto& ca = a.points.coords();
    if (!std::equal(ca.begin(), ca.end(), b.points.coords().begin())) return false;
  }
  return true;
}

PlateGenerator shell_chain(double radius, double spacing, std::vector<double> axis, std::size_t points_per_shell,
                           std::function<double(std::size_t)> mass_rule, bool alternating_signs) {
  const double len = norm(axis);
  if (!(len > 0.0)) throw InputError("shell chain axis must be nonzero");
  for (double& v : axis) v /= len;
  return [=](std::size_t k) {
    std::vector<double> center(axis.size());
    for (std::size_t d = 0; d < axis.size(); ++d) center[d] = static_cast<double>(k) * spacing * axis[d];
    PlateSpec s;
    s.id = static_cast<int>(k);
    s.sign = alternating_signs && k % 2 == 0 ? -1 : 1;
    s.shape = SphereShell{center, radius};
    s.point_count = points_per_shell;
    s.mass = mass_rule(k);
    return s;
  };
}

DiscreteCondenser truncate_family(const PlateGenerator& family, std::size_t n, const WeightFunction& weight,
                                  std::uint64_t seed) {
  if (n < 1) throw InputError("family truncation needs N >= 1");
  std::vector<PlateSpec> specs;
  for (std::size_t k = 1; k <= n; ++k) specs.push_back(family(k));
  auto c = discretize(specs, weight, seed);
  for (std::size_t k = 0; k < c.plates.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto& pk = c.plates[k];
      const auto& pj = c.plates[j];
      if (pk.sign == pj.sign) continue;
      const bool touching = min_cross_distance(pk.points, pj.points) == 0.0 ||
                            closure_distance(*pk.shape, *pj.shape).value_or(1.0) <= 0.0;
      if (touching)
        throw InputError("family generator produces opposite-sign overlap at index " + std::to_string(k + 1));
    }
  }
  return c;
}

}  // namespace condcap
