#include <condcap/measures.hpp>

#include <condcap/errors.hpp>

#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace condcap {

CondenserMeasure CondenserMeasure::zeros(const DiscreteCondenser& c) {
  CondenserMeasure m;
  for (const auto& p : c.plates) m.weights.emplace_back(p.points.size(), 0.0);
  return m;
}

CondenserMeasure CondenserMeasure::scaled(double s) const {
  CondenserMeasure m = *this;
  for (auto& w : m.weights)
    for (double& x : w) x *= s;
  return m;
}

void check_measure(const DiscreteCondenser& c, const CondenserMeasure& m) {
  if (m.weights.size() != c.plates.size()) throw InputError("measure has the wrong number of plates");
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    if (m.weights[i].size() != c.plates[i].points.size())
      throw InputError("measure weights do not match the point count of plate " + std::to_string(c.plates[i].id));
    for (double w : m.weights[i])
      if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("measure weights must be finite and nonnegative");
  }
}

std::vector<double> flatten(const DiscreteCondenser& c, const CondenserMeasure& m) {
  check_measure(c, m);
  std::vector<double> v;
  v.reserve(c.total_points());
  for (std::size_t i = 0; i < c.plates.size(); ++i)
    for (double w : m.weights[i]) v.push_back(c.plates[i].sign * w);
  return v;
}

double potential_at(const DiscreteCondenser& c, const KernelSpec& spec, const CondenserMeasure& m,
                    std::span<const double> x) {
  check_measure(c, m);
  validate_spec(spec);
  if (x.size() != static_cast<std::size_t>(spec.dim)) throw InputError("probe point dimension mismatch");
  double s = 0.0;
  bool hit_pos = false, hit_neg = false;
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    const auto& p = c.plates[i];
    for (std::size_t k = 0; k < p.points.size(); ++k) {
      const double w = m.weights[i][k];
      if (w == 0.0) continue;
      const double kv = kernel_value(spec, x, p.points[k]);
      if (!std::isfinite(kv)) {
        (p.sign > 0 ? hit_pos : hit_neg) = true;
        continue;
      }
      s += p.sign * w * kv;
    }
  }
  if (hit_pos && hit_neg) throw InputError("potential undefined: probe hits charges of both signs");
  if (hit_pos) return std::numeric_limits<double>::infinity();
  if (hit_neg) return -std::numeric_limits<double>::infinity();
  return s;
}

double potential_at(const KernelMatrix& K, std::span<const double> signed_weights, std::size_t k) {
  if (signed_weights.size() != K.size() || k >= K.size()) throw InputError("potential_at: index or size mismatch");
  const auto row = K.row(k);
  double s = 0.0;
  for (std::size_t l = 0; l < row.size(); ++l) s += row[l] * signed_weights[l];
  return s;
}

std::vector<double> carrier_potentials(const KernelMatrix& K, std::span<const double> signed_weights) {
  std::vector<double> y(K.size());
  matvec(K, signed_weights, y);
  return y;
}

namespace {

// Block sums B_ij = sum_{k in i} w1_k sum_{l in j} K_kl w2_l, row-major.
std::vector<double> block_sums(const DiscreteCondenser& c, const KernelMatrix& K, const CondenserMeasure& m1,
                               const CondenserMeasure& m2) {
  check_measure(c, m1);
  check_measure(c, m2);
  if (K.size() != c.total_points()) throw InputError("kernel matrix does not match the condenser");
  const auto off = c.offsets();
  const std::size_t P = c.plates.size();
  std::vector<double> B(P * P, 0.0);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = 0; j < P; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < c.plates[i].points.size(); ++k) {
        const double wk = m1.weights[i][k];
        const auto row = K.row(off[i] + k);
        double r = 0.0;
        for (std::size_t l = 0; l < c.plates[j].points.size(); ++l) r += row[off[j] + l] * m2.weights[j][l];
        s += wk * r;
      }
      B[i * P + j] = s;
    }
  }
  return B;
}

}  // namespace

EnergyBreakdown energy_breakdown(const DiscreteCondenser& c, const KernelMatrix& K, const CondenserMeasure& m) {
  const auto B = block_sums(c, K, m, m);
  const std::size_t P = c.plates.size();
  EnergyBreakdown e;
  e.per_plate_interaction.assign(P, 0.0);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = 0; j < P; ++j) {
      const double b = B[i * P + j];
      e.per_plate_interaction[i] += c.plates[j].sign * b;
      e.total += c.plates[i].sign * c.plates[j].sign * b;
    }
  }
  return e;
}

double energy(const DiscreteCondenser& c, const KernelMatrix& K, const CondenserMeasure& m) {
  return energy_breakdown(c, K, m).total;
}

double mutual_energy(const DiscreteCondenser& c, const KernelMatrix& K, const CondenserMeasure& m1,
                     const CondenserMeasure& m2) {
  const auto B = block_sums(c, K, m1, m2);
  const std::size_t P = c.plates.size();
  double total = 0.0;
  for (std::size_t i = 0; i < P; ++i)
    for (std::size_t j = 0; j < P; ++j) total += c.plates[i].sign * c.plates[j].sign * B[i * P + j];
  return total;
}

double quadratic_form(const KernelMatrix& K, std::span<const double> v) {
  if (v.size() != K.size()) throw InputError("quadratic_form: size mismatch");
  std::vector<double> Kv(v.size());
  matvec(K, v, Kv);
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * Kv[k];
  return s;
}

double plate_mass(const DiscreteCondenser& c, const CondenserMeasure& m, std::size_t plate) {
  if (plate >= c.plates.size()) throw InputError("plate index out of range");
  check_measure(c, m);
  double s = 0.0;
  const auto& g = c.plates[plate].g_values;
  for (std::size_t k = 0; k < g.size(); ++k) s += m.weights[plate][k] * g[k];
  return s;
}

CondenserMeasure random_feasible_measure(const DiscreteCondenser& c, std::uint64_t seed, double mass_scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  CondenserMeasure m;
  for (const auto& p : c.plates) {
    if (p.points.empty()) throw InputError("cannot build a feasible measure on an empty plate");
    std::vector<double> w(p.points.size());
    double mass = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      w[k] = U(rng) + 1e-3;
      mass += w[k] * p.g_values[k];
    }
    const double s = mass_scale * p.mass / mass;
    for (double& x : w) x *= s;
    m.weights.push_back(std::move(w));
  }
  return m;
}

CondenserMeasure uniform_measure(const DiscreteCondenser& c) {
  CondenserMeasure m;
  for (const auto& p : c.plates) {
    if (p.points.empty()) throw InputError("cannot build a feasible measure on an empty plate");
    std::vector<double> w(p.points.size());
    const double u = p.mass / static_cast<double>(p.points.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = u / p.g_values[k];
    m.weights.push_back(std::move(w));
  }
  return m;
}

std::uint64_t fingerprint(const DiscreteCondenser& c) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& p : c.plates) {
    mix(&p.id, sizeof p.id);
    mix(&p.sign, sizeof p.sign);
    const auto& xs = p.points.coords();
    mix(xs.data(), xs.size() * sizeof(double));
  }
  return h;
}

std::string fingerprint_hex(const DiscreteCondenser& c) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fingerprint(c);
  return os.str();
}

}  // namespace condcap
