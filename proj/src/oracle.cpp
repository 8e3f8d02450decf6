// Independent check for tiny instances: grid enumeration plus exact KKT solves
// on candidate supports. Shares no code with the projected-gradient path.
#include <condcap/solver.hpp>

#include <condcap/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace condcap {
namespace {

constexpr std::size_t kMaxOraclePoints = 6;

struct Instance {
  std::size_t n = 0;
  std::vector<double> Q;  // Q_kl = s_k s_l K_kl, s = sign / g
  std::vector<std::size_t> plate;
  std::vector<std::size_t> off;
  std::vector<double> mass;

  double energy(const std::vector<double>& u) const {
    double e = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) e += Q[k * n + l] * u[k] * u[l];
    return e;
  }
};

struct GridSearch {
  const Instance& inst;
  int res;
  std::vector<int> counts;
  std::vector<double> u;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_counts;
  std::size_t visited = 0;

  // Coordinates are fixed in global order; the last coordinate of each plate
  // takes the remaining grid units.
  void run(std::size_t k, int remaining, double partial) {
    const std::size_t n = inst.n;
    if (k == n) {
      ++visited;
      if (partial < best) {
        best = partial;
        best_counts = counts;
      }
      return;
    }
    const std::size_t i = inst.plate[k];
    const bool last_in_plate = k + 1 == inst.off[i + 1];
    const int lo = last_in_plate ? remaining : 0;
    const int hi = remaining;
    for (int c = lo; c <= hi; ++c) {
      counts[k] = c;
      u[k] = inst.mass[i] * static_cast<double>(c) / res;
      double cross = 0.0;
      for (std::size_t l = 0; l < k; ++l) cross += inst.Q[k * n + l] * u[l];
      const double e = partial + u[k] * (2.0 * cross + inst.Q[k * n + k] * u[k]);
      const int next_remaining = last_in_plate ? res : remaining - c;
      run(k + 1, next_remaining, e);
    }
  }
};

struct KktCandidate {
  bool feasible = false;
  bool certified = false;  // KKT conditions hold off the support too
  double energy = std::numeric_limits<double>::infinity();
  std::vector<double> u;
};

KktCandidate solve_support(const Instance& inst, const std::vector<bool>& support) {
  const std::size_t n = inst.n;
  const std::size_t P = inst.mass.size();
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; ++k)
    if (support[k]) idx.push_back(k);
  const std::size_t m = idx.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + P), static_cast<Eigen::Index>(m + P));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m + P));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t s = 0; s < m; ++s)
      A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = 2.0 * inst.Q[idx[r] * n + idx[s]];
    const auto pi = static_cast<Eigen::Index>(m + inst.plate[idx[r]]);
    A(static_cast<Eigen::Index>(r), pi) = -1.0;
    A(pi, static_cast<Eigen::Index>(r)) = 1.0;
  }
  for (std::size_t i = 0; i < P; ++i) rhs(static_cast<Eigen::Index>(m + i)) = inst.mass[i];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  KktCandidate cand;
  if (!lu.isInvertible()) return cand;
  const Eigen::VectorXd sol = lu.solve(rhs);

  cand.u.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const double x = sol(static_cast<Eigen::Index>(r));
    if (!std::isfinite(x) || x < -1e-13 * inst.mass[inst.plate[idx[r]]]) return cand;
    cand.u[idx[r]] = std::max(x, 0.0);
  }
  // Restore exact plate masses after clamping roundoff-level negatives.
  for (std::size_t i = 0; i < P; ++i) {
    double s = 0.0;
    for (std::size_t k = inst.off[i]; k < inst.off[i + 1]; ++k) s += cand.u[k];
    if (!(s > 0.0)) return cand;
    for (std::size_t k = inst.off[i]; k < inst.off[i + 1]; ++k) cand.u[k] *= inst.mass[i] / s;
  }
  cand.feasible = true;
  cand.energy = inst.energy(cand.u);

  // Off-support gradients must not undercut the plate multiplier.
  cand.certified = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (support[k]) continue;
    double g = 0.0;
    for (std::size_t l = 0; l < n; ++l) g += 2.0 * inst.Q[k * n + l] * cand.u[l];
    const double nu = sol(static_cast<Eigen::Index>(m + inst.plate[k]));
    if (g < nu - 1e-10 * (std::abs(nu) + 1.0)) cand.certified = false;
  }
  return cand;
}

// Enumerates supports with every `forced` coordinate present, each plate nonempty.
void enumerate_supports(const Instance& inst, const std::vector<bool>& forced, KktCandidate& best,
                        std::size_t& tried) {
  const std::size_t n = inst.n;
  std::vector<std::size_t> free_idx;
  for (std::size_t k = 0; k < n; ++k)
    if (!forced[k]) free_idx.push_back(k);
  const std::size_t combos = std::size_t{1} << free_idx.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    std::vector<bool> support = forced;
    for (std::size_t b = 0; b < free_idx.size(); ++b)
      if (mask & (std::size_t{1} << b)) support[free_idx[b]] = true;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < inst.off.size() && ok; ++i) {
      bool any = false;
      for (std::size_t k = inst.off[i]; k < inst.off[i + 1]; ++k) any = any || support[k];
      ok = any;
    }
    if (!ok) continue;
    ++tried;
    auto cand = solve_support(inst, support);
    if (!cand.feasible) continue;
    const bool better = (cand.certified && !best.certified) ||
                        (cand.certified == best.certified && cand.energy < best.energy);
    if (better) best = std::move(cand);
  }
}

}  // namespace

OracleResult brute_force_oracle(const DiscreteCondenser& c, const KernelMatrix& K, int grid_resolution) {
  const std::size_t n = c.total_points();
  if (n > kMaxOraclePoints) throw InputError("brute-force oracle is limited to 6 points in total");
  if (grid_resolution < 100) throw InputError("brute-force oracle needs grid resolution >= 100");
  if (K.size() != n) throw InputError("kernel matrix does not match the condenser");
  for (const auto& p : c.plates)
    if (p.points.empty()) throw InputError("brute-force oracle: empty plate");

  Instance inst;
  inst.n = n;
  inst.off = c.offsets();
  inst.mass = c.masses();
  std::vector<double> s;
  for (std::size_t i = 0; i < c.plates.size(); ++i)
    for (std::size_t k = 0; k < c.plates[i].points.size(); ++k) {
      s.push_back(c.plates[i].sign / c.plates[i].g_values[k]);
      inst.plate.push_back(i);
    }
  inst.Q.resize(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) inst.Q[k * n + l] = s[k] * s[l] * K(k, l);

  GridSearch grid{inst, grid_resolution, std::vector<int>(n, 0), std::vector<double>(n, 0.0),
                  std::numeric_limits<double>::infinity(), std::vector<int>(n, 0), 0};
  grid.run(0, grid_resolution, 0.0);

  std::vector<double> u_grid(n);
  for (std::size_t k = 0; k < n; ++k)
    u_grid[k] = inst.mass[inst.plate[k]] * static_cast<double>(grid.best_counts[k]) / grid_resolution;

  // Refinement around the best cell: coordinates more than two grid steps away
  // from zero stay in the support, the rest may enter or leave it.
  std::vector<bool> forced(n);
  for (std::size_t k = 0; k < n; ++k) forced[k] = grid.best_counts[k] > 2;
  KktCandidate best;
  std::size_t tried = 0;
  enumerate_supports(inst, forced, best, tried);
  if (!best.certified) enumerate_supports(inst, std::vector<bool>(n, false), best, tried);

  OracleResult out;
  out.grid_points = grid.visited;
  out.refinement_candidates = tried;
  const std::vector<double>& u = (best.feasible && best.energy < grid.best) ? best.u : u_grid;
  out.energy = (best.feasible && best.energy < grid.best) ? best.energy : grid.best;
  out.weights.weights.resize(c.plates.size());
  for (std::size_t i = 0; i < c.plates.size(); ++i)
    for (std::size_t k = 0; k < c.plates[i].points.size(); ++k)
      out.weights.weights[i].push_back(u[inst.off[i] + k] / c.plates[i].g_values[k]);
  return out;
}

}  // namespace condcap
