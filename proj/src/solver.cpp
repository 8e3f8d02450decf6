#include <condcap/solver.hpp>

#include <condcap/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace condcap {

void validate_options(const SolveOptions& opts) {
  if (opts.max_iterations < 1) throw InputError("max_iterations must be >= 1");
  if (!(opts.gap_tolerance > 0.0)) throw InputError("gap_tolerance must be positive");
  if (!(opts.armijo_shrink > 0.0 && opts.armijo_shrink < 1.0)) throw InputError("armijo shrink must lie in (0, 1)");
  if (!(opts.armijo_sufficient_decrease > 0.0 && opts.armijo_sufficient_decrease < 0.5))
    throw InputError("armijo sufficient-decrease constant must lie in (0, 0.5)");
}

std::vector<double> project_scaled_simplex(std::span<const double> u, double target) {
  if (!(target > 0.0) || !std::isfinite(target)) throw InputError("simplex target must be positive");
  for (double x : u)
    if (!std::isfinite(x)) throw InputError("simplex projection input must be finite");
  const std::size_t n = u.size();
  if (n == 0) throw InputError("cannot project onto an empty simplex");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });

  double cumsum = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cumsum += u[order[j]];
    const double t = (cumsum - target) / static_cast<double>(j + 1);
    if (u[order[j]] - t > 0.0) tau = t;
    else break;
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = std::max(u[k] - tau, 0.0);
  return out;
}

double support_threshold(const DiscretePlate& plate, std::size_t k, double factor) {
  return factor * plate.mass / static_cast<double>(plate.points.size()) / plate.g_values[k];
}

namespace {

struct Problem {
  std::vector<double> scale;  // sign / g
  std::vector<std::size_t> off;
  std::vector<double> mass;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Evaluates v = scale * u, Kv, energy = v.Kv.
double evaluate(const Problem& P, const KernelMatrix& K, std::span<const double> u, std::vector<double>& v,
                std::vector<double>& Kv) {
  for (std::size_t k = 0; k < u.size(); ++k) v[k] = P.scale[k] * u[k];
  matvec(K, v, Kv);
  return dot(v, Kv);
}

// Sum over plates of d.(h - c_i), with c_i the plate minimum of h. Feasible steps
// keep every plate's total of d at zero, so the shift changes nothing in exact
// arithmetic. Numerically it removes the projection's mass roundoff, which would
// otherwise be multiplied by the potential and swamp the true value near the
// optimum; the minimum is the level h approaches on the support, where d lives.
double shifted_dot(const Problem& P, std::span<const double> d, std::span<const double> h) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < P.off.size(); ++i) {
    const std::size_t b = P.off[i], e = P.off[i + 1];
    const double level = *std::min_element(h.begin() + static_cast<std::ptrdiff_t>(b),
                                            h.begin() + static_cast<std::ptrdiff_t>(e));
    for (std::size_t k = b; k < e; ++k) s += d[k] * (h[k] - level);
  }
  return s;
}

// Frank-Wolfe gap sum_i [<grad_i, u_i> - a_i min grad_i], written as
// sum_k u_k (grad_k - min_i) so it is exact on the feasible set and never negative.
double fw_gap(const Problem& P, std::span<const double> u, std::span<const double> grad) {
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < P.off.size(); ++i) {
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = P.off[i]; k < P.off[i + 1]; ++k) gmin = std::min(gmin, grad[k]);
    for (std::size_t k = P.off[i]; k < P.off[i + 1]; ++k) gap += u[k] * (grad[k] - gmin);
  }
  return gap;
}

void project(const Problem& P, std::span<const double> y, std::span<double> out) {
  for (std::size_t i = 0; i + 1 < P.off.size(); ++i) {
    const auto seg = y.subspan(P.off[i], P.off[i + 1] - P.off[i]);
    const auto proj = project_scaled_simplex(seg, P.mass[i]);
    std::copy(proj.begin(), proj.end(), out.begin() + static_cast<std::ptrdiff_t>(P.off[i]));
  }
}

}  // namespace

SolveResult solve_min_energy(const DiscreteCondenser& c, const KernelMatrix& K, const SolveOptions& opts) {
  validate_options(opts);
  for (const auto& p : c.plates)
    if (p.points.empty()) throw InputError("plate " + std::to_string(p.id) + " is empty: capacity-zero degenerate case");
  if (K.size() != c.total_points()) throw InputError("kernel matrix does not match the condenser");
  if (!K.pd_certificate().positive_definite)
    throw InputError("kernel matrix is not certified positive definite; refusing to solve");

  Problem P;
  P.off = c.offsets();
  P.mass = c.masses();
  for (const auto& p : c.plates)
    for (double g : p.g_values) {
      if (!(g > 0.0)) throw InputError("weight function must be positive at every point");
      P.scale.push_back(p.sign / g);
    }
  const std::size_t n = c.total_points();

  // u = w * g
  std::vector<double> u(n);
  if (opts.warm_start) {
    check_measure(c, *opts.warm_start);
    for (std::size_t i = 0; i < c.plates.size(); ++i)
      for (std::size_t k = 0; k < c.plates[i].points.size(); ++k)
        u[P.off[i] + k] = opts.warm_start->weights[i][k] * c.plates[i].g_values[k];
    // Re-project so the start is exactly feasible.
    std::vector<double> y = u;
    project(P, y, u);
  } else {
    for (std::size_t i = 0; i < c.plates.size(); ++i)
      for (std::size_t k = P.off[i]; k < P.off[i + 1]; ++k)
        u[k] = P.mass[i] / static_cast<double>(P.off[i + 1] - P.off[i]);
  }

  const double gmin = c.g_inf();
  const double L = 2.0 * K.max_abs_row_sum() / (gmin * gmin);
  const double step_fixed = 1.0 / L;

  SolveResult res;
  res.lipschitz = L;
  std::vector<double> v(n), Kv(n), grad(n), y(n), u_new(n), v_new(n), Kv_new(n);
  double E = evaluate(P, K, u, v, Kv);
  double step = step_fixed;
  std::size_t it = 0;

  std::vector<double> d(n), h(n);
  // E(u_new) - E(u) = sum_k d_k s_k (Kv_new + Kv)_k with d = u_new - u.
  const auto energy_change = [&] {
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = u_new[k] - u[k];
      h[k] = P.scale[k] * (Kv_new[k] + Kv[k]);
    }
    return shifted_dot(P, d, h);
  };
  const auto step_descent = [&] {
    for (std::size_t k = 0; k < n; ++k) d[k] = u_new[k] - u[k];
    return shifted_dot(P, d, grad);
  };
  double gap = 0.0;

  for (;; ++it) {
    for (std::size_t k = 0; k < n; ++k) grad[k] = 2.0 * P.scale[k] * Kv[k];
    gap = fw_gap(P, u, grad);
    if (opts.record_trace) res.trace.push_back({it, E, gap});
    if (gap <= opts.gap_tolerance * E) {
      res.converged = true;
      break;
    }
    if (it >= opts.max_iterations) break;

    double E_new = 0.0;
    bool accepted = false;
    if (opts.step_rule == StepRule::FixedInverseLipschitz) {
      for (std::size_t k = 0; k < n; ++k) y[k] = u[k] - step_fixed * grad[k];
      project(P, y, u_new);
      E_new = evaluate(P, K, u_new, v_new, Kv_new);
      accepted = energy_change() <= 0.0;
    } else {
      double t = std::min(2.0 * step, 1e6 * step_fixed);
      for (;;) {
        for (std::size_t k = 0; k < n; ++k) y[k] = u[k] - t * grad[k];
        project(P, y, u_new);
        E_new = evaluate(P, K, u_new, v_new, Kv_new);
        const double descent = step_descent();
        const double change = energy_change();
        if (change <= opts.armijo_sufficient_decrease * descent) {
          accepted = true;
          break;
        }
        if (t <= step_fixed) {
          // The descent lemma guarantees sufficient decrease here; failure is roundoff.
          accepted = change <= 0.0;
          break;
        }
        t = std::max(t * opts.armijo_shrink, step_fixed);
      }
      step = t;
    }
    if (!accepted) break;  // stagnation at roundoff level
    u.swap(u_new);
    v.swap(v_new);
    Kv.swap(Kv_new);
    E = E_new;
  }

  res.iterations_used = it;
  res.minimizer.weights.resize(c.plates.size());
  for (std::size_t i = 0; i < c.plates.size(); ++i) {
    auto& w = res.minimizer.weights[i];
    w.resize(c.plates[i].points.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = u[P.off[i] + k] / c.plates[i].g_values[k];
  }
  const auto eb = energy_breakdown(c, K, res.minimizer);
  res.minimal_energy = eb.total;
  res.per_plate_interaction = eb.per_plate_interaction;
  res.relative_gap = gap / E;
  return res;
}

}  // namespace condcap
