#include <condcap/sampling.hpp>

#include <condcap/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace condcap::sampling {
namespace {

void check_center(std::span<const double> center) {
  if (center.size() != 2 && center.size() != 3)
    throw InputError("sphere and ball plates are supported in dimensions 2 and 3");
}

PointCloud place(std::span<const double> center, double radius, const std::vector<std::array<double, 3>>& unit) {
  const int d = static_cast<int>(center.size());
  PointCloud out(d);
  out.reserve(unit.size());
  std::array<double, 3> p{};
  for (const auto& u : unit) {
    for (int k = 0; k < d; ++k) p[static_cast<std::size_t>(k)] = center[static_cast<std::size_t>(k)] + radius * u[static_cast<std::size_t>(k)];
    out.push_back(std::span<const double>(p.data(), static_cast<std::size_t>(d)));
  }
  return out;
}

std::vector<std::array<double, 3>> unit_lattice(std::size_t n, int dim) {
  std::vector<std::array<double, 3>> u(n);
  if (dim == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      u[i] = {std::cos(t), std::sin(t), 0.0};
    }
    return u;
  }
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = golden_angle * static_cast<double>(i);
    u[i] = {r * std::cos(t), r * std::sin(t), z};
  }
  return u;
}

using Rotation = std::array<std::array<double, 3>, 3>;

// Uniformly distributed rotation (Shoemake's quaternion method in 3D).
Rotation random_rotation(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  if (dim == 2) {
    const double t = 2.0 * std::numbers::pi * U(rng);
    return {{{std::cos(t), -std::sin(t), 0.0}, {std::sin(t), std::cos(t), 0.0}, {0.0, 0.0, 1.0}}};
  }
  const double u1 = U(rng), u2 = U(rng), u3 = U(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double w = a * std::sin(2.0 * std::numbers::pi * u2), x = a * std::cos(2.0 * std::numbers::pi * u2);
  const double y = b * std::sin(2.0 * std::numbers::pi * u3), z = b * std::cos(2.0 * std::numbers::pi * u3);
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

}  // namespace

double van_der_corput(std::uint64_t k, unsigned base) noexcept {
  double q = 0.0, f = 1.0 / base;
  while (k > 0) {
    q += static_cast<double>(k % base) * f;
    k /= base;
    f /= base;
  }
  return q;
}

PointCloud sphere_lattice(std::size_t n, std::span<const double> center, double radius) {
  check_center(center);
  return place(center, radius, unit_lattice(n, static_cast<int>(center.size())));
}

PointCloud nested_sphere(std::size_t n, std::span<const double> center, double radius) {
  check_center(center);
  std::vector<std::array<double, 3>> u(n);
  if (center.size() == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * van_der_corput(i);
      u[i] = {std::cos(t), std::sin(t), 0.0};
    }
  } else {
    constexpr double plastic = 1.324717957244746025960908854;
    const double a1 = 1.0 / plastic, a2 = 1.0 / (plastic * plastic);
    for (std::size_t i = 0; i < n; ++i) {
      const double fi = static_cast<double>(i);
      const double t1 = std::fmod(0.5 + a1 * fi, 1.0);
      const double t2 = std::fmod(0.5 + a2 * fi, 1.0);
      const double z = 1.0 - 2.0 * t1;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = 2.0 * std::numbers::pi * t2;
      u[i] = {r * std::cos(phi), r * std::sin(phi), z};
    }
  }
  return place(center, radius, u);
}

PointCloud segment_lattice(std::size_t n, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw InputError("segment endpoints must share a dimension");
  PointCloud out(static_cast<int>(a.size()));
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t d = 0; d < a.size(); ++d) p[d] = a[d] + t * (b[d] - a[d]);
    out.push_back(p);
  }
  return out;
}

PointCloud nested_segment(std::size_t n, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw InputError("segment endpoints must share a dimension");
  PointCloud out(static_cast<int>(a.size()));
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i == 0 ? 0.0 : i == 1 ? 1.0 : van_der_corput(i - 1);
    for (std::size_t d = 0; d < a.size(); ++d) p[d] = a[d] + t * (b[d] - a[d]);
    out.push_back(p);
  }
  return out;
}

LayeredBall layered_ball(std::span<const double> center, double radius, std::size_t boundary_count,
                         std::span<const double> extra_radii, std::uint64_t seed) {
  check_center(center);
  if (!(radius > 0.0)) throw InputError("ball radius must be positive");
  if (boundary_count < 1) throw InputError("ball boundary point count must be positive");
  const int dim = static_cast<int>(center.size());

  // Radial spacing matched to the in-layer spacing of the boundary layer.
  const double nb = static_cast<double>(boundary_count);
  const double layers_f = dim == 3 ? std::sqrt(nb) / 3.8 : nb / (2.0 * std::numbers::pi);
  const auto layers = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(layers_f)));
  const double h = 1.0 / static_cast<double>(layers);

  std::vector<double> fracs;
  for (double f : extra_radii) {
    if (!(f > 0.0 && f <= 1.0)) throw InputError("ball radius fractions must lie in (0, 1]");
    fracs.push_back(f);
  }
  std::vector<double> grid;
  for (std::size_t j = 1; j <= layers; ++j) {
    const double r = static_cast<double>(j) * h;
    const bool near_forced =
        std::any_of(fracs.begin(), fracs.end(), [&](double f) { return std::abs(r - f) < 0.5 * h - 1e-12; });
    if (!near_forced) grid.push_back(r);
  }
  grid.insert(grid.end(), fracs.begin(), fracs.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }),
             grid.end());

  std::mt19937_64 rng(seed);
  LayeredBall out{PointCloud(dim), {}};
  std::array<double, 3> q{};
  for (double f : grid) {
    const double scale = dim == 3 ? f * f : f;
    const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(nb * scale)));
    const auto unit = unit_lattice(count, dim);
    const Rotation R = random_rotation(dim, rng);
    for (const auto& u : unit) {
      for (int r = 0; r < dim; ++r) {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) s += R[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * u[static_cast<std::size_t>(c)];
        q[static_cast<std::size_t>(r)] = center[static_cast<std::size_t>(r)] + f * radius * s;
      }
      out.points.push_back(std::span<const double>(q.data(), static_cast<std::size_t>(dim)));
      out.point_radius.push_back(f * radius);
    }
  }
  return out;
}

}  // namespace condcap::sampling
