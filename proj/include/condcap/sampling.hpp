#pragma once

#include <condcap/geometry.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace condcap::sampling {

// Spherical Fibonacci lattice (3D) or equispaced circle (2D). Not nested across n.
PointCloud sphere_lattice(std::size_t n, std::span<const double> center, double radius);

// Prefix-nested quasi-uniform sphere points: the first m points of
// nested_sphere(n) equal nested_sphere(m). 3D uses the plastic-number (R2)
// Kronecker sequence under the area-preserving map, 2D uses van der Corput angles.
PointCloud nested_sphere(std::size_t n, std::span<const double> center, double radius);

// n equispaced points on [a, b] including the endpoints (midpoint when n == 1).
PointCloud segment_lattice(std::size_t n, std::span<const double> a, std::span<const double> b);

// Prefix-nested segment points: a, b, then van der Corput fractions.
PointCloud nested_segment(std::size_t n, std::span<const double> a, std::span<const double> b);

double van_der_corput(std::uint64_t k, unsigned base = 2) noexcept;

/// Layered ball: concentric sphere layers of equal areal density whose outermost
/// layer holds `boundary_count` points. `extra_radii` (fractions of the radius in
/// (0, 1]) are forced to be layers. Each layer is rotated by a seeded random
/// rotation. Points are ordered by layer radius, innermost first, so every
/// radius filter is a prefix.
struct LayeredBall {
  PointCloud points;
  std::vector<double> point_radius;  // layer radius of each point
};
LayeredBall layered_ball(std::span<const double> center, double radius, std::size_t boundary_count,
                         std::span<const double> extra_radii, std::uint64_t seed);

}  // namespace condcap::sampling
