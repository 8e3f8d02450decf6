#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace condcap {

/// Flat, row-major list of points in R^dim.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(int dim);
  PointCloud(int dim, std::vector<double> coords);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t k) const noexcept {
    return {coords_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  void push_back(std::span<const double> p);
  void append(const PointCloud& other);
  void reserve(std::size_t n) { coords_.reserve(n * static_cast<std::size_t>(dim_)); }

  // First n points.
  PointCloud prefix(std::size_t n) const;

  const std::vector<double>& coords() const noexcept { return coords_; }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  int dim_ = 0;
  std::vector<double> coords_;
};

double squared_distance(std::span<const double> x, std::span<const double> y) noexcept;
double distance(std::span<const double> x, std::span<const double> y) noexcept;
double norm(std::span<const double> x) noexcept;

// Minimum pairwise distance inside one cloud (+inf for fewer than 2 points).
double min_pairwise_distance(const PointCloud& pts);
// Minimum distance between two clouds (+inf if either is empty).
double min_cross_distance(const PointCloud& a, const PointCloud& b);

}  // namespace condcap
