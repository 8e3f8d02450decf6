#include <condcap/geometry.hpp>

#include <condcap/errors.hpp>

#include <cmath>
#include <limits>

namespace condcap {

PointCloud::PointCloud(int dim) : dim_(dim) {
  if (dim < 1) throw InputError("point dimension must be positive");
}

PointCloud::PointCloud(int dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim < 1) throw InputError("point dimension must be positive");
  if (coords_.size() % static_cast<std::size_t>(dim) != 0)
    throw InputError("coordinate count is not a multiple of the dimension");
}

void PointCloud::push_back(std::span<const double> p) {
  if (p.size() != static_cast<std::size_t>(dim_)) throw InputError("point dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

void PointCloud::append(const PointCloud& other) {
  if (other.empty()) return;
  if (other.dim_ != dim_) throw InputError("point dimension mismatch");
  coords_.insert(coords_.end(), other.coords_.begin(), other.coords_.end());
}

PointCloud PointCloud::prefix(std::size_t n) const {
  const auto d = static_cast<std::size_t>(dim_);
  if (n > size()) n = size();
  return PointCloud(dim_, std::vector<double>(coords_.begin(), coords_.begin() + static_cast<std::ptrdiff_t>(n * d)));
}

double squared_distance(std::span<const double> x, std::span<const double> y) noexcept {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double t = x[d] - y[d];
    s += t * t;
  }
  return s;
}

double distance(std::span<const double> x, std::span<const double> y) noexcept {
  return std::sqrt(squared_distance(x, y));
}

double norm(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double min_pairwise_distance(const PointCloud& pts) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = pts.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) best = std::min(best, squared_distance(pts[k], pts[l]));
  return std::sqrt(best);
}

double min_cross_distance(const PointCloud& a, const PointCloud& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t l = 0; l < b.size(); ++l) best = std::min(best, squared_distance(a[k], b[l]));
  return std::sqrt(best);
}

}  // namespace condcap
