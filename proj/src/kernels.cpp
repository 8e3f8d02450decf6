#include <condcap/kernels.hpp>

#include <condcap/errors.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace condcap {

std::string KernelSpec::describe() const {
  std::ostringstream os;
  if (family == KernelFamily::Riesz)
    os << "riesz(alpha=" << alpha << ", dim=" << dim << ", eps=" << smoothing_epsilon << ")";
  else
    os << "log_unit_disk(eps=" << smoothing_epsilon << ")";
  return os.str();
}

void validate_spec(const KernelSpec& spec) {
  if (!std::isfinite(spec.smoothing_epsilon) || spec.smoothing_epsilon < 0.0)
    throw InputError("kernel smoothing epsilon must be finite and nonnegative");
  switch (spec.family) {
    case KernelFamily::Riesz:
      if (spec.dim < 2) throw InputError("Riesz kernel requires dim >= 2");
      if (!(spec.alpha > 0.0) || !(spec.alpha < spec.dim))
        throw InputError("Riesz kernel requires 0 < alpha < dim");
      break;
    case KernelFamily::LogUnitDisk:
      if (spec.dim != 2) throw InputError("logarithmic kernel requires dim == 2");
      break;
  }
}

void check_points(const KernelSpec& spec, const PointCloud& pts) {
  if (pts.empty()) return;
  if (pts.dim() != spec.dim) throw InputError("point dimension does not match kernel dimension");
  if (spec.family == KernelFamily::LogUnitDisk) {
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (!(norm(pts[k]) < 1.0)) throw InputError("logarithmic kernel: point outside the open unit disk");
  }
}

double kernel_value(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) noexcept {
  const double r2 = squared_distance(x, y) + spec.smoothing_epsilon * spec.smoothing_epsilon;
  if (spec.family == KernelFamily::LogUnitDisk) return -0.5 * std::log(r2);
  const double p = 0.5 * (spec.alpha - spec.dim);
  if (p == -0.5) return 1.0 / std::sqrt(r2);
  return std::pow(r2, p);
}

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  validate_spec(spec);
  const auto d = static_cast<std::size_t>(spec.dim);
  if (x.size() != d || y.size() != d) throw InputError("point dimension does not match kernel dimension");
  if (spec.family == KernelFamily::LogUnitDisk && !(norm(x) < 1.0 && norm(y) < 1.0))
    throw InputError("logarithmic kernel: point outside the open unit disk");
  return kernel_value(spec, x, y);
}

KernelMatrix::KernelMatrix(std::size_t n, std::vector<double> entries, PdCertificate cert)
    : n_(n), entries_(std::move(entries)), cert_(cert) {
  if (entries_.size() != n * n) throw InputError("kernel matrix entry count mismatch");
  for (std::size_t k = 0; k < n_; ++k) {
    double s = 0.0;
    for (double v : row(k)) s += std::abs(v);
    max_abs_row_sum_ = std::max(max_abs_row_sum_, s);
  }
}

double shell_potential_oracle(int dim, double radius, std::span<const double> x) {
  if (dim < 3) throw InputError("shell potential oracle requires dim >= 3");
  if (!(radius > 0.0)) throw InputError("shell radius must be positive");
  if (x.size() != static_cast<std::size_t>(dim)) throw InputError("point dimension mismatch");
  const double r = norm(x);
  return std::pow(std::max(r, radius), 2.0 - dim);
}

}  // namespace condcap
