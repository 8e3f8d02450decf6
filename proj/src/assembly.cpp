// OpenMP kernels. Each output row is owned by exactly one thread and summed in
// a fixed order, so results are bit-identical to the serial reference.
#include <condcap/kernels.hpp>

#include <condcap/errors.hpp>

#include "linalg_detail.hpp"

#include <cmath>
#include <limits>

namespace condcap {

KernelMatrix assemble_matrix(const KernelSpec& spec, const PointCloud& pts) {
  validate_spec(spec);
  check_points(spec, pts);
  const std::size_t n = pts.size();
  std::vector<double> a(n * n);
  const auto ni = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < ni; ++k)
    for (std::size_t l = static_cast<std::size_t>(k); l < n; ++l)
      a[static_cast<std::size_t>(k) * n + l] = kernel_value(spec, pts[static_cast<std::size_t>(k)], pts[l]);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < ni; ++k)
    for (std::size_t l = 0; l < static_cast<std::size_t>(k); ++l)
      a[static_cast<std::size_t>(k) * n + l] = a[l * n + static_cast<std::size_t>(k)];

  detail::check_coincident(spec, a, n);
  auto cert = certify_positive_definite(a, n);
  return KernelMatrix(n, std::move(a), cert);
}

PdCertificate certify_positive_definite(std::span<const double> entries, std::size_t n) {
  PdCertificate cert;
  if (!detail::prepare_certificate(entries, n, cert)) return cert;

  std::vector<double> L(n * n, 0.0);
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = L.data() + i * n;
    const double s = entries[i * n + i] - detail::dot(li, li, i);
    if (!(s > cert.pivot_floor)) {
      cert.min_pivot = std::min(min_pivot, s);
      cert.failed_row = i;
      return cert;
    }
    min_pivot = std::min(min_pivot, s);
    const double d = std::sqrt(s);
    L[i * n + i] = d;
    const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + 1; j < ni; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      L[ju * n + i] = (entries[ju * n + i] - detail::dot(li, L.data() + ju * n, i)) / d;
    }
  }
  cert.positive_definite = true;
  cert.min_pivot = n == 0 ? 0.0 : min_pivot;
  return cert;
}

void matvec(const KernelMatrix& K, std::span<const double> x, std::span<double> y) {
  const std::size_t n = K.size();
  if (x.size() != n || y.size() != n) throw InputError("matvec: size mismatch");
  const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < ni; ++k) {
    const auto row = K.row(static_cast<std::size_t>(k));
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += row[l] * x[l];
    y[static_cast<std::size_t>(k)] = s;
  }
}

}  // namespace condcap
