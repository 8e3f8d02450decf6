// Serial reference implementations of the OpenMP kernels in assembly.cpp.
#include <condcap/kernels.hpp>

#include <condcap/errors.hpp>

#include "linalg_detail.hpp"

#include <cmath>
#include <limits>

namespace condcap::reference {

KernelMatrix assemble_matrix(const KernelSpec& spec, const PointCloud& pts) {
  validate_spec(spec);
  check_points(spec, pts);
  const std::size_t n = pts.size();
  std::vector<double> a(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      a[k * n + l] = kernel_value(spec, pts[k], pts[l]);
      a[l * n + k] = a[k * n + l];
    }
  }
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
    for (std::size_t j = i + 1; j < n; ++j)
      L[j * n + i] = (entries[j * n + i] - detail::dot(li, L.data() + j * n, i)) / d;
  }
  cert.positive_definite = true;
  cert.min_pivot = n == 0 ? 0.0 : min_pivot;
  return cert;
}

void matvec(const KernelMatrix& K, std::span<const double> x, std::span<double> y) {
  const std::size_t n = K.size();
  if (x.size() != n || y.size() != n) throw InputError("matvec: size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = K.row(k);
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += row[l] * x[l];
    y[k] = s;
  }
}

}  // namespace condcap::reference
