#pragma once

#include <condcap/errors.hpp>
#include <condcap/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace condcap::detail {

// Four-way unrolled dot product; fixed association order.
inline double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

inline void check_coincident(const KernelSpec& spec, std::span<const double> a, std::size_t n) {
  if (spec.smoothing_epsilon > 0.0) return;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      if (k != l && !std::isfinite(a[k * n + l]))
        throw InputError("coincident points with zero smoothing give an infinite kernel entry");
}

// Sets the pivot floor; returns false (certificate negative) if any entry is
// non-finite, e.g. the raw kernel's infinite diagonal.
inline bool prepare_certificate(std::span<const double> a, std::size_t n, PdCertificate& cert) {
  if (a.size() != n * n) throw InputError("certificate: size mismatch");
  double max_diag = 0.0;
  for (std::size_t k = 0; k < n; ++k) max_diag = std::max(max_diag, a[k * n + k]);
  cert.pivot_floor = kPivotFloorFactor * max_diag;
  for (double v : a) {
    if (!std::isfinite(v)) {
      cert.positive_definite = false;
      cert.min_pivot = std::numeric_limits<double>::infinity();
      cert.failed_row = 0;
      return false;
    }
  }
  return true;
}

}  // namespace condcap::detail
