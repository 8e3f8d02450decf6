#pragma once

#include <condcap/geometry.hpp>

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace condcap {

enum class KernelFamily { Riesz, LogUnitDisk };

/// Symmetric kernel with optional smoothing.
///
/// Riesz:        (|x-y|^2 + eps^2)^((alpha-dim)/2), requires 0 < alpha < dim, dim >= 2.
/// LogUnitDisk:  -1/2 log(|x-y|^2 + eps^2), dim == 2, points inside the open unit disk.
///
/// With eps == 0 the raw kernel is returned (+inf on the diagonal).
struct KernelSpec {
  KernelFamily family = KernelFamily::Riesz;
  double alpha = 2.0;
  int dim = 3;
  double smoothing_epsilon = 0.0;

  static KernelSpec riesz(double alpha, int dim, double epsilon = 0.0) {
    return {KernelFamily::Riesz, alpha, dim, epsilon};
  }
  static KernelSpec newtonian(int dim, double epsilon = 0.0) { return riesz(2.0, dim, epsilon); }
  static KernelSpec log_unit_disk(double epsilon = 0.0) { return {KernelFamily::LogUnitDisk, 0.0, 2, epsilon}; }

  bool is_newtonian() const noexcept { return family == KernelFamily::Riesz && alpha == 2.0 && dim >= 3; }
  KernelSpec with_epsilon(double eps) const {
    KernelSpec s = *this;
    s.smoothing_epsilon = eps;
    return s;
  }
  std::string describe() const;
};

// Throws InputError when the parameters are outside the admissible range.
void validate_spec(const KernelSpec& spec);

// Throws InputError on dimension mismatch or a LogUnitDisk point outside the disk.
void check_points(const KernelSpec& spec, const PointCloud& pts);

/// Kernel value at (x, y); does not validate the spec (hot path).
double kernel_value(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) noexcept;

/// Checked evaluation.
double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

struct PdCertificate {
  bool positive_definite = false;
  double min_pivot = 0.0;    // smallest Cholesky pivot (squared diagonal of L)
  double pivot_floor = 0.0;  // 1e-12 * largest diagonal entry
  std::size_t failed_row = std::numeric_limits<std::size_t>::max();
};

// Pivot floor relative to the largest diagonal entry.
inline constexpr double kPivotFloorFactor = 1e-12;

/// Dense symmetric kernel matrix over a global point ordering. Immutable.
class KernelMatrix {
 public:
  KernelMatrix() = default;
  KernelMatrix(std::size_t n, std::vector<double> entries, PdCertificate cert);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t k, std::size_t l) const noexcept { return entries_[k * n_ + l]; }
  std::span<const double> row(std::size_t k) const noexcept { return {entries_.data() + k * n_, n_}; }
  std::span<const double> entries() const noexcept { return entries_; }
  const PdCertificate& pd_certificate() const noexcept { return cert_; }
  double max_abs_row_sum() const noexcept { return max_abs_row_sum_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
  PdCertificate cert_;
  double max_abs_row_sum_ = 0.0;
};

/// Assembles the kernel matrix (OpenMP over rows, mirrored) and attempts a
/// Cholesky factorization to populate the PD certificate.
/// Throws InputError for coincident points when eps == 0.
KernelMatrix assemble_matrix(const KernelSpec& spec, const PointCloud& pts);

/// Row-parallel Cholesky certificate of a dense symmetric n x n matrix.
PdCertificate certify_positive_definite(std::span<const double> entries, std::size_t n);

/// y = K x, parallel over rows. Each row is an independent serial dot product,
/// so the result does not depend on the thread count.
void matvec(const KernelMatrix& K, std::span<const double> x, std::span<double> y);

/// Newtonian potential of the uniform unit mass on the sphere |y| = radius in R^dim:
/// radius^(2-dim) inside, |x|^(2-dim) outside.
double shell_potential_oracle(int dim, double radius, std::span<const double> x);

namespace reference {
// Serial reference versions of the parallel kernels, kept for testing and benchmarks.
KernelMatrix assemble_matrix(const KernelSpec& spec, const PointCloud& pts);
PdCertificate certify_positive_definite(std::span<const double> entries, std::size_t n);
void matvec(const KernelMatrix& K, std::span<const double> x, std::span<double> y);
}  // namespace reference

}  // namespace condcap
