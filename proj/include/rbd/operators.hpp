#pragma once

#include <span>

#include "rbd/grid.hpp"

namespace rbd {

/// Matrix-free all-at-once operator
///
///   A = [ alpha I(x)M    T^T        ]     T = B_n (x) M + tau I_n (x) K,
///       [ -T             alpha I(x)M ]     alpha = tau / sqrt(gamma).
///
/// Vectors are time-major: block k (k = 1..n, size m) is contiguous, the
/// y-part occupies the first n*m entries and the p-part the last n*m.
/// Storage and every application are O(mn).
class AllAtOnceOperator {
 public:
  AllAtOnceOperator(const SpatialOperators& ops, int n, double tau, double gamma);
  AllAtOnceOperator(const SpatialOperators& ops, const TimeSpaceGrid& grid, double gamma);

  int m() const { return m_; }
  int n() const { return n_; }
  double tau() const { return tau_; }
  double alpha() const { return alpha_; }
  std::size_t block_size() const { return static_cast<std::size_t>(m_) * n_; }
  std::size_t size() const { return 2 * block_size(); }

  const SparseMatrix& stiffness() const { return K_; }
  const SparseMatrix& mass() const { return M_; }
  bool mass_is_identity() const { return mass_identity_; }

  /// block k: M v_k - M v_{k-1} + tau K v_k, with v_0 = 0.
  void apply_T(std::span<const double> v, std::span<double> out) const;
  /// block k: M v_k - M v_{k+1} + tau K v_k, with v_{n+1} = 0.
  void apply_T_transpose(std::span<const double> v, std::span<double> out) const;
  void apply_A(std::span<const double> v, std::span<double> out) const;

  Vector apply_T(const Vector& v) const;
  Vector apply_T_transpose(const Vector& v) const;
  Vector apply_A(const Vector& v) const;

 private:
  void apply_time_chain(std::span<const double> v, std::span<double> out, bool transpose) const;

  SparseMatrix K_;
  SparseMatrix M_;
  bool mass_identity_ = true;
  int m_ = 0;
  int n_ = 0;
  double tau_ = 0.0;
  double alpha_ = 0.0;
};

}  // namespace rbd
