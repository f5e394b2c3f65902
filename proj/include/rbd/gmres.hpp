#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rbd/grid.hpp"

namespace rbd {

/// y = Op(x); both spans have the system length.
using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

LinearMap identity_map();

struct GmresOptions {
  double tolerance = 1e-6;
  int max_iterations = 200;
  /// Record max |<q_i, q_j> - delta_ij| over the Arnoldi basis (O(k^2 N)).
  bool track_orthogonality = false;
  /// Second MGS sweep per step. Plain MGS drifts to ~1e-9 by the 1e-6 tolerance.
  bool reorthogonalize = true;
};

struct SolveReport {
  int iterations = 0;
  /// ||P^{-1}(b - A x_k)|| / ||P^{-1} b|| for k = 0..iterations (entry 0 is 1).
  std::vector<double> residual_history;
  bool converged = false;
  double wall_time = 0.0;
  std::optional<double> e_h;
  double orthogonality_loss = 0.0;
  /// ||P^{-1} b||, the scale of the relative history.
  double initial_residual = 0.0;
};

struct GmresResult {
  Vector x;
  SolveReport report;
};

/// Left-preconditioned GMRES without restarts from a zero initial guess.
/// Arnoldi uses modified Gram-Schmidt, the least-squares problem is updated
/// with Givens rotations, and convergence is declared on the preconditioned
/// relative residual.
GmresResult gmres_solve(const LinearMap& op, const LinearMap& precond, std::span<const double> b,
                        const GmresOptions& options = {});

inline GmresResult gmres_solve(const LinearMap& op, const LinearMap& precond, const Vector& b,
                               const GmresOptions& options = {}) {
  return gmres_solve(op, precond, std::span<const double>(b.data(), b.size()), options);
}

}  // namespace rbd
