#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbd/grid.hpp"
#include "rbd/transforms.hpp"

namespace rbd {

/// Solver for the per-frequency systems (shift * M + tau * K) z = r with a
/// complex shift. Implementations are immutable after construction and
/// solve() is a fixed linear map of r, safe to call concurrently.
class ShiftedBlockSolver {
 public:
  virtual ~ShiftedBlockSolver() = default;

  virtual int size() const = 0;
  virtual double tau() const = 0;
  virtual std::string_view name() const = 0;
  virtual void solve(std::span<const Complex> r, Complex shift, std::span<Complex> z) const = 0;

  ComplexVector solve(const ComplexVector& r, Complex shift) const;
};

/// Exact solve by diagonalizing K with the 2D sine transform. Needs M = I and
/// a constant coefficient; anything else raises UnsupportedError.
class DstShiftedSolver final : public ShiftedBlockSolver {
 public:
  DstShiftedSolver(const SpatialOperators& ops, double tau);

  int size() const override { return static_cast<int>(eigenvalues_.size()); }
  double tau() const override { return tau_; }
  std::string_view name() const override { return "dst"; }
  void solve(std::span<const Complex> r, Complex shift, std::span<Complex> z) const override;
  using ShiftedBlockSolver::solve;

 private:
  Dst2d dst_;
  std::vector<double> eigenvalues_;  // of K, in unknown ordering
  double tau_;
};

struct MultigridOptions {
  int pre_smooth = 1;
  int post_smooth = 1;
  /// levels with m1 <= this are solved directly
  int coarsest_size = 3;
};

/// One geometric V-cycle for (shift I + tau K) z = r on the nested grids
/// m1 = 2^l - 1: lexicographic Gauss-Seidel smoothing in complex arithmetic,
/// full-weighting restriction, bilinear prolongation, coarse operators
/// re-discretized from the coefficient, dense LU on the coarsest grid.
class MultigridShiftedSolver final : public ShiftedBlockSolver {
 public:
  MultigridShiftedSolver(int m1, const Coefficient& a, double tau, MultigridOptions options = {});

  int size() const override { return levels_.front().m1 * levels_.front().m1; }
  double tau() const override { return tau_; }
  std::string_view name() const override { return "mg"; }
  void solve(std::span<const Complex> r, Complex shift, std::span<Complex> z) const override;
  using ShiftedBlockSolver::solve;

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const MultigridOptions& options() const { return options_; }

 private:
  void vcycle(std::size_t level, std::span<const Complex> r, Complex shift,
              std::span<Complex> z) const;
  void smooth(const FivePointStencil& s, std::span<const Complex> r, Complex shift,
              std::span<Complex> z) const;
  void residual(const FivePointStencil& s, std::span<const Complex> r, Complex shift,
                std::span<const Complex> z, std::span<Complex> out) const;
  void direct_solve(const FivePointStencil& s, std::span<const Complex> r, Complex shift,
                    std::span<Complex> z) const;

  std::vector<FivePointStencil> levels_;
  double tau_;
  MultigridOptions options_;
};

enum class InnerSolverKind { Dst, Multigrid };

InnerSolverKind parse_inner_solver(std::string_view text);
std::string_view to_string(InnerSolverKind kind);

/// Builds the requested inner solver; ConfigurationError when the kind does
/// not fit the problem (dst with a variable coefficient, mg on a grid that
/// cannot be coarsened).
std::shared_ptr<const ShiftedBlockSolver> make_inner_solver(InnerSolverKind kind,
                                                            const SpatialOperators& ops,
                                                            const Coefficient& a, double tau,
                                                            MultigridOptions mg = {});

}  // namespace rbd
