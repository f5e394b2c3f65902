#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rbd {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline std::span<const double> view(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

using SpaceField = std::function<double(double x1, double x2)>;
using SpaceTimeField = std::function<double(double x1, double x2, double t)>;

/// Uniform tensor grid on (0,1)^2 x (0,T]. Spatial unknowns are the m1 x m1
/// interior nodes, numbered with x1 fastest: p = j * m1 + i.
struct TimeSpaceGrid {
  int m1 = 0;
  int n = 0;
  double T = 1.0;

  double h() const { return 1.0 / static_cast<double>(m1 + 1); }
  int m() const { return m1 * m1; }
  double tau() const { return T / static_cast<double>(n); }
  std::size_t dof() const { return 2 * static_cast<std::size_t>(m()) * static_cast<std::size_t>(n); }
  double node(int i) const { return static_cast<double>(i + 1) * h(); }
  double time(int k) const { return static_cast<double>(k) * tau(); }
};

/// Validated constructor; throws DomainError for m1 < 1, n < 1 or T <= 0.
TimeSpaceGrid make_grid(int m1, int n, double T = 1.0);

/// Grid used by the experiments: m1 = 1/h - 1 and n = 1/h, so tau = T*h.
/// 1/h must be an integer >= 2.
TimeSpaceGrid make_experiment_grid(double h, double T = 1.0);

/// Diffusion coefficient a(x). `constant` is set when a is known to be
/// uniform, which is what enables the sine-transform inner solver.
struct Coefficient {
  SpaceField value;
  std::optional<double> constant;

  static Coefficient uniform(double c);
  static Coefficient variable(SpaceField f);
};

struct ParabolicControlProblem {
  std::string name;
  double gamma = 1.0;
  double T = 1.0;
  Coefficient a = Coefficient::uniform(1.0);
  SpaceTimeField f;
  SpaceTimeField g;
  SpaceField y0;
  std::optional<SpaceTimeField> exact_y;
  std::optional<SpaceTimeField> exact_p;

  bool has_exact_solution() const { return exact_y.has_value() && exact_p.has_value(); }
};

/// Throws DomainError unless gamma > 0, T > 0 and all fields are set.
void validate_problem(const ParabolicControlProblem& problem);

/// Edge-midpoint coefficients of the 5-point scheme, already divided by h^2.
/// west[p] couples node p to p-1, east[p] to p+1, south[p] to p-m1,
/// north[p] to p+m1; couplings to boundary nodes are kept (they feed the
/// diagonal) but have no matrix column.
struct FivePointStencil {
  int m1 = 0;
  double h = 0.0;
  std::vector<double> west, east, south, north;

  double diagonal(std::size_t p) const { return west[p] + east[p] + south[p] + north[p]; }
};

/// Samples a at every edge midpoint of the interior stencil. Throws
/// DomainError if any sample is not strictly positive (or not finite).
FivePointStencil assemble_five_point(int m1, const Coefficient& a);

struct SpatialOperators {
  SparseMatrix K;
  SparseMatrix M;
  bool mass_is_identity = true;
  std::optional<double> constant_coefficient;
  int m1 = 0;
  double h = 0.0;

  int m() const { return static_cast<int>(K.rows()); }
};

/// Discretizes -div(a grad .) with homogeneous Dirichlet data; M = I.
SpatialOperators build_stiffness(const TimeSpaceGrid& grid, const Coefficient& a);

/// B_n: 1 on the diagonal, -1 on the first subdiagonal.
SparseMatrix build_time_difference(int n);

/// Right-hand side [g; -sqrt(gamma) f] of the scaled all-at-once system.
Vector assemble_rhs(const ParabolicControlProblem& problem, const TimeSpaceGrid& grid,
                    const SpatialOperators& ops);

/// Grid samples of a space-time field at time t, in unknown ordering.
Vector sample(const SpaceTimeField& field, const TimeSpaceGrid& grid, double t);
Vector sample(const SpaceField& field, const TimeSpaceGrid& grid);

/// Splits x = [sqrt(gamma) y; p] into (y, p).
std::pair<Vector, Vector> split_solution(std::span<const double> x, double gamma);

enum class ErrorCombination {
  /// max(max_k ||e_y(t_k)||, max_k ||e_p(t_{k-1})||); the tables' convention
  Separate,
  /// max_k of the Euclidean stack (e_y at t_k, e_p at t_{k-1})
  Stacked,
};

/// L-infinity in time of the discrete L2 norm (h * Euclidean norm) of the
/// state and adjoint errors. y-level k lives at t_k, p-level k at t_{k-1}.
/// Throws UnsupportedError without exact solutions.
double error_norm(std::span<const double> y, std::span<const double> p,
                  const ParabolicControlProblem& problem, const TimeSpaceGrid& grid,
                  ErrorCombination combine = ErrorCombination::Separate);

}  // namespace rbd
