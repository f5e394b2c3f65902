#include "rbd/grid.hpp"

#include <cmath>
#include <sstream>

#include "rbd/errors.hpp"

namespace rbd {

TimeSpaceGrid make_grid(int m1, int n, double T) {
  if (m1 < 1) throw DomainError("grid: need at least one interior point per dimension");
  if (n < 1) throw DomainError("grid: need at least one time step");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("grid: horizon T must be positive");
  return TimeSpaceGrid{m1, n, T};
}

TimeSpaceGrid make_experiment_grid(double h, double T) {
  if (!(h > 0.0) || h >= 1.0) throw DomainError("grid: h must lie in (0, 1)");
  const double inv = 1.0 / h;
  const long cells = std::lround(inv);
  if (cells < 2 || std::abs(inv - static_cast<double>(cells)) > 1e-9 * inv) {
    std::ostringstream os;
    os << "grid: 1/h must be an integer >= 2 (h = " << h << ")";
    throw DomainError(os.str());
  }
  return make_grid(static_cast<int>(cells) - 1, static_cast<int>(cells), T);
}

Coefficient Coefficient::uniform(double c) {
  return Coefficient{[c](double, double) { return c; }, c};
}

Coefficient Coefficient::variable(SpaceField f) { return Coefficient{std::move(f), std::nullopt}; }

void validate_problem(const ParabolicControlProblem& problem) {
  if (!(problem.gamma > 0.0) || !std::isfinite(problem.gamma))
    throw DomainError("problem: regularization gamma must be positive");
  if (!(problem.T > 0.0)) throw DomainError("problem: horizon T must be positive");
  if (!problem.a.value || !problem.f || !problem.g || !problem.y0)
    throw DomainError("problem: coefficient, source, target and initial state are required");
  if (problem.a.constant && !(*problem.a.constant > 0.0))
    throw DomainError("problem: constant coefficient must be positive");
}

FivePointStencil assemble_five_point(int m1, const Coefficient& a) {
  if (m1 < 1) throw DomainError("stencil: m1 must be positive");
  FivePointStencil s;
  s.m1 = m1;
  s.h = 1.0 / static_cast<double>(m1 + 1);
  const std::size_t m = static_cast<std::size_t>(m1) * static_cast<std::size_t>(m1);
  s.west.resize(m);
  s.east.resize(m);
  s.south.resize(m);
  s.north.resize(m);

  const double h = s.h;
  const double inv_h2 = 1.0 / (h * h);
  // Half-grid coordinate: index k addresses the point k*h/2. Neighbouring
  // nodes evaluate a shared midpoint through the same integer, so the
  // assembled matrix is exactly symmetric.
  const auto half = [h](int k) { return static_cast<double>(k) * h * 0.5; };
  const auto coef = [&](int kx, int ky) {
    const double v = a.value(half(kx), half(ky));
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "stencil: coefficient a must be positive, got " << v << " at (" << half(kx) << ", "
         << half(ky) << ")";
      throw DomainError(os.str());
    }
    return v;
  };

  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < m1; ++i) {
      const std::size_t p = static_cast<std::size_t>(j) * m1 + i;
      // node (i, j) sits at half-index (2i+2, 2j+2)
      const int kx = 2 * i + 2;
      const int ky = 2 * j + 2;
      // interior nodes must see a positive coefficient too
      coef(kx, ky);
      s.west[p] = coef(kx - 1, ky) * inv_h2;
      s.east[p] = coef(kx + 1, ky) * inv_h2;
      s.south[p] = coef(kx, ky - 1) * inv_h2;
      s.north[p] = coef(kx, ky + 1) * inv_h2;
    }
  }
  return s;
}

SpatialOperators build_stiffness(const TimeSpaceGrid& grid, const Coefficient& a) {
  const FivePointStencil s = assemble_five_point(grid.m1, a);
  const int m1 = grid.m1;
  const int m = grid.m();

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(m) * 5);
  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < m1; ++i) {
      const int p = j * m1 + i;
      entries.emplace_back(p, p, s.diagonal(p));
      if (i > 0) entries.emplace_back(p, p - 1, -s.west[p]);
      if (i + 1 < m1) entries.emplace_back(p, p + 1, -s.east[p]);
      if (j > 0) entries.emplace_back(p, p - m1, -s.south[p]);
      if (j + 1 < m1) entries.emplace_back(p, p + m1, -s.north[p]);
    }
  }

  SpatialOperators ops;
  ops.K.resize(m, m);
  ops.K.setFromTriplets(entries.begin(), entries.end());
  ops.K.makeCompressed();
  ops.M.resize(m, m);
  ops.M.setIdentity();
  ops.mass_is_identity = true;
  ops.constant_coefficient = a.constant;
  ops.m1 = m1;
  ops.h = s.h;
  return ops;
}

SparseMatrix build_time_difference(int n) {
  if (n < 1) throw DimensionError("time difference: n must be at least 1");
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    entries.emplace_back(k, k, 1.0);
    if (k > 0) entries.emplace_back(k, k - 1, -1.0);
  }
  SparseMatrix B(n, n);
  B.setFromTriplets(entries.begin(), entries.end());
  return B;
}

Vector sample(const SpaceTimeField& field, const TimeSpaceGrid& grid, double t) {
  Vector out(grid.m());
  for (int j = 0; j < grid.m1; ++j)
    for (int i = 0; i < grid.m1; ++i) out[j * grid.m1 + i] = field(grid.node(i), grid.node(j), t);
  return out;
}

Vector sample(const SpaceField& field, const TimeSpaceGrid& grid) {
  Vector out(grid.m());
  for (int j = 0; j < grid.m1; ++j)
    for (int i = 0; i < grid.m1; ++i) out[j * grid.m1 + i] = field(grid.node(i), grid.node(j));
  return out;
}

Vector assemble_rhs(const ParabolicControlProblem& problem, const TimeSpaceGrid& grid,
                    const SpatialOperators& ops) {
  validate_problem(problem);
  const int m = grid.m();
  const int n = grid.n;
  if (ops.m() != m || ops.M.rows() != m)
    throw DimensionError("rhs: spatial operators do not match the grid");

  const double tau = grid.tau();
  const double sqrt_gamma = std::sqrt(problem.gamma);
  const std::size_t half = static_cast<std::size_t>(m) * n;
  Vector b(2 * half);

  const auto mass = [&](const Vector& v) -> Vector {
    if (ops.mass_is_identity) return v;
    return ops.M * v;
  };

  const Vector y0 = sample(problem.y0, grid);
  for (int k = 1; k <= n; ++k) {
    const std::size_t off = static_cast<std::size_t>(k - 1) * m;
    // g is sampled at t_{k-1}, f at t_k
    b.segment(off, m) = tau * mass(sample(problem.g, grid, grid.time(k - 1)));
    Vector fk = tau * mass(sample(problem.f, grid, grid.time(k)));
    if (k == 1) fk += mass(y0);
    b.segment(half + off, m) = -sqrt_gamma * fk;
  }
  return b;
}

std::pair<Vector, Vector> split_solution(std::span<const double> x, double gamma) {
  if (x.size() % 2 != 0) throw DimensionError("split_solution: odd vector length");
  if (!(gamma > 0.0)) throw DomainError("split_solution: gamma must be positive");
  const std::size_t half = x.size() / 2;
  Eigen::Map<const Vector> top(x.data(), static_cast<Eigen::Index>(half));
  Eigen::Map<const Vector> bot(x.data() + half, static_cast<Eigen::Index>(half));
  return {top / std::sqrt(gamma), Vector(bot)};
}

double error_norm(std::span<const double> y, std::span<const double> p,
                  const ParabolicControlProblem& problem, const TimeSpaceGrid& grid,
                  ErrorCombination combine) {
  if (!problem.has_exact_solution())
    throw UnsupportedError("error_norm: problem '" + problem.name + "' has no exact solution");
  const int m = grid.m();
  const std::size_t len = static_cast<std::size_t>(m) * grid.n;
  if (y.size() != len || p.size() != len) throw DimensionError("error_norm: length mismatch");

  double worst = 0.0, worst_y = 0.0, worst_p = 0.0;
  for (int k = 1; k <= grid.n; ++k) {
    const std::size_t off = static_cast<std::size_t>(k - 1) * m;
    const Vector ey = Eigen::Map<const Vector>(y.data() + off, m) -
                      sample(*problem.exact_y, grid, grid.time(k));
    const Vector ep = Eigen::Map<const Vector>(p.data() + off, m) -
                      sample(*problem.exact_p, grid, grid.time(k - 1));
    worst = std::max(worst, grid.h() * std::sqrt(ey.squaredNorm() + ep.squaredNorm()));
    worst_y = std::max(worst_y, grid.h() * ey.norm());
    worst_p = std::max(worst_p, grid.h() * ep.norm());
  }
  return combine == ErrorCombination::Stacked ? worst : std::max(worst_y, worst_p);
}

}  // namespace rbd
