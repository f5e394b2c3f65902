#include "rbd/shifted_solvers.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "rbd/errors.hpp"

namespace rbd {

ComplexVector ShiftedBlockSolver::solve(const ComplexVector& r, Complex shift) const {
  ComplexVector z(r.size());
  solve(std::span<const Complex>(r.data(), r.size()), shift, std::span<Complex>(z.data(), z.size()));
  return z;
}

namespace {

void check_sizes(std::size_t r, std::size_t z, int m, const char* who) {
  if (r != static_cast<std::size_t>(m) || z != static_cast<std::size_t>(m))
    throw DimensionError(std::string(who) + ": vector length does not match the operator");
}

bool is_nestable(int m1) {
  // m1 = 2^l - 1
  const unsigned v = static_cast<unsigned>(m1) + 1u;
  return m1 >= 1 && (v & (v - 1u)) == 0u;
}

}  // namespace

// ---------------------------------------------------------------------------

DstShiftedSolver::DstShiftedSolver(const SpatialOperators& ops, double tau)
    : dst_(std::max(ops.m1, 1)), tau_(tau) {
  if (!ops.constant_coefficient)
    throw UnsupportedError("dst inner solver needs a constant coefficient; use multigrid");
  if (!ops.mass_is_identity) throw UnsupportedError("dst inner solver needs M = I");
  if (ops.m1 < 1 || ops.m() != ops.m1 * ops.m1)
    throw DimensionError("dst inner solver: operators are not on a square grid");
  eigenvalues_ = laplacian_eigenvalues(ops.m1);
  for (auto& mu : eigenvalues_) mu *= *ops.constant_coefficient;
}

void DstShiftedSolver::solve(std::span<const Complex> r, Complex shift, std::span<Complex> z) const {
  check_sizes(r.size(), z.size(), size(), "dst solve");
  if (z.data() != r.data()) std::copy(r.begin(), r.end(), z.begin());
  dst_.apply(z);
  for (std::size_t p = 0; p < z.size(); ++p) {
    const Complex d = shift + tau_ * eigenvalues_[p];
    if (d == Complex(0.0, 0.0)) throw SolverError("dst solve: singular shifted system");
    z[p] /= d;
  }
  dst_.apply(z);
}

// ---------------------------------------------------------------------------

MultigridShiftedSolver::MultigridShiftedSolver(int m1, const Coefficient& a, double tau,
                                               MultigridOptions options)
    : tau_(tau), options_(options) {
  if (!is_nestable(m1))
    throw ConfigurationError("multigrid needs m1 = 2^l - 1 interior points, got " +
                             std::to_string(m1));
  if (options.pre_smooth < 0 || options.post_smooth < 0)
    throw ConfigurationError("multigrid: smoothing counts must be non-negative");
  if (options.coarsest_size < 1)
    throw ConfigurationError("multigrid: coarsest size must be positive");
  int size = m1;
  levels_.push_back(assemble_five_point(size, a));
  while (size > options.coarsest_size) {
    size = (size - 1) / 2;
    levels_.push_back(assemble_five_point(size, a));
  }
}

void MultigridShiftedSolver::solve(std::span<const Complex> r, Complex shift,
                                   std::span<Complex> z) const {
  check_sizes(r.size(), z.size(), size(), "multigrid solve");
  if (z.data() == r.data()) {
    std::vector<Complex> rhs(r.begin(), r.end());
    vcycle(0, rhs, shift, z);
  } else {
    vcycle(0, r, shift, z);
  }
}

void MultigridShiftedSolver::smooth(const FivePointStencil& s, std::span<const Complex> r,
                                    Complex shift, std::span<Complex> z) const {
  const int m1 = s.m1;
  const double tau = tau_;
  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < m1; ++i) {
      const std::size_t p = static_cast<std::size_t>(j) * m1 + i;
      Complex acc(0.0, 0.0);
      if (i > 0) acc += s.west[p] * z[p - 1];
      if (i + 1 < m1) acc += s.east[p] * z[p + 1];
      if (j > 0) acc += s.south[p] * z[p - m1];
      if (j + 1 < m1) acc += s.north[p] * z[p + m1];
      z[p] = (r[p] + tau * acc) / (shift + tau * s.diagonal(p));
    }
  }
}

void MultigridShiftedSolver::residual(const FivePointStencil& s, std::span<const Complex> r,
                                      Complex shift, std::span<const Complex> z,
                                      std::span<Complex> out) const {
  const int m1 = s.m1;
  const double tau = tau_;
  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < m1; ++i) {
      const std::size_t p = static_cast<std::size_t>(j) * m1 + i;
      Complex acc(0.0, 0.0);
      if (i > 0) acc += s.west[p] * z[p - 1];
      if (i + 1 < m1) acc += s.east[p] * z[p + 1];
      if (j > 0) acc += s.south[p] * z[p - m1];
      if (j + 1 < m1) acc += s.north[p] * z[p + m1];
      out[p] = r[p] - ((shift + tau * s.diagonal(p)) * z[p] - tau * acc);
    }
  }
}

void MultigridShiftedSolver::direct_solve(const FivePointStencil& s, std::span<const Complex> r,
                                          Complex shift, std::span<Complex> z) const {
  const int m1 = s.m1;
  const int m = m1 * m1;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(m, m);
  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < m1; ++i) {
      const int p = j * m1 + i;
      A(p, p) = shift + tau_ * s.diagonal(p);
      if (i > 0) A(p, p - 1) = -tau_ * s.west[p];
      if (i + 1 < m1) A(p, p + 1) = -tau_ * s.east[p];
      if (j > 0) A(p, p - m1) = -tau_ * s.south[p];
      if (j + 1 < m1) A(p, p + m1) = -tau_ * s.north[p];
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const Eigen::VectorXcd x = lu.solve(Eigen::Map<const Eigen::VectorXcd>(r.data(), m));
  if (!x.allFinite()) throw SolverError("multigrid: singular coarsest-level system");
  std::copy(x.data(), x.data() + m, z.begin());
}

void MultigridShiftedSolver::vcycle(std::size_t level, std::span<const Complex> r, Complex shift,
                                    std::span<Complex> z) const {
  const FivePointStencil& fine = levels_[level];
  if (level + 1 == levels_.size()) {
    direct_solve(fine, r, shift, z);
    return;
  }
  const int mf = fine.m1;
  const int mc = levels_[level + 1].m1;

  std::fill(z.begin(), z.end(), Complex(0.0, 0.0));
  for (int s = 0; s < options_.pre_smooth; ++s) smooth(fine, r, shift, z);

  std::vector<Complex> res(z.size());
  residual(fine, r, shift, z, res);

  // full weighting onto coarse node (I, J) = fine node (2I+1, 2J+1)
  std::vector<Complex> rc(static_cast<std::size_t>(mc) * mc);
  const auto at = [&](int i, int j) { return res[static_cast<std::size_t>(j) * mf + i]; };
  for (int J = 0; J < mc; ++J) {
    for (int I = 0; I < mc; ++I) {
      const int i = 2 * I + 1, j = 2 * J + 1;
      rc[static_cast<std::size_t>(J) * mc + I] =
          (4.0 * at(i, j) + 2.0 * (at(i - 1, j) + at(i + 1, j) + at(i, j - 1) + at(i, j + 1)) +
           at(i - 1, j - 1) + at(i + 1, j - 1) + at(i - 1, j + 1) + at(i + 1, j + 1)) /
          16.0;
    }
  }

  std::vector<Complex> ec(rc.size());
  vcycle(level + 1, rc, shift, ec);

  // bilinear prolongation; coarse values outside the grid are boundary zeros
  const auto coarse = [&](int I, int J) -> Complex {
    if (I < 0 || J < 0 || I >= mc || J >= mc) return {0.0, 0.0};
    return ec[static_cast<std::size_t>(J) * mc + I];
  };
  const auto interp_1d = [](int i, int& lo, int& hi, double& wlo, double& whi) {
    if (i % 2 == 1) {
      lo = hi = (i - 1) / 2;
      wlo = 1.0;
      whi = 0.0;
    } else {
      lo = i / 2 - 1;
      hi = i / 2;
      wlo = whi = 0.5;
    }
  };
  for (int j = 0; j < mf; ++j) {
    int jl, jh;
    double wjl, wjh;
    interp_1d(j, jl, jh, wjl, wjh);
    for (int i = 0; i < mf; ++i) {
      int il, ih;
      double wil, wih;
      interp_1d(i, il, ih, wil, wih);
      Complex e = wil * wjl * coarse(il, jl);
      if (wih != 0.0) e += wih * wjl * coarse(ih, jl);
      if (wjh != 0.0) e += wil * wjh * coarse(il, jh);
      if (wih != 0.0 && wjh != 0.0) e += wih * wjh * coarse(ih, jh);
      z[static_cast<std::size_t>(j) * mf + i] += e;
    }
  }

  for (int s = 0; s < options_.post_smooth; ++s) smooth(fine, r, shift, z);
}

// ---------------------------------------------------------------------------

InnerSolverKind parse_inner_solver(std::string_view text) {
  if (text == "dst" || text == "dst-direct") return InnerSolverKind::Dst;
  if (text == "mg" || text == "multigrid" || text == "multigrid-vcycle")
    return InnerSolverKind::Multigrid;
  throw ConfigurationError("unknown inner solver '" + std::string(text) + "' (use dst or mg)");
}

std::string_view to_string(InnerSolverKind kind) {
  return kind == InnerSolverKind::Dst ? "dst" : "mg";
}

std::shared_ptr<const ShiftedBlockSolver> make_inner_solver(InnerSolverKind kind,
                                                            const SpatialOperators& ops,
                                                            const Coefficient& a, double tau,
                                                            MultigridOptions mg) {
  if (!ops.mass_is_identity)
    throw ConfigurationError("inner solvers are implemented for M = I only");
  switch (kind) {
    case InnerSolverKind::Dst:
      if (!ops.constant_coefficient)
        throw ConfigurationError(
            "dst inner solver requires a constant coefficient; this problem needs mg");
      return std::make_shared<DstShiftedSolver>(ops, tau);
    case InnerSolverKind::Multigrid:
      return std::make_shared<MultigridShiftedSolver>(ops.m1, a, tau, mg);
  }
  throw ConfigurationError("unknown inner solver kind");
}

}  // namespace rbd
