#include "rbd/spectral_validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include "json.hpp"
#include <unsupported/Eigen/KroneckerProduct>

#include "rbd/errors.hpp"
#include "rbd/gmres.hpp"
#include "rbd/operators.hpp"
#include "rbd/preconditioner.hpp"
#include "rbd/shifted_solvers.hpp"
#include "rbd/transforms.hpp"

namespace rbd {

namespace {

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

DenseMatrix blockdiag(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out = DenseMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

DenseMatrix blocks(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& c,
                   const DenseMatrix& d) {
  DenseMatrix out(a.rows() + c.rows(), a.cols() + b.cols());
  out << a, b, c, d;
  return out;
}

double norm2(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<DenseMatrix> svd(a);
  return svd.singularValues()(0);
}

double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

// Symmetric M^{p} for SPD M.
DenseMatrix spd_power(const DenseMatrix& M, double p) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(M);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw DomainError("dense bundle: mass matrix must be SPD");
  const Eigen::VectorXd d = es.eigenvalues().array().pow(p);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double spd_condition(const DenseMatrix& M) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(M);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

LinearMap dense_map(const DenseMatrix& A) {
  return [&A](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Vector> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    yv.noalias() = A * xv;
  };
}

LinearMap dense_solve_map(const Eigen::PartialPivLU<DenseMatrix>& lu) {
  return [&lu](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Vector> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    yv = lu.solve(xv);
  };
}

CheckReport start(const std::string& name, const DenseBundle& b) {
  CheckReport r;
  r.check = name;
  r.config = b.label;
  return r;
}

// (C~_eps + alpha I)^{-1}(T~ + alpha I) - I and the transposed counterpart.
std::pair<DenseMatrix, DenseMatrix> correction_terms(const DenseBundle& b) {
  const auto mn = static_cast<Eigen::Index>(b.m) * b.n;
  const DenseMatrix I = DenseMatrix::Identity(mn, mn);
  const DenseMatrix lower = b.T_tilde + b.alpha * I;
  const DenseMatrix clower = b.C_tilde_eps + b.alpha * I;
  DenseMatrix R2 = clower.partialPivLu().solve(lower) - I;
  DenseMatrix R1 = clower.transpose().partialPivLu().solve(lower.transpose()) - I;
  return {R1, R2};
}

}  // namespace

void CheckReport::require(bool ok, const std::string& message) {
  if (!ok) {
    passed = false;
    failures.push_back(message);
  }
}

Vector random_vector(Eigen::Index size, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = dist(rng);
  return v;
}

DenseMatrix synthetic_mass_matrix(int m, int variant) {
  if (m < 1) throw DomainError("synthetic_mass_matrix: m must be positive");
  double diag = 2.0, off = 0.5;
  if (variant == 1) {
    diag = 4.0;
    off = 1.5;
  } else if (variant != 0) {
    throw ConfigurationError("synthetic_mass_matrix: variant must be 0 or 1");
  }
  DenseMatrix M = diag * DenseMatrix::Identity(m, m);
  for (int i = 0; i + 1 < m; ++i) M(i, i + 1) = M(i + 1, i) = off;
  return M;
}

DenseBundle make_dense_bundle(const DenseMatrix& K, const DenseMatrix& M, int n, double T,
                              double gamma, double eps) {
  if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
    throw DimensionError("dense bundle: K and M must be square of equal size");
  if (n < 1) throw DomainError("dense bundle: n must be positive");
  if (!(gamma > 0.0) || !(T > 0.0)) throw DomainError("dense bundle: gamma and T must be positive");
  if ((K - K.transpose()).norm() > 1e-12 * std::max(1.0, K.norm()))
    throw DomainError("dense bundle: K must be symmetric");

  DenseBundle b;
  b.m = static_cast<int>(K.rows());
  b.n = n;
  b.gamma = gamma;
  b.T = T;
  b.tau = T / n;
  b.alpha = b.tau / std::sqrt(gamma);
  b.eps = eps;
  b.K = K;
  b.M = M;
  b.M_half = spd_power(M, 0.5);
  b.M_inv_half = spd_power(M, -0.5);

  const Eigen::Index m = b.m;
  const Eigen::Index mn = m * n;
  const DenseMatrix Im = DenseMatrix::Identity(m, m);
  const DenseMatrix In = DenseMatrix::Identity(n, n);
  const DenseMatrix Imn = DenseMatrix::Identity(mn, mn);
  const DenseMatrix Bn = build_time_difference(n);
  const DenseMatrix Cn = eps_circulant_matrix(n, eps);
  const DenseMatrix IM = kron(In, M);
  const double a = b.alpha;

  b.Tm = kron(Bn, M) + b.tau * kron(In, K);
  b.C_eps = kron(Cn, M) + b.tau * kron(In, K);
  b.A = blocks(a * IM, b.Tm.transpose(), -b.Tm, a * IM);
  b.B = blocks(b.Tm.transpose() + a * IM, b.Tm.transpose() - a * IM, -b.Tm + a * IM, b.Tm + a * IM);
  b.G = 0.5 * blocks(Imn, Imn, -Imn, Imn);
  b.H_eps = blockdiag(b.C_eps.transpose() + a * IM, b.C_eps + a * IM);
  b.H = blockdiag(b.Tm.transpose() + a * IM, b.Tm + a * IM);
  b.P_eps = b.H_eps * b.G;
  b.P = b.H * b.G;
  b.W = blockdiag(IM, IM);
  const DenseMatrix Wh = kron(In, b.M_half);
  const DenseMatrix Wih = kron(In, b.M_inv_half);
  b.W_half = blockdiag(Wh, Wh);
  b.W_inv_half = blockdiag(Wih, Wih);

  const DenseMatrix Kt = b.M_inv_half * K * b.M_inv_half;
  b.T_tilde = kron(Bn, Im) + b.tau * kron(In, Kt);
  b.C_tilde_eps = kron(Cn, Im) + b.tau * kron(In, Kt);
  b.B_tilde = blocks(b.T_tilde.transpose() + a * Imn, b.T_tilde.transpose() - a * Imn,
                     -b.T_tilde + a * Imn, b.T_tilde + a * Imn);
  b.H_tilde = blockdiag(b.T_tilde.transpose() + a * Imn, b.T_tilde + a * Imn);
  b.H_tilde_eps = blockdiag(b.C_tilde_eps.transpose() + a * Imn, b.C_tilde_eps + a * Imn);

  b.T0 = (1.0 + a) * Im + b.tau * Kt;
  const DenseMatrix T0inv = b.T0.inverse();
  DenseMatrix T0invn = Im;
  for (int k = 0; k < n; ++k) T0invn = T0invn * T0inv;
  b.Z_eps = (Im - eps * T0invn) / eps;
  b.E1 = DenseMatrix::Zero(mn, m);
  b.En = DenseMatrix::Zero(mn, m);
  b.E1.topRows(m) = Im;
  b.En.bottomRows(m) = Im;

  std::ostringstream label;
  label << "m=" << b.m << " n=" << n << " gamma=" << fmt(gamma) << " eps=" << fmt(eps);
  b.label = label.str();
  return b;
}

DenseBundle make_dense_bundle(int m1, int n, double T, double gamma, double eps,
                              const std::optional<DenseMatrix>& mass) {
  const TimeSpaceGrid grid = make_grid(m1, n, T);
  SpatialOperators ops = build_stiffness(grid, Coefficient::uniform(1.0));
  const DenseMatrix K(ops.K);
  const DenseMatrix M = mass ? *mass : DenseMatrix::Identity(ops.m(), ops.m());
  DenseBundle b = make_dense_bundle(K, M, n, T, gamma, eps);
  if (mass) {
    ops.M = M.sparseView();
    ops.mass_is_identity = false;
  }
  b.ops = std::move(ops);
  b.label = "m1=" + std::to_string(m1) + " " + b.label + (mass ? " M=spd" : " M=I");
  return b;
}

// ---------------------------------------------------------------------------

CheckReport check_bundle_identities(const DenseBundle& b) {
  CheckReport r = start("bundle_identities", b);
  const double tol = 1e-12;
  const double a_bg = rel_diff(b.A, b.B * b.G);
  const double p_hg = rel_diff(b.P_eps, b.H_eps * b.G);
  const double b_sim = rel_diff(b.B, b.W_half * b.B_tilde * b.W_half);
  const double h_sim = rel_diff(b.H_eps, b.W_half * b.H_tilde_eps * b.W_half);
  r.values = {{"A_vs_BG", a_bg}, {"P_vs_HG", p_hg}, {"B_similarity", b_sim}, {"H_similarity", h_sim}};
  r.require(a_bg <= tol, "A != B G (" + fmt(a_bg) + ")");
  r.require(p_hg <= tol, "P_eps != H_eps G (" + fmt(p_hg) + ")");
  r.require(b_sim <= 1e-11, "B != W^1/2 B~ W^1/2 (" + fmt(b_sim) + ")");
  r.require(h_sim <= 1e-11, "H_eps != W^1/2 H~_eps W^1/2 (" + fmt(h_sim) + ")");

  if (b.ops) {
    const AllAtOnceOperator op(*b.ops, b.n, b.tau, b.gamma);
    const Vector v = random_vector(b.A.cols(), 7);
    const double mf = (op.apply_A(v) - b.A * v).norm() / (b.A * v).norm();
    r.values["matrix_free_A"] = mf;
    r.require(mf <= 1e-13, "matrix-free A disagrees with dense A (" + fmt(mf) + ")");
  }
  return r;
}

CheckReport check_rbd_spectrum(const DenseBundle& b) {
  CheckReport r = start("rbd_spectrum", b);
  const DenseMatrix X = b.H_tilde.partialPivLu().solve(b.B_tilde);
  Eigen::EigenSolver<DenseMatrix> es(X, false);
  double real_dev = 0.0, imag_max = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto z = es.eigenvalues()[i];
    real_dev = std::max(real_dev, std::abs(z.real() - 1.0));
    imag_max = std::max(imag_max, std::abs(z.imag()));
  }
  const auto mn = static_cast<Eigen::Index>(b.m) * b.n;
  const DenseMatrix I = DenseMatrix::Identity(mn, mn);
  const DenseMatrix E = (b.T_tilde + b.alpha * I).partialPivLu().solve(-b.T_tilde + b.alpha * I);
  const double e_norm = norm2(E);
  r.values = {{"max_real_deviation", real_dev}, {"max_imag", imag_max}, {"E_norm", e_norm}};
  r.require(real_dev <= 1e-9, "eigenvalue real part off 1 by " + fmt(real_dev));
  r.require(imag_max <= 1.0 + 1e-9, "eigenvalue imaginary part " + fmt(imag_max) + " > 1");
  r.require(e_norm < 1.0, "||E~||_2 = " + fmt(e_norm) + " is not < 1");
  return r;
}

CheckReport check_eps_perturbation(const DenseBundle& b, double eta) {
  CheckReport r = start("eps_perturbation", b);
  if (!(b.eps <= eta) || !(eta < 1.0))
    throw DomainError("check_eps_perturbation: need eps <= eta < 1");
  const Eigen::Index m = b.m;
  const Eigen::Index N = 2 * m * b.n;
  const DenseMatrix Y = b.H_tilde_eps.partialPivLu().solve(b.H_tilde);
  const DenseMatrix R = Y - DenseMatrix::Identity(N, N);

  // R = U S V^T has numerical rank r; its nonzero eigenvalues are those of
  // the r x r matrix S V^T U, the other N - r eigenvalues of Y are 1.
  Eigen::JacobiSVD<DenseMatrix> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * std::max(1.0, sv[0])) ++rank;
  const DenseMatrix core = sv.head(rank).asDiagonal() *
                           svd.matrixV().leftCols(rank).transpose() * svd.matrixU().leftCols(rank);

  // Predicted nontrivial deviations eps mu^n / (1 - eps mu^n), mu in sigma(T0^{-1}),
  // once per half.
  Eigen::SelfAdjointEigenSolver<DenseMatrix> t0(b.T0);
  std::vector<double> predicted;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double mun = std::pow(1.0 / t0.eigenvalues()[i], b.n);
    const double d = b.eps * mun / (1.0 - b.eps * mun);
    predicted.push_back(d);
    predicted.push_back(d);
  }
  std::sort(predicted.rbegin(), predicted.rend());

  std::vector<double> dev(static_cast<std::size_t>(N - rank), 0.0);
  if (rank > 0) {
    Eigen::EigenSolver<DenseMatrix> es(core, false);
    for (Eigen::Index i = 0; i < rank; ++i) dev.push_back(std::abs(es.eigenvalues()[i]));
  }
  std::sort(dev.rbegin(), dev.rend());

  const double one_tol = 1e-10;
  const auto unresolved =
      std::count_if(predicted.begin(), predicted.end(), [&](double d) { return d <= one_tol; });
  const auto ones = std::count_if(dev.begin(), dev.end(), [&](double d) { return d <= one_tol; });
  const double bound = b.eps / (1.0 - eta);
  double match = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] <= one_tol) break;
    match = std::max(match, std::abs(dev[i] - predicted[i]) / (predicted[i] + one_tol));
  }

  r.values = {{"rank", static_cast<double>(rank)},
              {"unit_eigenvalues", static_cast<double>(ones)},
              {"max_deviation", dev.front()},
              {"bound", bound},
              {"prediction_mismatch", match},
              {"below_resolution", static_cast<double>(unresolved)}};
  r.require(rank == 2 * m, "rank of H~_eps^{-1} H~ - I is " + std::to_string(rank) + ", expected " +
                std::to_string(2 * m));
  const auto expected_ones = 2 * (b.n - 1) * m + unresolved;
  r.require(ones == expected_ones, "unit eigenvalue count " + std::to_string(ones) +
                                       ", expected " + std::to_string(expected_ones));
  r.require(dev.front() <= bound * (1.0 + 1e-10), "max |lambda - 1| = " + fmt(dev.front()) +
                                                      " exceeds eps/(1-eta) = " + fmt(bound));
  r.require(match <= 1e-6, "nontrivial eigenvalues differ from the T0 prediction (" + fmt(match) +
                               ")");
  return r;
}

CheckReport check_smw_identity(const DenseBundle& b) {
  CheckReport r = start("smw_identity", b);
  const Eigen::Index m = b.m;
  const int n = b.n;
  const auto mn = m * n;
  const DenseMatrix I = DenseMatrix::Identity(mn, mn);
  const DenseMatrix lower = b.T_tilde + b.alpha * I;
  const DenseMatrix Zinv = b.Z_eps.inverse();
  const auto [R1, R2] = correction_terms(b);

  const DenseMatrix R2_smw = lower.partialPivLu().solve(b.E1) * Zinv * b.En.transpose();
  const DenseMatrix R1_smw = lower.transpose().partialPivLu().solve(b.En) * Zinv * b.E1.transpose();
  const double scale = 1.0 + R2.norm();
  const double e2 = (R2 - R2_smw).norm() / scale;
  const double e1 = (R1 - R1_smw).norm() / (1.0 + R1.norm());

  // Block structure: R2 lives in the last block column with blocks
  // T0^{-i} Z^{-1}; R1 in the first with blocks T0^{-(n-i+1)} Z^{-1}.
  const DenseMatrix T0inv = b.T0.inverse();
  std::vector<DenseMatrix> pw(n + 1, DenseMatrix::Identity(m, m));
  for (int i = 1; i <= n; ++i) pw[i] = pw[i - 1] * T0inv;
  double structure = 0.0;
  const double zscale = std::max(1e-300, Zinv.norm());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto blk2 = R2.block(i * m, j * m, m, m);
      const auto blk1 = R1.block(i * m, j * m, m, m);
      const DenseMatrix want2 = j == n - 1 ? DenseMatrix(pw[i + 1] * Zinv) : DenseMatrix::Zero(m, m);
      const DenseMatrix want1 = j == 0 ? DenseMatrix(pw[n - i] * Zinv) : DenseMatrix::Zero(m, m);
      structure = std::max(structure, (blk2 - want2).norm() / zscale);
      structure = std::max(structure, (blk1 - want1).norm() / zscale);
    }
  }
  r.values = {{"smw_error", e2}, {"smw_transpose_error", e1}, {"structure_error", structure}};
  r.require(e2 <= 1e-11, "SMW form mismatch " + fmt(e2));
  r.require(e1 <= 1e-11, "transposed SMW form mismatch " + fmt(e1));
  r.require(structure <= 1e-9, "correction block structure mismatch " + fmt(structure));
  return r;
}

CheckReport check_norm_bounds(const DenseBundle& b, double eta) {
  CheckReport r = start("norm_bounds", b);
  if (!(b.eps <= eta) || !(eta < 1.0)) throw DomainError("check_norm_bounds: need eps <= eta < 1");
  const double rn = std::sqrt(static_cast<double>(b.n));
  const double base = b.eps * rn / (1.0 - eta);
  const auto [R1, R2] = correction_terms(b);
  const double n1 = norm2(R1);
  const double n2 = norm2(R2);

  const DenseMatrix X = b.H_tilde_eps.partialPivLu().solve(b.B_tilde);
  const double nx = norm2(X);
  const auto N = X.rows();
  const DenseMatrix D = X - DenseMatrix::Identity(N, N);
  const double nsym = norm2(0.5 * (D + D.transpose()));

  const double slack = 1.0 + 1e-10;
  r.values = {{"R_norm", std::max(n1, n2)},
              {"R_bound", base},
              {"X_norm", nx},
              {"X_bound", std::sqrt(2.0) * (1.0 + base)},
              {"sym_norm", nsym},
              {"sym_bound", 2.0 * base}};
  r.require(n2 <= base * slack, "||R2|| = " + fmt(n2) + " > " + fmt(base));
  r.require(n1 <= base * slack, "||R1|| = " + fmt(n1) + " > " + fmt(base));
  r.require(nx <= std::sqrt(2.0) * (1.0 + base) * slack, "||H~_eps^{-1} B~|| too large: " + fmt(nx));
  r.require(nsym <= 2.0 * base * slack, "||H(X - I)|| = " + fmt(nsym) + " > " + fmt(2.0 * base));
  return r;
}

CheckReport check_gmres_rate(const DenseBundle& b, double delta) {
  CheckReport r = start("gmres_rate", b);
  r.config += " delta=" + fmt(delta);
  const double ct = c_tau(delta, b.tau, b.T);
  if (b.eps > ct * (1.0 + 1e-12)) throw DomainError("check_gmres_rate: eps exceeds c_tau(delta)");
  const double rho = gmres_rate_bound(delta);
  const double c0 = spd_condition(b.M);

  const DenseMatrix X = b.H_tilde_eps.partialPivLu().solve(b.B_tilde);
  const DenseMatrix S = 0.5 * (X + X.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(S, Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues().minCoeff();

  const Eigen::PartialPivLU<DenseMatrix> lu(b.P_eps);
  const Vector rhs = random_vector(b.A.rows(), 11);
  GmresOptions opts;
  opts.tolerance = 1e-12;
  opts.max_iterations = static_cast<int>(b.A.rows());
  const auto res = gmres_solve(dense_map(b.A), dense_solve_map(lu), rhs, opts);

  double worst = 0.0;
  const auto& hist = res.report.residual_history;
  for (std::size_t k = 1; k < hist.size(); ++k) {
    // round-off floor once the residual sits at machine level
    const double bound = std::sqrt(c0) * std::pow(rho, static_cast<double>(k));
    if (hist[k] < 1e-12) continue;
    worst = std::max(worst, hist[k] / bound);
  }
  r.values = {{"c_tau", ct},
              {"rho", rho},
              {"c0", c0},
              {"sym_min_eigenvalue", lam_min},
              {"worst_ratio_to_bound", worst},
              {"iterations", static_cast<double>(res.report.iterations)}};
  r.require(lam_min >= 1.0 - delta - 1e-12,
            "symmetric part minimum " + fmt(lam_min) + " below 1 - delta");
  r.require(worst <= 1.0 + 1e-8, "residual exceeds sqrt(c0) rho^k by factor " + fmt(worst));
  r.require(res.report.converged, "dense GMRES did not converge");
  return r;
}

CheckReport check_residual_relation(const DenseBundle& b) {
  CheckReport r = start("residual_relation", b);
  const Eigen::PartialPivLU<DenseMatrix> lu(b.P_eps);
  const Vector rhs = random_vector(b.A.rows(), 13);

  GmresOptions opts;
  opts.tolerance = 1e-11;
  opts.max_iterations = static_cast<int>(b.A.rows());
  const auto main = gmres_solve(dense_map(b.A), dense_solve_map(lu), rhs, opts);

  const Eigen::PartialPivLU<DenseMatrix> lu_t(b.H_tilde_eps);
  const DenseMatrix X = lu_t.solve(b.B_tilde);
  const Vector bt = lu_t.solve(b.W_inv_half * rhs);
  const auto aux = gmres_solve(dense_map(X), identity_map(), bt, opts);

  const double c = std::sqrt(2.0) * norm2(b.W_inv_half);
  const auto& h1 = main.report.residual_history;
  const auto& h2 = aux.report.residual_history;
  const double s1 = main.report.initial_residual;
  const double s2 = aux.report.initial_residual;
  double worst = 0.0;
  const std::size_t len = std::min(h1.size(), h2.size());
  for (std::size_t j = 0; j < len; ++j) {
    const double lhs = h1[j] * s1;
    const double rhs_bound = c * h2[j] * s2 + 1e-10 * s1;
    worst = std::max(worst, lhs / rhs_bound);
  }
  r.values = {{"constant", c}, {"worst_ratio", worst}, {"compared_steps", static_cast<double>(len)}};
  r.require(worst <= 1.0 + 1e-8, "||r_j|| exceeds sqrt(2)||W^-1/2|| ||r~_j|| by factor " + fmt(worst));
  return r;
}

CheckReport check_dense_equivalence(const DenseBundle& b, double tolerance) {
  CheckReport r = start("dense_equivalence", b);
  if (!b.ops || !b.ops->mass_is_identity)
    throw ConfigurationError("check_dense_equivalence: needs a grid bundle with M = I");
  const AllAtOnceOperator op(*b.ops, b.n, b.tau, b.gamma);
  const auto inner =
      make_inner_solver(InnerSolverKind::Dst, *b.ops, Coefficient::uniform(1.0), b.tau);
  const Eigen::PartialPivLU<DenseMatrix> lu(b.P_eps);
  double worst = 0.0;
  for (bool conj : {true, false}) {
    const RbdEpsPreconditioner pre(op, b.eps, inner, PreconditionerOptions{conj});
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const Vector v = random_vector(b.A.rows(), seed);
      const Vector dense = lu.solve(v);
      const Vector fast = pre.apply_inverse(v);
      worst = std::max(worst, (fast - dense).norm() / dense.norm());
    }
  }
  r.values = {{"max_relative_error", worst}, {"tolerance", tolerance}};
  r.require(worst <= tolerance, "four-step inverse differs from dense LU by " + fmt(worst));
  return r;
}

// ---------------------------------------------------------------------------

bool ValidationReport::passed() const { return failure_count() == 0; }

std::size_t ValidationReport::failure_count() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckReport& c) { return !c.passed; }));
}

std::string ValidationReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  j["total"] = checks.size();
  j["failures"] = failure_count();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["check"] = c.check;
    e["config"] = c.config;
    e["passed"] = c.passed;
    e["failures"] = c.failures;
    e["values"] = c.values;
    arr.push_back(std::move(e));
  }
  j["checks"] = std::move(arr);
  return j.dump(2);
}

ValidationReport run_validation_suite(const ValidationSuiteOptions& o) {
  ValidationReport report;
  for (int m1 : o.m1_values) {
    const int m = m1 * m1;
    std::vector<std::optional<DenseMatrix>> masses{std::nullopt};
    if (o.include_mass_fixtures) {
      masses.emplace_back(synthetic_mass_matrix(m, 0));
      masses.emplace_back(synthetic_mass_matrix(m, 1));
    }
    for (int n : o.n_values) {
      const double tau = o.T / n;
      for (double gamma : o.gammas) {
        for (const auto& policy_text : o.epsilon_policies) {
          const EpsilonPolicy policy = parse_epsilon_policy(policy_text);
          const double eps = resolve_epsilon(policy, tau, o.T);
          const double eta = std::max(o.eta, eps);
          for (std::size_t mi = 0; mi < masses.size(); ++mi) {
            DenseBundle b = make_dense_bundle(m1, n, o.T, gamma, eps, masses[mi]);
            b.label += " policy=" + policy_text;
            if (mi > 0) b.label += std::to_string(mi);
            report.checks.push_back(check_bundle_identities(b));
            report.checks.push_back(check_rbd_spectrum(b));
            if (eta < 1.0) {
              report.checks.push_back(check_eps_perturbation(b, eta));
              report.checks.push_back(check_norm_bounds(b, eta));
            }
            report.checks.push_back(check_smw_identity(b));
            if (const auto* ct = std::get_if<CTauEpsilon>(&policy))
              report.checks.push_back(check_gmres_rate(b, ct->delta));
            if (mi == 0) report.checks.push_back(check_dense_equivalence(b));
            if (mi == 2 && n == o.n_values.back() && gamma == o.gammas.front() &&
                &policy_text == &o.epsilon_policies.front())
              report.checks.push_back(check_residual_relation(b));
          }
        }
        // the rate guarantee across a sweep of delta, eps at its threshold
        for (double delta : o.rate_deltas) {
          const double eps = c_tau(delta, tau, o.T);
          DenseBundle b = make_dense_bundle(m1, n, o.T, gamma, eps, masses.back());
          report.checks.push_back(check_gmres_rate(b, delta));
        }
      }
    }
  }
  return report;
}

}  // namespace rbd
