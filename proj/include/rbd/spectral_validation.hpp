#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbd/grid.hpp"

namespace rbd {

using DenseMatrix = Eigen::MatrixXd;

/// Every matrix of the RBD / eps-circulant analysis, assembled densely for
/// desk-sized (m, n). Tilde quantities are the M^{-1/2}-symmetrized forms.
struct DenseBundle {
  int m = 0;
  int n = 0;
  double gamma = 1.0;
  double T = 1.0;
  double tau = 0.0;
  double alpha = 0.0;
  double eps = 0.0;

  DenseMatrix M, K;
  DenseMatrix M_half, M_inv_half;

  DenseMatrix A, B, G, H_eps, H, P_eps, P;
  DenseMatrix Tm, C_eps;  // T and C_eps
  DenseMatrix W, W_half, W_inv_half;
  DenseMatrix T_tilde, C_tilde_eps, B_tilde, H_tilde, H_tilde_eps;
  DenseMatrix T0, Z_eps, E1, En;

  /// Set when the bundle comes from a grid, so the matrix-free path can be
  /// compared against it.
  std::optional<SpatialOperators> ops;
  std::string label;
};

/// K, M are m x m SPD; tau = T / n.
DenseBundle make_dense_bundle(const DenseMatrix& K, const DenseMatrix& M, int n, double T,
                              double gamma, double eps);

/// Unit-coefficient stiffness on an m1 x m1 grid; M = I unless `mass` is given.
DenseBundle make_dense_bundle(int m1, int n, double T, double gamma, double eps,
                              const std::optional<DenseMatrix>& mass = std::nullopt);

/// Tridiagonal SPD fixtures: variant 0 -> tridiag(0.5, 2, 0.5) (kappa < 3),
/// variant 1 -> tridiag(1.5, 4, 1.5) (kappa < 7).
DenseMatrix synthetic_mass_matrix(int m, int variant);

struct CheckReport {
  std::string check;
  std::string config;
  bool passed = true;
  std::vector<std::string> failures;
  std::map<std::string, double> values;

  void require(bool ok, const std::string& message);
};

/// A = B G, P_eps = H_eps G and the W^{1/2} similarity identities.
CheckReport check_bundle_identities(const DenseBundle& bundle);

/// Eigenvalues of H~^{-1} B~ on the segment 1 + i[-1, 1]; ||E~||_2 < 1.
CheckReport check_rbd_spectrum(const DenseBundle& bundle);

/// rank(H~_eps^{-1} H~ - I) = 2m, 2(n-1)m unit eigenvalues and
/// max |lambda - 1| <= eps / (1 - eta). Needs eps <= eta < 1.
CheckReport check_eps_perturbation(const DenseBundle& bundle, double eta);

/// Sherman-Morrison-Woodbury form of (C~_eps + alpha I)^{-1}(T~ + alpha I) and
/// its transpose, plus the block-column structure of both correction terms.
CheckReport check_smw_identity(const DenseBundle& bundle);

/// The three 2-norm bounds (correction term, preconditioned matrix, its
/// symmetric part). Needs eps <= eta < 1.
CheckReport check_norm_bounds(const DenseBundle& bundle, double eta);

/// GMRES on P_eps^{-1} A x = P_eps^{-1} b with eps <= c_tau(delta): every
/// residual ratio below sqrt(c0) rho(delta)^k, and the symmetric part of
/// H~_eps^{-1} B~ bounded below by 1 - delta. c0 is kappa_2(M).
CheckReport check_gmres_rate(const DenseBundle& bundle, double delta);

/// Runs GMRES on the preconditioned system and on the auxiliary system
/// H~_eps^{-1} B~ x~ = b~ and checks ||r_j|| <= sqrt(2) ||W^{-1/2}|| ||r~_j||.
CheckReport check_residual_relation(const DenseBundle& bundle);

/// Matrix-free four-step P_eps^{-1} (dst inner solver, both conjugacy modes)
/// against the dense LU of P_eps. Needs a grid bundle with M = I.
CheckReport check_dense_equivalence(const DenseBundle& bundle, double tolerance = 1e-10);

struct ValidationReport {
  std::vector<CheckReport> checks;

  bool passed() const;
  std::size_t failure_count() const;
  std::string to_json() const;
};

struct ValidationSuiteOptions {
  std::vector<int> m1_values{1, 3};
  std::vector<int> n_values{2, 4, 8};
  std::vector<double> gammas{1e-8, 1e-4, 1.0};
  std::vector<std::string> epsilon_policies{"paper", "c_tau(0.5)"};
  std::vector<double> rate_deltas{0.3, 0.6, 0.9};
  bool include_mass_fixtures = true;
  double eta = 0.5;
  double T = 1.0;
};

ValidationReport run_validation_suite(const ValidationSuiteOptions& options = {});

/// Deterministic pseudo-random vector in [-1, 1]^size.
Vector random_vector(Eigen::Index size, unsigned seed);

}  // namespace rbd
