#include "rbd/gmres.hpp"

#include <chrono>
#include <cmath>
#include <vector>

#include "rbd/errors.hpp"

namespace rbd {

LinearMap identity_map() {
  return [](std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), y.begin());
  };
}

namespace {

void givens(double a, double b, double& c, double& s) {
  if (b == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (std::abs(b) > std::abs(a)) {
    const double t = a / b;
    s = 1.0 / std::sqrt(1.0 + t * t);
    c = s * t;
  } else {
    const double t = b / a;
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = c * t;
  }
}

}  // namespace

GmresResult gmres_solve(const LinearMap& op, const LinearMap& precond, std::span<const double> b,
                        const GmresOptions& options) {
  if (!op || !precond) throw ConfigurationError("gmres: operator and preconditioner are required");
  if (!(options.tolerance > 0.0)) throw ConfigurationError("gmres: tolerance must be positive");
  if (options.max_iterations < 1) throw ConfigurationError("gmres: max_iterations must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  const auto N = static_cast<Eigen::Index>(b.size());
  GmresResult result;
  result.x = Vector::Zero(N);
  SolveReport& report = result.report;

  // r0 = P^{-1} b for the zero initial guess
  Vector r0(N);
  precond(b, std::span<double>(r0.data(), r0.size()));
  const double beta = r0.norm();
  report.initial_residual = beta;
  report.residual_history.push_back(1.0);
  if (beta == 0.0) {
    report.converged = true;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

  const int max_it = static_cast<int>(std::min<Eigen::Index>(options.max_iterations, N));
  std::vector<Vector> Q;
  Q.reserve(static_cast<std::size_t>(max_it) + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(max_it + 1, max_it);
  Eigen::VectorXd cs(max_it), sn(max_it);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(max_it + 1);
  g[0] = beta;
  Q.push_back(r0 / beta);

  Vector Av(N), w(N);
  int k = 0;
  bool breakdown = false;
  while (k < max_it) {
    op(std::span<const double>(Q[k].data(), N), std::span<double>(Av.data(), N));
    precond(std::span<const double>(Av.data(), N), std::span<double>(w.data(), N));

    for (int i = 0; i <= k; ++i) {
      H(i, k) = Q[i].dot(w);
      w.noalias() -= H(i, k) * Q[i];
    }
    if (options.reorthogonalize) {
      for (int i = 0; i <= k; ++i) {
        const double c = Q[i].dot(w);
        H(i, k) += c;
        w.noalias() -= c * Q[i];
      }
    }
    const double hnext = w.norm();
    H(k + 1, k) = hnext;
    // happy breakdown: the Krylov space is invariant, the solve is exact
    breakdown = hnext <= 1e-14 * beta;
    if (!breakdown) Q.push_back(w / hnext);

    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
      H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
      H(i, k) = t;
    }
    givens(H(k, k), H(k + 1, k), cs[k], sn[k]);
    H(k, k) = cs[k] * H(k, k) + sn[k] * H(k + 1, k);
    H(k + 1, k) = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];

    ++k;
    const double rel = std::abs(g[k]) / beta;
    report.residual_history.push_back(rel);
    if (breakdown || rel <= options.tolerance) {
      report.converged = true;
      break;
    }
  }
  report.iterations = k;

  if (k > 0) {
    const Eigen::VectorXd y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (int i = 0; i < k; ++i) result.x.noalias() += y[i] * Q[i];
  }

  if (options.track_orthogonality) {
    double loss = 0.0;
    for (std::size_t i = 0; i < Q.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        loss = std::max(loss, std::abs(Q[i].dot(Q[j]) - (i == j ? 1.0 : 0.0)));
    report.orthogonality_loss = loss;
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rbd
