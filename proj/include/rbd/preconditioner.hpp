#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>

#include "rbd/operators.hpp"
#include "rbd/shifted_solvers.hpp"
#include "rbd/transforms.hpp"

namespace rbd {

/// eps = min(1/2, tau/2), the default used in the experiments.
double choose_epsilon(double tau);

/// Threshold c_tau = delta sqrt(tau) / (delta sqrt(tau) + 2 sqrt(T)) under
/// which the GMRES rate sqrt(-delta^2 + 8 delta + 2) / (2 + delta) is
/// guaranteed. delta in (0, 1).
double c_tau(double delta, double tau, double T);

/// sqrt(-delta^2 + 8 delta + 2) / (2 + delta)
double gmres_rate_bound(double delta);

struct PaperEpsilon {};
struct CTauEpsilon {
  double delta = 0.5;
};
struct FixedEpsilon {
  double value = 0.5;
};
using EpsilonPolicy = std::variant<PaperEpsilon, CTauEpsilon, FixedEpsilon>;

double resolve_epsilon(const EpsilonPolicy& policy, double tau, double T);

/// Parses "paper", "c_tau(0.5)", "ctau:0.5", "fixed(0.01)" or "fixed:0.01".
EpsilonPolicy parse_epsilon_policy(const std::string& text);
std::string to_string(const EpsilonPolicy& policy);

struct PreconditionerOptions {
  /// Solve only the frequencies 0..n/2 and conjugate the rest.
  bool exploit_conjugacy = true;
};

/// P_eps = 1/2 blockdiag(C_eps^T + alpha I(x)M, C_eps + alpha I(x)M) [I I; -I I],
/// C_eps = C_{eps,n} (x) M + tau I (x) K, applied in inverse form through the
/// eps-scaled time FFT and n independent shifted spatial solves per half.
class RbdEpsPreconditioner {
 public:
  RbdEpsPreconditioner(const AllAtOnceOperator& op, double eps,
                       std::shared_ptr<const ShiftedBlockSolver> inner,
                       PreconditionerOptions options = {});

  std::size_t size() const { return 2 * static_cast<std::size_t>(m_) * n_; }
  int m() const { return m_; }
  int n() const { return n_; }
  double alpha() const { return alpha_; }
  double tau() const { return tau_; }
  double epsilon() const { return spectrum_.eps; }
  const EpsSpectrum& spectrum() const { return spectrum_; }
  const ShiftedBlockSolver& inner() const { return *inner_; }
  const PreconditionerOptions& options() const { return options_; }

  /// w = P_eps^{-1} v.
  void apply_inverse(std::span<const double> v, std::span<double> w) const;
  Vector apply_inverse(const Vector& v) const;

  /// Same four steps without discarding the imaginary residue.
  ComplexVector apply_inverse_complex(std::span<const double> v) const;

  /// ||Im w|| / ||w|| of the complex result; tiny for a consistent setup.
  double imaginary_residue(std::span<const double> v) const;

 private:
  void solve_half(std::span<Complex> block, bool transposed) const;

  int m_;
  int n_;
  double alpha_;
  double tau_;
  EpsSpectrum spectrum_;
  std::shared_ptr<const ShiftedBlockSolver> inner_;
  PreconditionerOptions options_;
  TimeBlockFft fft_;
};

}  // namespace rbd
