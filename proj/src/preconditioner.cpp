#include "rbd/preconditioner.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>

#include "rbd/errors.hpp"

namespace rbd {

double choose_epsilon(double tau) {
  if (!(tau > 0.0)) throw DomainError("choose_epsilon: tau must be positive");
  return std::min(0.5, 0.5 * tau);
}

double c_tau(double delta, double tau, double T) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw DomainError("c_tau: delta must lie in (0, 1)");
  if (!(tau > 0.0) || !(T > 0.0)) throw DomainError("c_tau: tau and T must be positive");
  const double a = delta * std::sqrt(tau);
  return a / (a + 2.0 * std::sqrt(T));
}

double gmres_rate_bound(double delta) {
  return std::sqrt(-delta * delta + 8.0 * delta + 2.0) / (2.0 + delta);
}

double resolve_epsilon(const EpsilonPolicy& policy, double tau, double T) {
  if (std::holds_alternative<PaperEpsilon>(policy)) return choose_epsilon(tau);
  if (const auto* c = std::get_if<CTauEpsilon>(&policy)) return c_tau(c->delta, tau, T);
  const double value = std::get<FixedEpsilon>(policy).value;
  if (!(value > 0.0) || value > 1.0) throw DomainError("fixed epsilon must lie in (0, 1]");
  return value;
}

EpsilonPolicy parse_epsilon_policy(const std::string& text) {
  if (text == "paper") return PaperEpsilon{};
  static const std::regex pattern(R"(^\s*(c_tau|ctau|fixed)\s*[:(]\s*([-+0-9.eE]+)\s*\)?\s*$)");
  std::smatch match;
  if (std::regex_match(text, match, pattern)) {
    char* end = nullptr;
    const std::string number = match[2].str();
    const double value = std::strtod(number.c_str(), &end);
    if (end != number.c_str() + number.size())
      throw ConfigurationError("epsilon policy: bad number in '" + text + "'");
    if (match[1].str() == "fixed") {
      if (!(value > 0.0) || value > 1.0)
        throw ConfigurationError("epsilon policy: fixed value must lie in (0, 1]");
      return FixedEpsilon{value};
    }
    if (!(value > 0.0) || !(value < 1.0))
      throw ConfigurationError("epsilon policy: c_tau delta must lie in (0, 1)");
    return CTauEpsilon{value};
  }
  throw ConfigurationError("unknown epsilon policy '" + text +
                           "' (use paper, c_tau(delta) or fixed(value))");
}

std::string to_string(const EpsilonPolicy& policy) {
  std::ostringstream os;
  if (std::holds_alternative<PaperEpsilon>(policy)) {
    os << "paper";
  } else if (const auto* c = std::get_if<CTauEpsilon>(&policy)) {
    os << "c_tau(" << c->delta << ")";
  } else {
    os << "fixed(" << std::get<FixedEpsilon>(policy).value << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

RbdEpsPreconditioner::RbdEpsPreconditioner(const AllAtOnceOperator& op, double eps,
                                           std::shared_ptr<const ShiftedBlockSolver> inner,
                                           PreconditionerOptions options)
    : m_(op.m()),
      n_(op.n()),
      alpha_(op.alpha()),
      tau_(op.tau()),
      spectrum_(eps_spectrum(op.n(), eps)),
      inner_(std::move(inner)),
      options_(options),
      fft_(op.m(), op.n()) {
  if (!inner_) throw ConfigurationError("preconditioner: inner solver is required");
  if (inner_->size() != m_)
    throw DimensionError("preconditioner: inner solver size does not match the operator");
  if (std::abs(inner_->tau() - tau_) > 1e-14 * tau_)
    throw ConfigurationError("preconditioner: inner solver built for a different tau");
}

void RbdEpsPreconditioner::solve_half(std::span<Complex> block, bool transposed) const {
  const int m = m_;
  const int n = n_;
  const auto& d = spectrum_.scalings;

  // C_eps     = D^{-1} F  Lambda       F^* D
  // C_eps^T   = D      F  conj(Lambda) F^* D^{-1}
  for (int k = 0; k < n; ++k) {
    const double s = transposed ? 1.0 / d[k] : d[k];
    for (int i = 0; i < m; ++i) block[static_cast<std::size_t>(k) * m + i] *= s;
  }
  fft_.apply(block, FftDirection::Inverse);

  const int last = options_.exploit_conjugacy ? n / 2 : n - 1;
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
  for (int k = 0; k <= last; ++k) {
    const Complex lambda = transposed ? std::conj(spectrum_.lambdas[k]) : spectrum_.lambdas[k];
    auto zk = block.subspan(static_cast<std::size_t>(k) * m, m);
    inner_->solve(zk, lambda + alpha_, zk);
  }
  if (options_.exploit_conjugacy) {
    // the transformed right-hand side of real data is conjugate-symmetric
    // in k, and so are the shifts
    for (int k = 1; k < n - k; ++k) {
      const std::size_t src = static_cast<std::size_t>(k) * m;
      const std::size_t dst = static_cast<std::size_t>(n - k) * m;
      for (int i = 0; i < m; ++i) block[dst + i] = std::conj(block[src + i]);
    }
  }

  fft_.apply(block, FftDirection::Forward);
  for (int k = 0; k < n; ++k) {
    const double s = transposed ? d[k] : 1.0 / d[k];
    for (int i = 0; i < m; ++i) block[static_cast<std::size_t>(k) * m + i] *= s;
  }
}

ComplexVector RbdEpsPreconditioner::apply_inverse_complex(std::span<const double> v) const {
  if (v.size() != size())
    throw DimensionError("preconditioner: expected length " + std::to_string(size()) + ", got " +
                         std::to_string(v.size()));
  const std::size_t half = size() / 2;
  ComplexVector w(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) w[static_cast<Eigen::Index>(i)] = v[i];

  std::span<Complex> all(w.data(), size());
  solve_half(all.subspan(0, half), true);
  solve_half(all.subspan(half, half), false);

  // [I -I; I I] is the inverse of 1/2 [I I; -I I]
  for (std::size_t i = 0; i < half; ++i) {
    const Complex top = all[i];
    const Complex bot = all[half + i];
    all[i] = top - bot;
    all[half + i] = top + bot;
  }
  return w;
}

void RbdEpsPreconditioner::apply_inverse(std::span<const double> v, std::span<double> w) const {
  if (w.size() != size()) throw DimensionError("preconditioner: output length mismatch");
  const ComplexVector z = apply_inverse_complex(v);
  for (std::size_t i = 0; i < size(); ++i) w[i] = z[static_cast<Eigen::Index>(i)].real();
}

Vector RbdEpsPreconditioner::apply_inverse(const Vector& v) const {
  Vector w(v.size());
  apply_inverse(std::span<const double>(v.data(), v.size()), std::span<double>(w.data(), w.size()));
  return w;
}

double RbdEpsPreconditioner::imaginary_residue(std::span<const double> v) const {
  const ComplexVector z = apply_inverse_complex(v);
  const double total = z.norm();
  if (total == 0.0) return 0.0;
  return z.imag().norm() / total;
}

}  // namespace rbd
