#include "rbd/operators.hpp"

#include <cmath>
#include <string>

#include "rbd/errors.hpp"

namespace rbd {

namespace {

using ConstMap = Eigen::Map<const Vector>;
using Map = Eigen::Map<Vector>;

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
}

}  // namespace

AllAtOnceOperator::AllAtOnceOperator(const SpatialOperators& ops, int n, double tau, double gamma)
    : K_(ops.K), M_(ops.M), mass_identity_(ops.mass_is_identity), m_(ops.m()), n_(n), tau_(tau) {
  if (n < 1) throw DimensionError("operator: n must be at least 1");
  if (!(tau > 0.0)) throw DomainError("operator: tau must be positive");
  if (!(gamma > 0.0)) throw DomainError("operator: gamma must be positive");
  if (K_.rows() != K_.cols() || M_.rows() != K_.rows() || M_.cols() != K_.cols())
    throw DimensionError("operator: K and M must be square and of equal size");
  alpha_ = tau / std::sqrt(gamma);
}

AllAtOnceOperator::AllAtOnceOperator(const SpatialOperators& ops, const TimeSpaceGrid& grid,
                                     double gamma)
    : AllAtOnceOperator(ops, grid.n, grid.tau(), gamma) {}

void AllAtOnceOperator::apply_time_chain(std::span<const double> v, std::span<double> out,
                                         bool transpose) const {
  const int m = m_;
  const int n = n_;
#pragma omp parallel for schedule(static) if (n > 1 && m >= 256)
  for (int k = 0; k < n; ++k) {
    const std::size_t off = static_cast<std::size_t>(k) * m;
    ConstMap vk(v.data() + off, m);
    Map ok(out.data() + off, m);
    ok.noalias() = tau_ * (K_ * vk);
    // neighbour in time: k-1 for T, k+1 for T^T
    const int nb = transpose ? k + 1 : k - 1;
    if (mass_identity_) {
      ok += vk;
      if (nb >= 0 && nb < n) ok -= ConstMap(v.data() + static_cast<std::size_t>(nb) * m, m);
    } else {
      ok += M_ * vk;
      if (nb >= 0 && nb < n)
        ok -= M_ * ConstMap(v.data() + static_cast<std::size_t>(nb) * m, m);
    }
  }
}

void AllAtOnceOperator::apply_T(std::span<const double> v, std::span<double> out) const {
  check_length(v.size(), block_size(), "apply_T input");
  check_length(out.size(), block_size(), "apply_T output");
  apply_time_chain(v, out, false);
}

void AllAtOnceOperator::apply_T_transpose(std::span<const double> v, std::span<double> out) const {
  check_length(v.size(), block_size(), "apply_T_transpose input");
  check_length(out.size(), block_size(), "apply_T_transpose output");
  apply_time_chain(v, out, true);
}

void AllAtOnceOperator::apply_A(std::span<const double> v, std::span<double> out) const {
  check_length(v.size(), size(), "apply_A input");
  check_length(out.size(), size(), "apply_A output");
  const std::size_t half = block_size();
  const auto v_top = v.subspan(0, half);
  const auto v_bot = v.subspan(half, half);
  auto o_top = out.subspan(0, half);
  auto o_bot = out.subspan(half, half);

  // top = alpha (I(x)M) v_top + T^T v_bot ; bottom = -T v_top + alpha (I(x)M) v_bot
  apply_time_chain(v_bot, o_top, true);
  apply_time_chain(v_top, o_bot, false);

  const auto idx = static_cast<Eigen::Index>(half);
  Map top(o_top.data(), idx);
  Map bot(o_bot.data(), idx);
  bot = -bot;
  if (mass_identity_) {
    top += alpha_ * ConstMap(v_top.data(), idx);
    bot += alpha_ * ConstMap(v_bot.data(), idx);
  } else {
    const int m = m_;
    for (int k = 0; k < n_; ++k) {
      const std::size_t off = static_cast<std::size_t>(k) * m;
      Map(o_top.data() + off, m) += alpha_ * (M_ * ConstMap(v_top.data() + off, m));
      Map(o_bot.data() + off, m) += alpha_ * (M_ * ConstMap(v_bot.data() + off, m));
    }
  }
}

Vector AllAtOnceOperator::apply_T(const Vector& v) const {
  Vector out(v.size());
  apply_T(std::span<const double>(v.data(), v.size()), std::span<double>(out.data(), out.size()));
  return out;
}

Vector AllAtOnceOperator::apply_T_transpose(const Vector& v) const {
  Vector out(v.size());
  apply_T_transpose(std::span<const double>(v.data(), v.size()),
                    std::span<double>(out.data(), out.size()));
  return out;
}

Vector AllAtOnceOperator::apply_A(const Vector& v) const {
  Vector out(v.size());
  apply_A(std::span<const double>(v.data(), v.size()), std::span<double>(out.data(), out.size()));
  return out;
}

}  // namespace rbd
