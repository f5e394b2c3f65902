#include "rbd/transforms.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "rbd/errors.hpp"

namespace rbd {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

void check_eps(int n, double eps) {
  if (n < 1) throw DimensionError("eps-circulant: n must be at least 1");
  if (!(eps > 0.0) || eps > 1.0)
    throw DomainError("eps-circulant: eps must lie in (0, 1], got " + std::to_string(eps));
}

}  // namespace

Eigen::MatrixXd eps_circulant_matrix(int n, double eps) {
  check_eps(n, eps);
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < n; ++k) C(k, k - 1) = -1.0;
  // n = 1: the corner coincides with the diagonal, giving 1 - eps
  C(0, n - 1) -= eps;
  return C;
}

EpsSpectrum eps_spectrum(int n, double eps) {
  check_eps(n, eps);
  EpsSpectrum s;
  s.n = n;
  s.eps = eps;
  s.lambdas.resize(n);
  s.scalings.resize(n);
  const double root = std::pow(eps, 1.0 / n);
  for (int k = 0; k < n; ++k) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) / n;
    s.lambdas[k] = Complex(1.0, 0.0) - root * std::polar(1.0, phase);
    s.scalings[k] = std::pow(eps, static_cast<double>(k) / n);
  }
  // exact conjugate pairs, independent of rounding in polar()
  for (int k = 1; k < n - k; ++k) s.lambdas[n - k] = std::conj(s.lambdas[k]);
  if (n % 2 == 0) s.lambdas[n / 2] = Complex(1.0 + root, 0.0);
  return s;
}

// ---------------------------------------------------------------------------

struct TimeBlockFft::Plans {
  int m = 0;
  int n = 0;
  fftw_plan forward = nullptr;  // F_n: exponent sign +1 (FFTW_BACKWARD)
  fftw_plan inverse = nullptr;  // F_n^*: exponent sign -1 (FFTW_FORWARD)

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

TimeBlockFft::TimeBlockFft(int m, int n) : plans_(std::make_unique<Plans>()) {
  if (m < 1 || n < 1) throw DimensionError("time fft: m and n must be positive");
  plans_->m = m;
  plans_->n = n;
  std::vector<Complex> scratch(static_cast<std::size_t>(m) * n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  int dims[] = {n};
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_many_dft(1, dims, m, buf, nullptr, m, 1, buf, nullptr, m, 1,
                                       FFTW_BACKWARD, flags);
  plans_->inverse = fftw_plan_many_dft(1, dims, m, buf, nullptr, m, 1, buf, nullptr, m, 1,
                                       FFTW_FORWARD, flags);
  if (!plans_->forward || !plans_->inverse) throw SolverError("time fft: FFTW planning failed");
}

TimeBlockFft::~TimeBlockFft() = default;
TimeBlockFft::TimeBlockFft(TimeBlockFft&&) noexcept = default;
TimeBlockFft& TimeBlockFft::operator=(TimeBlockFft&&) noexcept = default;

int TimeBlockFft::m() const { return plans_->m; }
int TimeBlockFft::n() const { return plans_->n; }

void TimeBlockFft::apply(std::span<Complex> v, FftDirection direction) const {
  const std::size_t len = static_cast<std::size_t>(plans_->m) * plans_->n;
  if (v.size() != len)
    throw DimensionError("time fft: expected length " + std::to_string(len) + ", got " +
                         std::to_string(v.size()));
  auto* buf = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(direction == FftDirection::Forward ? plans_->forward : plans_->inverse, buf,
                   buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(plans_->n));
  for (auto& x : v) x *= scale;
}

std::vector<Complex> time_block_fft(std::span<const Complex> v, int m, int n,
                                    FftDirection direction) {
  TimeBlockFft fft(m, n);
  std::vector<Complex> out(v.begin(), v.end());
  fft.apply(out, direction);
  return out;
}

// ---------------------------------------------------------------------------

struct Dst2d::Plans {
  int m1 = 0;
  fftw_plan interleaved = nullptr;  // real and imaginary parts as two batches
  fftw_plan real = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (interleaved) fftw_destroy_plan(interleaved);
    if (real) fftw_destroy_plan(real);
  }
};

Dst2d::Dst2d(int m1) : plans_(std::make_unique<Plans>()) {
  if (m1 < 1) throw DimensionError("dst2d: m1 must be positive");
  plans_->m1 = m1;
  const std::size_t m = static_cast<std::size_t>(m1) * m1;
  std::vector<double> scratch(2 * m);
  int dims[] = {m1, m1};
  fftw_r2r_kind kinds[] = {FFTW_RODFT00, FFTW_RODFT00};
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->interleaved = fftw_plan_many_r2r(2, dims, 2, scratch.data(), nullptr, 2, 1,
                                           scratch.data(), nullptr, 2, 1, kinds, flags);
  plans_->real = fftw_plan_r2r_2d(m1, m1, scratch.data(), scratch.data(), FFTW_RODFT00,
                                  FFTW_RODFT00, flags);
  if (!plans_->interleaved || !plans_->real) throw SolverError("dst2d: FFTW planning failed");
}

Dst2d::~Dst2d() = default;
Dst2d::Dst2d(Dst2d&&) noexcept = default;
Dst2d& Dst2d::operator=(Dst2d&&) noexcept = default;

int Dst2d::m1() const { return plans_->m1; }

void Dst2d::apply(std::span<Complex> v) const {
  const int m1 = plans_->m1;
  if (v.size() != static_cast<std::size_t>(m1) * m1)
    throw DimensionError("dst2d: length does not match m1^2");
  auto* data = reinterpret_cast<double*>(v.data());
  fftw_execute_r2r(plans_->interleaved, data, data);
  // RODFT00 is unnormalized: each 1D pass multiplies by sqrt(2(m1+1))
  const double scale = 1.0 / (2.0 * (m1 + 1));
  for (auto& x : v) x *= scale;
}

void Dst2d::apply(std::span<double> v) const {
  const int m1 = plans_->m1;
  if (v.size() != static_cast<std::size_t>(m1) * m1)
    throw DimensionError("dst2d: length does not match m1^2");
  fftw_execute_r2r(plans_->real, v.data(), v.data());
  const double scale = 1.0 / (2.0 * (m1 + 1));
  for (auto& x : v) x *= scale;
}

std::vector<Complex> dst2d(std::span<const Complex> v) {
  const auto m1 = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
  if (m1 < 1 || static_cast<std::size_t>(m1) * m1 != v.size())
    throw DimensionError("dst2d: length " + std::to_string(v.size()) + " is not a perfect square");
  Dst2d dst(m1);
  std::vector<Complex> out(v.begin(), v.end());
  dst.apply(out);
  return out;
}

std::vector<double> laplacian_eigenvalues(int m1) {
  if (m1 < 1) throw DimensionError("laplacian_eigenvalues: m1 must be positive");
  const double h = 1.0 / (m1 + 1);
  std::vector<double> c(m1);
  for (int i = 0; i < m1; ++i) c[i] = 2.0 - 2.0 * std::cos((i + 1) * std::numbers::pi * h);
  std::vector<double> eig(static_cast<std::size_t>(m1) * m1);
  for (int j = 0; j < m1; ++j)
    for (int i = 0; i < m1; ++i) eig[static_cast<std::size_t>(j) * m1 + i] = (c[i] + c[j]) / (h * h);
  return eig;
}

}  // namespace rbd
