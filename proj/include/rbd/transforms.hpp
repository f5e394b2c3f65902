#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rbd {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

/// Eigen-data of the eps-circulant C_{eps,n} = D^{-1} F_n diag(lambdas) F_n^* D,
/// with F_n = n^{-1/2} [theta^{(i-1)(j-1)}], theta = exp(2 pi i / n).
struct EpsSpectrum {
  int n = 0;
  double eps = 0.0;
  /// lambda_k = 1 - eps^{1/n} theta^{-k}, k = 0..n-1
  std::vector<Complex> lambdas;
  /// diagonal of D: eps^{(k-1)/n}, k = 1..n
  std::vector<double> scalings;
};

/// Dense C_{eps,n}: B_n with -eps in the top-right corner. eps in (0, 1].
Eigen::MatrixXd eps_circulant_matrix(int n, double eps);

EpsSpectrum eps_spectrum(int n, double eps);

enum class FftDirection {
  Forward,  ///< applies F_n (x) I_m
  Inverse,  ///< applies F_n^* (x) I_m
};

/// Unitary DFT along the time index of a time-major (n blocks of m) vector.
/// Plans are created once; apply() is const and safe to call concurrently.
class TimeBlockFft {
 public:
  TimeBlockFft(int m, int n);
  ~TimeBlockFft();
  TimeBlockFft(const TimeBlockFft&) = delete;
  TimeBlockFft& operator=(const TimeBlockFft&) = delete;
  TimeBlockFft(TimeBlockFft&&) noexcept;
  TimeBlockFft& operator=(TimeBlockFft&&) noexcept;

  int m() const;
  int n() const;
  /// In-place transform; length must be m*n.
  void apply(std::span<Complex> v, FftDirection direction) const;

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Convenience wrapper that plans on the fly.
std::vector<Complex> time_block_fft(std::span<const Complex> v, int m, int n,
                                    FftDirection direction);

/// Orthonormal 2D DST-I, S (x) S with S_jk = sqrt(2/(m1+1)) sin(jk pi/(m1+1)).
/// S is symmetric and involutory, so the same call inverts itself.
class Dst2d {
 public:
  explicit Dst2d(int m1);
  ~Dst2d();
  Dst2d(const Dst2d&) = delete;
  Dst2d& operator=(const Dst2d&) = delete;
  Dst2d(Dst2d&&) noexcept;
  Dst2d& operator=(Dst2d&&) noexcept;

  int m1() const;
  void apply(std::span<Complex> v) const;
  void apply(std::span<double> v) const;

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Dst2d on a vector of length m = m1^2; throws DimensionError when m is not
/// a perfect square.
std::vector<Complex> dst2d(std::span<const Complex> v);

/// Eigenvalues (4 - 2cos(i pi h) - 2cos(j pi h)) / h^2 of the unit-coefficient
/// 5-point Laplacian, ordered like the unknowns (x1 index fastest).
std::vector<double> laplacian_eigenvalues(int m1);

}  // namespace rbd
