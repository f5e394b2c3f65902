#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rbd/errors.hpp"
#include "rbd/grid.hpp"
#include "rbd/problems.hpp"

using namespace rbd;

namespace {

constexpr double pi = std::numbers::pi;

// Row-by-row assembly straight from the stencil definition.
Eigen::MatrixXd dense_stiffness(int m1, const std::function<double(double, double)>& a) {
  const double h = 1.0 / (m1 + 1);
  const int m = m1 * m1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < m1; ++i) {
      const int p = j * m1 + i;
      const double x = (i + 1) * h, y = (j + 1) * h;
      const double aw = a(x - h / 2, y), ae = a(x + h / 2, y);
      const double as = a(x, y - h / 2), an = a(x, y + h / 2);
      K(p, p) = (aw + ae + as + an) / (h * h);
      if (i > 0) K(p, p - 1) = -aw / (h * h);
      if (i < m1 - 1) K(p, p + 1) = -ae / (h * h);
      if (j > 0) K(p, p - m1) = -as / (h * h);
      if (j < m1 - 1) K(p, p + m1) = -an / (h * h);
    }
  }
  return K;
}

ParabolicControlProblem zero_problem() {
  ParabolicControlProblem p;
  p.name = "zero";
  p.gamma = 0.25;
  p.f = [](double, double, double) { return 0.0; };
  p.g = [](double, double, double) { return 0.0; };
  p.y0 = [](double, double) { return 0.0; };
  return p;
}

}  // namespace

TEST_CASE("grid sizes follow h = 1/(m1+1) and n = 1/h") {
  const auto g = make_experiment_grid(1.0 / 32.0);
  CHECK(g.m1 == 31);
  CHECK(g.n == 32);
  CHECK(g.m() == 961);
  CHECK(g.dof() == 61504);
  CHECK(make_experiment_grid(1.0 / 64.0).dof() == 508032);
  CHECK(g.h() == doctest::Approx(1.0 / 32.0));
  CHECK(g.tau() == doctest::Approx(1.0 / 32.0));

  CHECK_THROWS_AS(make_grid(0, 4), DomainError);
  CHECK_THROWS_AS(make_grid(3, 0), DomainError);
  CHECK_THROWS_AS(make_grid(3, 4, -1.0), DomainError);
  CHECK_THROWS_AS(make_experiment_grid(0.3), DomainError);
  CHECK_THROWS_AS(make_experiment_grid(1.0), DomainError);
}

TEST_CASE("unit coefficient stencil at h = 1/4") {
  const auto ops = build_stiffness(make_grid(3, 1), Coefficient::uniform(1.0));
  const Eigen::MatrixXd K(ops.K);
  for (int p = 0; p < 9; ++p) CHECK(K(p, p) == doctest::Approx(64.0));
  CHECK(K(0, 1) == doctest::Approx(-16.0));
  CHECK(K(0, 3) == doctest::Approx(-16.0));
  CHECK(K(0, 4) == 0.0);
  CHECK(ops.mass_is_identity);
  CHECK(ops.constant_coefficient.has_value());
}

TEST_CASE("single interior node gives K = [16]") {
  const auto ops = build_stiffness(make_grid(1, 1), Coefficient::uniform(1.0));
  CHECK(Eigen::MatrixXd(ops.K)(0, 0) == doctest::Approx(16.0));
}

TEST_CASE("stiffness matches the dense assembly oracle") {
  for (int m1 : {1, 3, 7}) {
    const auto a = example2(1.0).a;
    const auto ops = build_stiffness(make_grid(m1, 1), a);
    const Eigen::MatrixXd K(ops.K);
    const Eigen::MatrixXd ref = dense_stiffness(m1, a.value);
    CHECK((K - ref).norm() <= 1e-12 * ref.norm());
    CHECK_FALSE(ops.constant_coefficient.has_value());
  }
}

TEST_CASE("stiffness is bit-symmetric, positive definite and sparse") {
  const std::vector<Coefficient> coefficients{
      Coefficient::uniform(1.0), example2(1.0).a,
      Coefficient::variable([](double x, double y) { return 1.0 + x * x + std::exp(y); })};
  for (const auto& a : coefficients) {
    for (int m1 : {2, 5, 8}) {
      const auto ops = build_stiffness(make_grid(m1, 1), a);
      const Eigen::MatrixXd K(ops.K);
      CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      for (int r = 0; r < ops.K.rows(); ++r) CHECK(ops.K.row(r).nonZeros() <= 5);
    }
  }
}

TEST_CASE("unit coefficient agrees with the Kronecker-sum Laplacian") {
  const int m1 = 6;
  const double h = 1.0 / (m1 + 1);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m1, m1);
  for (int i = 0; i < m1; ++i) {
    L(i, i) = 2.0;
    if (i > 0) L(i, i - 1) = L(i - 1, i) = -1.0;
  }
  L /= h * h;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m1, m1);
  Eigen::MatrixXd ref(m1 * m1, m1 * m1);
  for (int a = 0; a < m1; ++a)
    for (int b = 0; b < m1; ++b)
      ref.block(a * m1, b * m1, m1, m1) = I(a, b) * L + L(a, b) * I;
  const Eigen::MatrixXd K(build_stiffness(make_grid(m1, 1), Coefficient::uniform(1.0)).K);
  CHECK((K - ref).norm() <= 1e-12 * ref.norm());
}

TEST_CASE("non-positive coefficient is rejected") {
  const auto bad = Coefficient::variable([](double x, double) { return x - 0.5; });
  CHECK_THROWS_AS(build_stiffness(make_grid(3, 1), bad), DomainError);
  CHECK_THROWS_AS(build_stiffness(make_grid(3, 1), Coefficient::uniform(0.0)), DomainError);
}

TEST_CASE("time difference matrix") {
  CHECK(Eigen::MatrixXd(build_time_difference(1))(0, 0) == 1.0);
  Eigen::MatrixXd ref(3, 3);
  ref << 1, 0, 0, -1, 1, 0, 0, -1, 1;
  CHECK(Eigen::MatrixXd(build_time_difference(3)) == ref);
  const Eigen::VectorXd e = Eigen::MatrixXd(build_time_difference(7)) * Eigen::VectorXd::Ones(7);
  CHECK(e[0] == 1.0);
  CHECK(e.tail(6).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(build_time_difference(0), DimensionError);
}

TEST_CASE("right-hand side matches a scalar-loop oracle") {
  const double gamma = 0.3;
  const auto problem = example1(gamma);
  const auto grid = make_grid(3, 4);
  const auto ops = build_stiffness(grid, problem.a);
  const Vector b = assemble_rhs(problem, grid, ops);
  const int m1 = 3, m = 9, n = 4;
  const double h = 0.25, tau = 0.25;
  REQUIRE(b.size() == 2 * m * n);
  double worst = 0.0;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j < m1; ++j) {
      for (int i = 0; i < m1; ++i) {
        const double x = (i + 1) * h, y = (j + 1) * h;
        const double s = std::sin(pi * x) * std::sin(pi * y);
        const double g = tau * std::exp(-(k - 1) * tau) * s;
        double f = tau * (2 * pi * pi - 1) * std::exp(-k * tau) * s;
        if (k == 1) f += s;
        const int p = (k - 1) * m + j * m1 + i;
        worst = std::max(worst, std::abs(b[p] - g));
        worst = std::max(worst, std::abs(b[m * n + p] + std::sqrt(gamma) * f));
      }
    }
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("right-hand side is linear in the data and vanishes for zero data") {
  const auto grid = make_grid(3, 3);
  const auto ops = build_stiffness(grid, Coefficient::uniform(1.0));
  auto d1 = zero_problem();
  CHECK(assemble_rhs(d1, grid, ops).norm() == 0.0);

  d1.f = [](double x, double y, double t) { return x + y * t; };
  d1.g = [](double x, double, double t) { return std::cos(x * t); };
  d1.y0 = [](double x, double y) { return x * y; };
  auto d2 = zero_problem();
  d2.f = [](double x, double, double t) { return std::sin(x + t); };
  d2.g = [](double, double y, double t) { return y - t; };
  d2.y0 = [](double, double y) { return 1.0 + y; };
  auto combo = zero_problem();
  const double al = 1.7, be = -0.4;
  combo.f = [&](double x, double y, double t) { return al * d1.f(x, y, t) + be * d2.f(x, y, t); };
  combo.g = [&](double x, double y, double t) { return al * d1.g(x, y, t) + be * d2.g(x, y, t); };
  combo.y0 = [&](double x, double y) { return al * d1.y0(x, y) + be * d2.y0(x, y); };
  const Vector lhs = assemble_rhs(combo, grid, ops);
  const Vector rhs = al * assemble_rhs(d1, grid, ops) + be * assemble_rhs(d2, grid, ops);
  CHECK((lhs - rhs).norm() <= 1e-14 * rhs.norm());
}

TEST_CASE("gamma = 1 puts -f in the lower half") {
  auto p = example1(1.0);
  const auto grid = make_grid(3, 4);
  const auto ops = build_stiffness(grid, p.a);
  const Vector b = assemble_rhs(p, grid, ops);
  p.gamma = 0.25;
  const Vector b2 = assemble_rhs(p, grid, ops);
  const auto half = b.size() / 2;
  CHECK((b.tail(half) - 2.0 * b2.tail(half)).norm() <= 1e-14 * b.norm());
  CHECK(b.head(half) == b2.head(half));
}

TEST_CASE("error norm") {
  const auto problem = example2(0.5);
  const auto grid = make_grid(3, 4);
  const int m = 9, n = 4;
  Vector y(m * n), p(m * n);
  for (int k = 1; k <= n; ++k) {
    y.segment((k - 1) * m, m) = sample(*problem.exact_y, grid, grid.time(k));
    p.segment((k - 1) * m, m) = sample(*problem.exact_p, grid, grid.time(k - 1));
  }
  CHECK(error_norm(view(y), view(p), problem, grid) == doctest::Approx(0.0).epsilon(1e-15));

  // constant unit error on one y level: h * sqrt(9) = 0.75
  Vector y2 = y;
  y2.segment(2 * m, m).array() += 1.0;
  CHECK(error_norm(view(y2), view(p), problem, grid) == doctest::Approx(0.75));
  CHECK(error_norm(view(y2), view(p), problem, grid, ErrorCombination::Stacked) ==
        doctest::Approx(0.75));

  // y and p errors at different levels: the two combinations differ
  Vector p2 = p;
  p2.segment(2 * m, m).array() += 1.0;
  CHECK(error_norm(view(y2), view(p2), problem, grid) == doctest::Approx(0.75));
  CHECK(error_norm(view(y2), view(p2), problem, grid, ErrorCombination::Stacked) ==
        doctest::Approx(0.75 * std::sqrt(2.0)));

  CHECK_THROWS_AS(error_norm(view(y), view(p), zero_problem(), grid), UnsupportedError);
  CHECK_THROWS_AS(error_norm(view(y.head(5)), view(p), problem, grid), DimensionError);
}

TEST_CASE("split_solution undoes the sqrt(gamma) scaling") {
  Vector x(6);
  x << 2, 4, 6, 1, 2, 3;
  const auto [y, p] = split_solution(view(x), 4.0);
  CHECK(y == Vector::LinSpaced(3, 1, 3));
  CHECK(p == Vector::LinSpaced(3, 1, 3));
}

TEST_CASE("problem registry") {
  CHECK(make_problem("1", 1.0).name == make_problem("example1", 1.0).name);
  CHECK(make_problem("2", 1e-3).gamma == 1e-3);
  CHECK(registered_problems().size() == 2);
  CHECK_THROWS_AS(make_problem("3", 1.0), ConfigurationError);
  CHECK_THROWS_AS(validate_problem(example1(-1.0)), DomainError);
}

TEST_CASE("example data satisfy the continuous optimality system") {
  // y_t - div(a grad y) = f + p / gamma,  -p_t - div(a grad p) = g - y,  p(T) = 0
  const double h = 1e-4;
  for (const auto& name : {"1", "2"}) {
    for (double gamma : {1e-2, 1.0}) {
      const auto pr = make_problem(name, gamma);
      const auto& a = pr.a.value;
      const auto flux_div = [&](const std::function<double(double, double)>& u, double x,
                                double y) {
        const auto ax = [&](double s, double t) { return a(s, t); };
        const double fx = ax(x + h / 2, y) * (u(x + h, y) - u(x, y)) -
                          ax(x - h / 2, y) * (u(x, y) - u(x - h, y));
        const double fy = ax(x, y + h / 2) * (u(x, y + h) - u(x, y)) -
                          ax(x, y - h / 2) * (u(x, y) - u(x, y - h));
        return (fx + fy) / (h * h);
      };
      double worst = 0.0, scale = 1.0;
      for (double x : {0.23, 0.61}) {
        for (double y : {0.37, 0.82}) {
          for (double t : {0.1, 0.55, 0.9}) {
            const auto Y = [&](double s, double r) { return (*pr.exact_y)(s, r, t); };
            const auto P = [&](double s, double r) { return (*pr.exact_p)(s, r, t); };
            const double yt = ((*pr.exact_y)(x, y, t + h) - (*pr.exact_y)(x, y, t - h)) / (2 * h);
            const double pt = ((*pr.exact_p)(x, y, t + h) - (*pr.exact_p)(x, y, t - h)) / (2 * h);
            const double r1 = yt - flux_div(Y, x, y) - pr.f(x, y, t) - P(x, y) / gamma;
            const double r2 = -pt - flux_div(P, x, y) - pr.g(x, y, t) + Y(x, y);
            worst = std::max({worst, std::abs(r1), std::abs(r2)});
            scale = std::max({scale, std::abs(pr.f(x, y, t)), std::abs(pr.g(x, y, t))});
          }
        }
      }
      CHECK(worst <= 1e-5 * scale);
      CHECK(std::abs((*pr.exact_p)(0.3, 0.4, pr.T)) <= 1e-12);
    }
  }
}
