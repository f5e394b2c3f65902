#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "rbd/errors.hpp"
#include "rbd/preconditioner.hpp"
#include "rbd/spectral_validation.hpp"

using namespace rbd;

TEST_CASE("synthetic mass fixtures are SPD with small condition number") {
  for (int variant : {0, 1}) {
    for (int m : {1, 9, 30}) {
      const auto M = synthetic_mass_matrix(m, variant);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      CHECK(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff() <= 10.0);
    }
  }
  CHECK_THROWS_AS(synthetic_mass_matrix(3, 2), ConfigurationError);
}

TEST_CASE("K = 0, M = I, n = 1: E is the scalar (alpha - 1)/(alpha + 1)") {
  for (double gamma : {1e-6, 0.25, 1.0}) {
    const auto b = make_dense_bundle(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2),
                                     1, 1.0, gamma, 0.5);
    const auto r = check_rbd_spectrum(b);
    CHECK(r.passed);
    CHECK(r.values.at("E_norm") ==
          doctest::Approx(std::abs((b.alpha - 1.0) / (b.alpha + 1.0))).epsilon(1e-12));
    // eigenvalues 1 +- i |E|
    CHECK(r.values.at("max_imag") == doctest::Approx(r.values.at("E_norm")).epsilon(1e-10));
  }
}

TEST_CASE("every check passes on representative bundles") {
  for (int m1 : {1, 3}) {
    for (int n : {2, 5}) {
      for (double gamma : {1e-8, 1.0}) {
        for (bool spd : {false, true}) {
          const double tau = 1.0 / n;
          const double eps = c_tau(0.5, tau, 1.0);
          std::optional<Eigen::MatrixXd> mass;
          if (spd) mass = synthetic_mass_matrix(m1 * m1, 1);
          const auto b = make_dense_bundle(m1, n, 1.0, gamma, eps, mass);
          for (const auto& r :
               {check_bundle_identities(b), check_rbd_spectrum(b), check_eps_perturbation(b, 0.5),
                check_smw_identity(b), check_norm_bounds(b, 0.5), check_gmres_rate(b, 0.5),
                check_residual_relation(b)}) {
            CHECK_MESSAGE(r.passed, r.check << " " << r.config);
          }
          if (!spd) CHECK(check_dense_equivalence(b).passed);
        }
      }
    }
  }
}

TEST_CASE("eps perturbation: rank 2m and the predicted eigenvalues") {
  const auto b = make_dense_bundle(3, 4, 1.0, 1e-2, 0.5);
  const auto r = check_eps_perturbation(b, 0.5);
  CHECK(r.passed);
  CHECK(r.values.at("rank") == 18.0);
  CHECK(r.values.at("unit_eigenvalues") ==
        2.0 * 3 * 9 + r.values.at("below_resolution"));
  CHECK(r.values.at("max_deviation") <= 1.0);
}

TEST_CASE("checks detect a broken preconditioner") {
  auto b = make_dense_bundle(3, 4, 1.0, 1e-2, 0.125);
  b.P_eps(0, 0) += 1.0;
  CHECK_FALSE(check_dense_equivalence(b).passed);
  CHECK_FALSE(check_bundle_identities(b).passed);

  auto c = make_dense_bundle(3, 4, 1.0, 1e-2, 0.125);
  c.Z_eps *= 1.1;
  CHECK_FALSE(check_smw_identity(c).passed);
}

TEST_CASE("check preconditions are enforced") {
  const auto b = make_dense_bundle(1, 2, 1.0, 1.0, 0.5);
  CHECK_THROWS_AS(check_eps_perturbation(b, 0.4), DomainError);
  CHECK_THROWS_AS(check_norm_bounds(b, 1.0), DomainError);
  CHECK_THROWS_AS(check_gmres_rate(b, 0.5), DomainError);
  const auto spd = make_dense_bundle(1, 2, 1.0, 1.0, 0.1, synthetic_mass_matrix(1, 0));
  CHECK_THROWS_AS(check_dense_equivalence(spd), ConfigurationError);
  CHECK_THROWS_AS(make_dense_bundle(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3),
                                    2, 1.0, 1.0, 0.5),
                  DimensionError);
}

TEST_CASE("quick suite runs clean and serializes") {
  ValidationSuiteOptions opts;
  opts.m1_values = {1};
  opts.n_values = {2, 3};
  opts.gammas = {1e-4};
  const auto report = run_validation_suite(opts);
  CHECK(report.passed());
  CHECK(report.failure_count() == 0);
  const auto j = nlohmann::json::parse(report.to_json());
  CHECK(j["passed"] == true);
  CHECK(j["checks"].size() == report.checks.size());
  CHECK(j["checks"][0].contains("values"));
}
