#include "rbd/problems.hpp"

#include <cmath>
#include <numbers>

#include "rbd/errors.hpp"

namespace rbd {

namespace {
constexpr double pi = std::numbers::pi;
}

ParabolicControlProblem example1(double gamma) {
  ParabolicControlProblem p;
  p.name = "example1";
  p.gamma = gamma;
  p.T = 1.0;
  p.a = Coefficient::uniform(1.0);
  p.f = [](double x1, double x2, double t) {
    return (2.0 * pi * pi - 1.0) * std::exp(-t) * std::sin(pi * x1) * std::sin(pi * x2);
  };
  p.g = [](double x1, double x2, double t) {
    return std::exp(-t) * std::sin(pi * x1) * std::sin(pi * x2);
  };
  p.y0 = [](double x1, double x2) { return std::sin(pi * x1) * std::sin(pi * x2); };
  p.exact_y = [](double x1, double x2, double t) {
    return std::exp(-t) * std::sin(pi * x1) * std::sin(pi * x2);
  };
  p.exact_p = [](double, double, double) { return 0.0; };
  return p;
}

ParabolicControlProblem example2(double gamma) {
  constexpr double c = 1e-5;
  ParabolicControlProblem p;
  p.name = "example2";
  p.gamma = gamma;
  p.T = 1.0;
  p.a = Coefficient::variable([](double x1, double x2) { return c * std::sin(pi * x1 * x2); });

  // f = y_t - div(a grad y) - p/gamma and g = -p_t - div(a grad p) + y for
  // the closed-form (y, p) below.
  p.f = [](double x1, double x2, double t) {
    const double e = std::exp(-t);
    const double X1 = x1 * (1.0 - x1);
    const double X2 = x2 * (1.0 - x2);
    const double s = std::sin(pi * x1 * x2);
    const double co = std::cos(pi * x1 * x2);
    return -std::sin(pi * t) * std::sin(pi * x1) * std::sin(pi * x2) +
           e * X1 * (2.0 * c * s - X2 - c * pi * co * x1 * (1.0 - 2.0 * x2)) +
           e * X2 * (2.0 * c * s - c * pi * co * x2 * (1.0 - 2.0 * x1));
  };
  p.g = [gamma](double x1, double x2, double t) {
    const double s1 = std::sin(pi * x1), s2 = std::sin(pi * x2);
    const double c1 = std::cos(pi * x1), c2 = std::cos(pi * x2);
    const double s = std::sin(pi * x1 * x2);
    const double co = std::cos(pi * x1 * x2);
    return -gamma * pi * std::cos(pi * t) * s1 * s2 +
           std::exp(-t) * x1 * (1.0 - x1) * x2 * (1.0 - x2) -
           c * gamma * pi * pi * std::sin(pi * t) *
               (-2.0 * s * s1 * s2 + co * (x1 * s1 * c2 + x2 * c1 * s2));
  };
  p.y0 = [](double x1, double x2) { return x1 * (1.0 - x1) * x2 * (1.0 - x2); };
  p.exact_y = [](double x1, double x2, double t) {
    return std::exp(-t) * x1 * (1.0 - x1) * x2 * (1.0 - x2);
  };
  p.exact_p = [gamma](double x1, double x2, double t) {
    return gamma * std::sin(pi * t) * std::sin(pi * x1) * std::sin(pi * x2);
  };
  return p;
}

std::vector<std::string> registered_problems() { return {"example1", "example2"}; }

ParabolicControlProblem make_problem(const std::string& name, double gamma) {
  if (name == "example1" || name == "1") return example1(gamma);
  if (name == "example2" || name == "2") return example2(gamma);
  throw ConfigurationError("unknown problem '" + name + "' (known: example1, example2)");
}

}  // namespace rbd
