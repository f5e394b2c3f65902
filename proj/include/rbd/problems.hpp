#pragma once

#include <string>
#include <vector>

#include "rbd/grid.hpp"

namespace rbd {

/// Constant-coefficient heat control: a = 1, y = e^{-t} sin(pi x1) sin(pi x2), p = 0.
ParabolicControlProblem example1(double gamma);

/// Variable coefficient a = 1e-5 sin(pi x1 x2), y = e^{-t} x1(1-x1) x2(1-x2),
/// p = gamma sin(pi t) sin(pi x1) sin(pi x2).
ParabolicControlProblem example2(double gamma);

/// Registered problem names ("example1", "example2").
std::vector<std::string> registered_problems();

/// Looks a problem up by name; "1"/"2" are accepted as shorthands.
/// Throws ConfigurationError for unknown names.
ParabolicControlProblem make_problem(const std::string& name, double gamma);

}  // namespace rbd
