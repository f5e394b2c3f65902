#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbd/gmres.hpp"
#include "rbd/grid.hpp"
#include "rbd/preconditioner.hpp"
#include "rbd/shifted_solvers.hpp"

namespace rbd {

struct SolverConfig {
  EpsilonPolicy epsilon = PaperEpsilon{};
  InnerSolverKind inner = InnerSolverKind::Dst;
  MultigridOptions mg;
  double tolerance = 1e-6;
  int max_iterations = 200;
  bool exploit_conjugacy = true;
  bool track_orthogonality = false;
};

struct ProblemSolution {
  Vector x;
  Vector y;
  Vector p;
  double epsilon = 0.0;
  SolveReport report;
};

/// Assembles the all-at-once system for `problem` on `grid`, builds P_eps
/// with the configured inner solver and runs GMRES. e_h is filled in when
/// the problem has an exact solution.
ProblemSolution solve_problem(const ParabolicControlProblem& problem, const TimeSpaceGrid& grid,
                              const SolverConfig& config);

struct ExperimentSpec {
  std::string example = "1";
  std::vector<double> h_values{1.0 / 32.0};
  std::vector<double> gammas{1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0};
  SolverConfig solver;
  std::string output_path;  // empty or "-" for stdout
  std::string format = "csv";
  /// Permits h below 2^-6.
  bool allow_large = false;
  /// Runs the (gamma, h) cells concurrently.
  bool parallel_cells = false;
  double T = 1.0;
};

struct ExperimentRow {
  double gamma = 0.0;
  double h = 0.0;
  std::size_t dof = 0;
  int iterations = 0;
  double cpu_seconds = 0.0;
  std::optional<double> e_h;
  bool converged = false;
  double epsilon = 0.0;
};

/// Accepts "2^-5", "1/32" or a plain number; the value must be 2^-k, k >= 1.
double parse_h(const std::string& text);

/// Throws ConfigurationError for an invalid spec, including an inner solver
/// that cannot handle the example's coefficient.
void validate_spec(const ExperimentSpec& spec);

/// Rows ordered by gamma, then h, both in list order.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

/// Three significant digits with an unpadded exponent: 0.0154 -> "1.54e-2".
std::string format_sci3(double value);

/// "csv" or "text".
std::string format_table(const std::vector<ExperimentRow>& rows, const std::string& format);

/// Writes format_table to `path` ("" or "-" is stdout).
void emit_output(const std::vector<ExperimentRow>& rows, const std::string& format,
                 const std::string& path);

/// Overrides fields of `spec` with the keys present in a JSON config file.
void load_config(const std::string& path, ExperimentSpec& spec);
void apply_config_json(const std::string& json_text, ExperimentSpec& spec);

}  // namespace rbd
