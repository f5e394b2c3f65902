#include "rbd/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "rbd/errors.hpp"
#include "rbd/operators.hpp"
#include "rbd/problems.hpp"

namespace rbd {

ProblemSolution solve_problem(const ParabolicControlProblem& problem, const TimeSpaceGrid& grid,
                              const SolverConfig& config) {
  validate_problem(problem);
  const SpatialOperators ops = build_stiffness(grid, problem.a);
  const AllAtOnceOperator op(ops, grid, problem.gamma);
  const Vector b = assemble_rhs(problem, grid, ops);

  const double eps = resolve_epsilon(config.epsilon, grid.tau(), grid.T);
  auto inner = make_inner_solver(config.inner, ops, problem.a, grid.tau(), config.mg);
  const RbdEpsPreconditioner pre(op, eps, std::move(inner),
                                 PreconditionerOptions{config.exploit_conjugacy});

  GmresOptions gopts;
  gopts.tolerance = config.tolerance;
  gopts.max_iterations = config.max_iterations;
  gopts.track_orthogonality = config.track_orthogonality;
  auto result = gmres_solve(
      [&op](std::span<const double> x, std::span<double> y) { op.apply_A(x, y); },
      [&pre](std::span<const double> x, std::span<double> y) { pre.apply_inverse(x, y); }, b,
      gopts);

  ProblemSolution sol;
  sol.epsilon = eps;
  auto [y, p] = split_solution(view(result.x), problem.gamma);
  sol.y = std::move(y);
  sol.p = std::move(p);
  sol.x = std::move(result.x);
  sol.report = std::move(result.report);
  if (problem.has_exact_solution()) sol.report.e_h = error_norm(view(sol.y), view(sol.p), problem, grid);
  return sol;
}

// ---------------------------------------------------------------------------

double parse_h(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ConfigurationError("h: empty value");

  auto number = [&](const std::string& part) {
    char* end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    if (part.empty() || end != part.c_str() + part.size())
      throw ConfigurationError("h: cannot parse '" + text + "'");
    return v;
  };

  double h = 0.0;
  if (const auto caret = s.find('^'); caret != std::string::npos) {
    h = std::pow(number(s.substr(0, caret)), number(s.substr(caret + 1)));
  } else if (const auto slash = s.find('/'); slash != std::string::npos) {
    h = number(s.substr(0, slash)) / number(s.substr(slash + 1));
  } else {
    h = number(s);
  }
  if (!(h > 0.0) || !(h <= 0.5))
    throw ConfigurationError("h must be a negative power of two, got '" + text + "'");
  const double k = -std::log2(h);
  if (std::abs(k - std::round(k)) > 1e-12)
    throw ConfigurationError("h must be a negative power of two, got '" + text + "'");
  return std::ldexp(1.0, -static_cast<int>(std::lround(k)));
}

void validate_spec(const ExperimentSpec& spec) {
  const ParabolicControlProblem probe = make_problem(spec.example, 1.0);
  for (double h : spec.h_values) {
    const double k = -std::log2(h);
    if (!(h > 0.0) || h > 0.5 || std::abs(k - std::round(k)) > 1e-12)
      throw ConfigurationError("h values must be negative powers of two");
    if (k > 6.5 && !spec.allow_large)
      throw ConfigurationError("h below 2^-6 needs the large-run opt-in");
    if (k > 10.5) throw ConfigurationError("h below 2^-10 is not supported");
  }
  for (double g : spec.gammas)
    if (!(g > 0.0)) throw ConfigurationError("gamma values must be positive");
  if (!(spec.solver.tolerance > 0.0)) throw ConfigurationError("tolerance must be positive");
  if (spec.solver.max_iterations < 1) throw ConfigurationError("maxit must be >= 1");
  if (spec.format != "csv" && spec.format != "text")
    throw ConfigurationError("format must be csv or text");
  if (spec.solver.inner == InnerSolverKind::Dst && !probe.a.constant)
    throw ConfigurationError("the dst inner solver needs a constant coefficient; example " +
                             spec.example + " has a variable one (use --inner mg)");
  if (spec.solver.mg.pre_smooth < 0 || spec.solver.mg.post_smooth < 0 ||
      spec.solver.mg.pre_smooth + spec.solver.mg.post_smooth < 1)
    throw ConfigurationError("multigrid needs at least one smoothing step");
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  struct Cell {
    double gamma;
    double h;
  };
  std::vector<Cell> cells;
  for (double g : spec.gammas)
    for (double h : spec.h_values) cells.push_back({g, h});

  std::vector<ExperimentRow> rows(cells.size());
  const auto run_cell = [&](std::size_t i) {
    const auto& c = cells[i];
    const TimeSpaceGrid grid = make_experiment_grid(c.h, spec.T);
    const ParabolicControlProblem problem = make_problem(spec.example, c.gamma);
    const ProblemSolution sol = solve_problem(problem, grid, spec.solver);
    ExperimentRow& row = rows[i];
    row.gamma = c.gamma;
    row.h = c.h;
    row.dof = grid.dof();
    row.iterations = sol.report.iterations;
    row.cpu_seconds = sol.report.wall_time;
    row.e_h = sol.report.e_h;
    row.converged = sol.report.converged;
    row.epsilon = sol.epsilon;
  };

  if (spec.parallel_cells) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::string format_sci3(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", value);
  std::string s(buf);
  const auto e = s.find('e');
  std::string mantissa = s.substr(0, e);
  std::string exponent = s.substr(e + 1);
  std::string sign;
  if (exponent[0] == '-' || exponent[0] == '+') {
    if (exponent[0] == '-') sign = "-";
    exponent.erase(0, 1);
  }
  while (exponent.size() > 1 && exponent[0] == '0') exponent.erase(0, 1);
  if (exponent == "0") sign.clear();
  return mantissa + "e" + sign + exponent;
}

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::vector<std::string> row_cells(const ExperimentRow& r) {
  return {fmt("%g", r.gamma),
          fmt("%.17g", r.h),
          std::to_string(r.dof),
          std::to_string(r.iterations),
          fmt("%.3f", r.cpu_seconds),
          r.e_h ? format_sci3(*r.e_h) : "",
          r.e_h ? fmt("%.17g", *r.e_h) : ""};
}

}  // namespace

std::string format_table(const std::vector<ExperimentRow>& rows, const std::string& format) {
  const std::vector<std::string> header{"gamma", "h", "dof", "iter", "cpu_s", "e_h", "e_h_raw"};
  std::ostringstream os;
  if (format == "csv") {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
      const auto cells = row_cells(r);
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    }
    return os.str();
  }
  if (format != "text") throw ConfigurationError("format must be csv or text");

  std::vector<std::vector<std::string>> table{header};
  for (const auto& r : rows) {
    auto cells = row_cells(r);
    if (!r.e_h) cells[5] = cells[6] = "-";
    cells[1] = "2^" + std::to_string(static_cast<int>(std::lround(std::log2(r.h))));
    if (!r.converged) cells[3] += "*";
    table.push_back(std::move(cells));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : table)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << "  ";
      os << std::string(width[i] - row[i].size(), ' ') << row[i];
    }
    os << '\n';
  }
  return os.str();
}

void emit_output(const std::vector<ExperimentRow>& rows, const std::string& format,
                 const std::string& path) {
  const std::string text = format_table(rows, format);
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------

void apply_config_json(const std::string& json_text, ExperimentSpec& spec) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigurationError("config: top level must be an object");

  auto as_string = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  try {
    if (j.contains("example")) spec.example = as_string(j["example"]);
    if (j.contains("h")) {
      spec.h_values.clear();
      for (const auto& v : j["h"]) spec.h_values.push_back(parse_h(as_string(v)));
    }
    if (j.contains("gamma")) {
      spec.gammas.clear();
      for (const auto& v : j["gamma"]) {
        if (v.is_number()) {
          spec.gammas.push_back(v.get<double>());
        } else {
          spec.gammas.push_back(std::stod(v.get<std::string>()));
        }
      }
    }
    if (j.contains("epsilon")) spec.solver.epsilon = parse_epsilon_policy(as_string(j["epsilon"]));
    if (j.contains("inner")) spec.solver.inner = parse_inner_solver(j["inner"].get<std::string>());
    if (j.contains("tol")) spec.solver.tolerance = j["tol"].get<double>();
    if (j.contains("maxit")) spec.solver.max_iterations = j["maxit"].get<int>();
    if (j.contains("pre_smooth")) spec.solver.mg.pre_smooth = j["pre_smooth"].get<int>();
    if (j.contains("post_smooth")) spec.solver.mg.post_smooth = j["post_smooth"].get<int>();
    if (j.contains("conjugacy")) spec.solver.exploit_conjugacy = j["conjugacy"].get<bool>();
    if (j.contains("out")) spec.output_path = j["out"].get<std::string>();
    if (j.contains("format")) spec.format = j["format"].get<std::string>();
    if (j.contains("large")) spec.allow_large = j["large"].get<bool>();
    if (j.contains("parallel")) spec.parallel_cells = j["parallel"].get<bool>();
    if (j.contains("T")) spec.T = j["T"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigurationError("config: gamma entries must be numbers");
  }
}

void load_config(const std::string& path, ExperimentSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_json(ss.str(), spec);
}

}  // namespace rbd
