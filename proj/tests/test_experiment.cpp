#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rbd/errors.hpp"
#include "rbd/experiment.hpp"

using namespace rbd;

namespace {

std::string strip_cpu(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (i != 4) out << cells[i] << ';';
    out << '\n';
  }
  return out.str();
}

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.h_values = {0.25, 0.125};
  s.gammas = {1e-6, 1.0};
  return s;
}

}  // namespace

TEST_CASE("h parsing") {
  CHECK(parse_h("2^-5") == 1.0 / 32.0);
  CHECK(parse_h(" 2^-6 ") == 1.0 / 64.0);
  CHECK(parse_h("1/16") == 1.0 / 16.0);
  CHECK(parse_h("0.125") == 0.125);
  CHECK_THROWS_AS(parse_h("0.3"), ConfigurationError);
  CHECK_THROWS_AS(parse_h("1"), ConfigurationError);
  CHECK_THROWS_AS(parse_h("2^5"), ConfigurationError);
  CHECK_THROWS_AS(parse_h("abc"), ConfigurationError);
  CHECK_THROWS_AS(parse_h(""), ConfigurationError);
}

TEST_CASE("three significant digits with unpadded exponent") {
  CHECK(format_sci3(0.0154) == "1.54e-2");
  CHECK(format_sci3(0.015383) == "1.54e-2");
  CHECK(format_sci3(7.19e-4) == "7.19e-4");
  CHECK(format_sci3(2.5) == "2.50e0");
  CHECK(format_sci3(12345.0) == "1.23e4");
  CHECK(format_sci3(0.0) == "0.00e0");
}

TEST_CASE("csv layout") {
  CHECK(format_table({}, "csv") == "gamma,h,dof,iter,cpu_s,e_h,e_h_raw\n");
  ExperimentRow row;
  row.gamma = 1e-10;
  row.h = 1.0 / 32.0;
  row.dof = 61504;
  row.iterations = 4;
  row.cpu_seconds = 0.0341;
  row.e_h = 0.0154;
  row.converged = true;
  const auto csv = format_table({row}, "csv");
  CHECK(csv == "gamma,h,dof,iter,cpu_s,e_h,e_h_raw\n1e-10,0.03125,61504,4,0.034,1.54e-2,0.0154\n");
  row.e_h.reset();
  CHECK(format_table({row}, "csv").find(",4,0.034,,\n") != std::string::npos);
  const auto text = format_table({row}, "text");
  CHECK(text.find("2^-5") != std::string::npos);
  CHECK_THROWS_AS(format_table({row}, "xml"), ConfigurationError);
}

TEST_CASE("spec validation happens before any solve") {
  auto s = small_spec();
  s.example = "2";
  s.solver.inner = InnerSolverKind::Dst;
  CHECK_THROWS_AS(run_experiment(s), ConfigurationError);
  s = small_spec();
  s.h_values = {0.3};
  CHECK_THROWS_AS(validate_spec(s), ConfigurationError);
  s.h_values = {1.0 / 128.0};
  CHECK_THROWS_AS(validate_spec(s), ConfigurationError);
  s.allow_large = true;
  CHECK_NOTHROW(validate_spec(s));
  s = small_spec();
  s.gammas = {0.0};
  CHECK_THROWS_AS(validate_spec(s), ConfigurationError);
  s = small_spec();
  s.example = "nope";
  CHECK_THROWS_AS(validate_spec(s), ConfigurationError);
}

TEST_CASE("rows follow gamma then h order with DoF = 2mn") {
  const auto rows = run_experiment(small_spec());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].gamma == 1e-6);
  CHECK(rows[0].h == 0.25);
  CHECK(rows[1].h == 0.125);
  CHECK(rows[2].gamma == 1.0);
  CHECK(rows[0].dof == 2 * 9 * 4);
  CHECK(rows[1].dof == 2 * 49 * 8);
  for (const auto& r : rows) {
    CHECK(r.converged);
    CHECK(r.e_h.has_value());
  }
}

TEST_CASE("empty gamma list gives an empty table") {
  auto s = small_spec();
  s.gammas.clear();
  const auto rows = run_experiment(s);
  CHECK(rows.empty());
  CHECK(format_table(rows, "csv") == "gamma,h,dof,iter,cpu_s,e_h,e_h_raw\n");
}

TEST_CASE("reruns are identical apart from timing; iterations ignore the conjugacy flag") {
  auto s = small_spec();
  s.example = "2";
  s.solver.inner = InnerSolverKind::Multigrid;
  const auto a = format_table(run_experiment(s), "csv");
  const auto b = format_table(run_experiment(s), "csv");
  CHECK(strip_cpu(a) == strip_cpu(b));
  s.solver.exploit_conjugacy = false;
  const auto c = run_experiment(s);
  const auto d = run_experiment(small_spec());
  s.solver.exploit_conjugacy = true;
  const auto e = run_experiment(s);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i].iterations == e[i].iterations);
  s.parallel_cells = true;
  const auto f = run_experiment(s);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i].iterations == e[i].iterations);
  CHECK(d.size() == c.size());
}

TEST_CASE("output file and config overrides") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "rbd_test_out.csv").string();
  emit_output({}, "csv", path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "gamma,h,dof,iter,cpu_s,e_h,e_h_raw");
  std::remove(path.c_str());
  CHECK_THROWS_AS(emit_output({}, "csv", "/nonexistent_dir/x/out.csv"), Error);

  ExperimentSpec s;
  apply_config_json(R"cfg({"example": 2, "h": ["2^-4", 0.125], "gamma": [1e-3, "1"],
                        "inner": "mg", "tol": 1e-8, "maxit": 50, "epsilon": "c_tau(0.4)",
                        "pre_smooth": 2, "post_smooth": 0, "format": "text"})cfg",
                    s);
  CHECK(s.example == "2");
  CHECK(s.h_values == std::vector<double>{1.0 / 16.0, 0.125});
  CHECK(s.gammas == std::vector<double>{1e-3, 1.0});
  CHECK(s.solver.inner == InnerSolverKind::Multigrid);
  CHECK(s.solver.tolerance == 1e-8);
  CHECK(s.solver.max_iterations == 50);
  CHECK(std::get<CTauEpsilon>(s.solver.epsilon).delta == 0.4);
  CHECK(s.solver.mg.pre_smooth == 2);
  CHECK(s.solver.mg.post_smooth == 0);
  CHECK(s.format == "text");
  CHECK_THROWS_AS(apply_config_json("{not json", s), ConfigurationError);
  CHECK_THROWS_AS(apply_config_json(R"({"h": ["0.3"]})", s), ConfigurationError);
  CHECK_THROWS_AS(load_config("/nonexistent.json", s), ConfigurationError);
}
