#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "splitsys/harness.hpp"
#include "splitsys/io.hpp"
#include "splitsys/operators.hpp"
#include "splitsys/solver.hpp"

using namespace splitsys;
namespace fs = std::filesystem;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

fs::path scratch_dir() {
  fs::path p = fs::temp_directory_path() / "splitsys_io_tests";
  fs::create_directories(p);
  return p;
}

// drop the trailing time column from every CSV line
std::string strip_time_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.rfind(',');
    out << line.substr(0, pos) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("instance JSON round trip preserves solver behavior") {
  ProblemInstance orig = generate_planted_system(4, 2, 9, Structure::mixed_l1);
  fs::path file = scratch_dir() / "nested" / "roundtrip.json";
  save_instance(orig, file);
  ProblemInstance back = load_instance(file);

  CHECK(instance_to_json(orig) == instance_to_json(back));
  REQUIRE(back.known_solution.has_value());
  CHECK((*back.known_solution - *orig.known_solution).norm() == 0.0);

  Vector x0 = default_start(orig, 9);
  SolveResult a = solve(orig, AlgoParams{}, x0);
  SolveResult b = solve(back, AlgoParams{}, x0);
  REQUIRE(a.trace.iterations.size() == b.trace.iterations.size());
  for (std::size_t i = 0; i < a.trace.iterations.size(); ++i)
    CHECK((a.trace.iterations[i].x - b.trace.iterations[i].x).norm() == 0.0);
}

TEST_CASE("instance JSON carries the documented schema") {
  ProblemInstance inst = generate_planted_system(3, 2, 4, Structure::mixed_l1);
  nlohmann::json j = nlohmann::json::parse(instance_to_json(inst));
  CHECK(j["n"] == 3);
  CHECK(j["m"] == 2);
  CHECK(j["seed"] == 4);
  CHECK(j["R"].is_number());
  CHECK(j["X"]["kind"] == "box");
  REQUIRE(j["components"].size() == 2);
  CHECK(j["components"][0]["B"]["kind"] == "l1");
  CHECK(j["components"][1]["A"]["kind"] == "affine");
  CHECK(j["known_solution"].is_array());
}

TEST_CASE("loading without X falls back to a wide box") {
  std::string text = R"({
    "name": "bare",
    "n": 2,
    "m": 1,
    "components": [
      {"A": {"kind": "zero", "dim": 2},
       "B": {"kind": "l1", "lambda": 0.5, "dim": 2}}
    ]
  })";
  ProblemInstance inst = instance_from_json(text);
  CHECK(inst.X.kind() == ConvexSet::Kind::box);
  CHECK(inst.X.lo()[0] == -100.0);
  CHECK(inst.X.hi()[1] == 100.0);
  CHECK(inst.radius_R == 10.0);
}

TEST_CASE("load failures map to IoError") {
  CHECK_THROWS_AS(load_instance(scratch_dir() / "missing.json"), IoError);
  CHECK_THROWS_AS(instance_from_json("{ not json"), IoError);
  CHECK_THROWS_AS(instance_from_json(R"({"name":"x","n":0,"m":0,"components":[]})"), IoError);
}

TEST_CASE("allow_unchecked admits a deliberately broken map") {
  ProblemInstance bad;
  bad.n = 2;
  bad.components.push_back(
      {ForwardOperator::affine_unchecked(-Matrix::Identity(2, 2), Vector::Zero(2)),
       SetValuedOperator::zero(2)});
  bad.X = ConvexSet::box(vec2(-1, -1), vec2(1, 1));
  bad.name = "antimonotone";
  std::string text = instance_to_json(bad);

  CHECK_THROWS_AS(instance_from_json(text), IoError);
  ProblemInstance loose = instance_from_json(text, true);
  CHECK((loose.components[0].A(vec2(1, 0)) - vec2(-1, 0)).norm() == 0.0);
}

TEST_CASE("trace CSV format and determinism") {
  ProblemInstance inst = generate_planted_system(2, 2, 13, Structure::affine_vi);
  Vector x0 = default_start(inst, 13);
  SolveResult a = solve(inst, AlgoParams{}, x0);
  SolveResult b = solve(inst, AlgoParams{}, x0);

  std::ostringstream sa, sb;
  write_trace_csv(a.trace, sa);
  write_trace_csv(b.trace, sb);

  std::string first_line = sa.str().substr(0, sa.str().find('\n'));
  CHECK(first_line == "k,residual,dist_to_star,beta,linesearch_total,time_ms");

  std::size_t rows = 0;
  std::istringstream count(sa.str());
  for (std::string line; std::getline(count, line);) ++rows;
  CHECK(rows == a.trace.iterations.size() + 1);

  CHECK(strip_time_column(sa.str()) == strip_time_column(sb.str()));
}

TEST_CASE("metrics JSON isolates volatile fields") {
  ProblemInstance inst = generate_planted_system(2, 1, 1, Structure::affine_vi);
  Vector x0 = default_start(inst, 1);
  AlgoParams params;
  Metrics m1 = evaluate_run(solve(inst, params, x0).trace, inst);
  Metrics m2 = evaluate_run(solve(inst, params, x0).trace, inst);

  nlohmann::json j1 = nlohmann::json::parse(metrics_to_json(m1, inst.name, params));
  nlohmann::json j2 = nlohmann::json::parse(metrics_to_json(m2, inst.name, params));

  CHECK(j1["status"] == "solved");
  CHECK(j1["stop_reason"] == "residual_below_tol");
  CHECK(j1["volatile"].contains("wall_time_ms"));
  CHECK(j1["params_hash"].get<std::string>().size() == 16);
  CHECK(j1["params"]["theta"] == 0.5);
  CHECK(j1["instance"] == inst.name);

  j1.erase("volatile");
  j2.erase("volatile");
  CHECK(j1.dump() == j2.dump());
}

TEST_CASE("params fingerprint tracks the parameter set") {
  AlgoParams a;
  AlgoParams b;
  CHECK(params_fingerprint(a) == params_fingerprint(b));
  CHECK(params_fingerprint(a).size() == 16);
  b.delta = 0.25;
  CHECK(params_fingerprint(a) != params_fingerprint(b));
}

TEST_CASE("format_double writes shortest exact decimals") {
  for (double v : {0.55, 1.0 / 3.0, 1e-9, 6.02214076e23, -0.0, 123456.0}) {
    std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.55) == "0.55");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("saved artifacts land on disk") {
  ProblemInstance inst = generate_planted_system(2, 1, 5, Structure::affine_vi);
  SolveResult r = solve(inst, AlgoParams{}, default_start(inst, 5));
  fs::path dir = scratch_dir() / "artifacts";
  save_trace_csv(r.trace, dir / "trace.csv");
  save_metrics(evaluate_run(r.trace, inst), inst.name, AlgoParams{}, dir / "metrics.json");
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "metrics.json"));

  std::ifstream in(dir / "metrics.json");
  nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j["iterations"].is_number());
}
