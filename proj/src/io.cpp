#include "splitsys/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "splitsys/operators.hpp"

namespace splitsys {

using json = nlohmann::ordered_json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

json to_json_array(const Vector& v) {
  json a = json::array();
  for (Index j = 0; j < v.size(); ++j) a.push_back(v[j]);
  return a;
}

json to_json_matrix(const Matrix& M) {
  json rows = json::array();
  for (Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Vector vector_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw IoError(what + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  Index idx = 0;
  for (const auto& e : j) {
    if (!e.is_number()) throw IoError(what + ": expected numeric entries");
    v[idx++] = e.get<double>();
  }
  return v;
}

Matrix matrix_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw IoError(what + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.front().size());
  Matrix M(rows, cols);
  Index r = 0;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw IoError(what + ": ragged matrix rows");
    Index c = 0;
    for (const auto& e : row) {
      if (!e.is_number()) throw IoError(what + ": expected numeric entries");
      M(r, c++) = e.get<double>();
    }
    ++r;
  }
  return M;
}

json set_to_json(const ConvexSet& set) {
  json j;
  switch (set.kind()) {
    case ConvexSet::Kind::whole_space:
      j["kind"] = "whole_space";
      j["dim"] = set.dim();
      return j;
    case ConvexSet::Kind::box:
      j["kind"] = "box";
      j["lo"] = to_json_array(set.lo());
      j["hi"] = to_json_array(set.hi());
      return j;
    case ConvexSet::Kind::ball:
      j["kind"] = "ball";
      j["center"] = to_json_array(set.center());
      j["radius"] = set.radius();
      return j;
    case ConvexSet::Kind::halfspace:
      j["kind"] = "halfspace";
      j["normal"] = to_json_array(set.normal());
      j["anchor"] = to_json_array(set.anchor());
      return j;
    case ConvexSet::Kind::hyperplane:
      j["kind"] = "hyperplane";
      j["normal"] = to_json_array(set.normal());
      j["offset"] = set.offset();
      return j;
  }
  throw IoError("unknown set kind");
}

ConvexSet set_from_json(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("kind")) throw IoError(what + ": set needs a kind tag");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "whole_space") return ConvexSet::whole_space(j.at("dim").get<Index>());
    if (kind == "box")
      return ConvexSet::box(vector_from(j.at("lo"), what + ".lo"),
                            vector_from(j.at("hi"), what + ".hi"));
    if (kind == "ball")
      return ConvexSet::ball(vector_from(j.at("center"), what + ".center"),
                             j.at("radius").get<double>());
    if (kind == "halfspace")
      return ConvexSet::halfspace(vector_from(j.at("normal"), what + ".normal"),
                                  vector_from(j.at("anchor"), what + ".anchor"));
    if (kind == "hyperplane")
      return ConvexSet::hyperplane(vector_from(j.at("normal"), what + ".normal"),
                                   j.at("offset").get<double>());
  } catch (const json::exception& e) {
    throw IoError(what + ": " + e.what());
  }
  throw IoError(what + ": unknown set kind '" + kind + "'");
}

json forward_to_json(const ForwardOperator& A) {
  json j;
  switch (A.kind()) {
    case ForwardOperator::Kind::affine:
      j["kind"] = "affine";
      j["M"] = to_json_matrix(A.matrix());
      j["q"] = to_json_array(A.shift());
      return j;
    case ForwardOperator::Kind::zero:
      j["kind"] = "zero";
      j["dim"] = A.dim();
      return j;
    case ForwardOperator::Kind::custom:
      break;
  }
  throw IoError("custom forward operators cannot be serialized");
}

ForwardOperator forward_from_json(const json& j, Index n, bool allow_unchecked,
                                  const std::string& what) {
  if (!j.is_object() || !j.contains("kind")) throw IoError(what + ": operator needs a kind tag");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "affine") {
    Matrix M = matrix_from(j.at("M"), what + ".M");
    Vector q = vector_from(j.at("q"), what + ".q");
    if (M.rows() != n || M.cols() != n || q.size() != n)
      throw IoError(what + ": affine dimensions disagree with n");
    return allow_unchecked ? ForwardOperator::affine_unchecked(std::move(M), std::move(q))
                           : ForwardOperator::affine(std::move(M), std::move(q));
  }
  if (kind == "zero") return ForwardOperator::zero(n);
  throw IoError(what + ": unknown forward-operator kind '" + kind + "'");
}

json setvalued_to_json(const SetValuedOperator& B) {
  json j;
  switch (B.kind()) {
    case SetValuedOperator::Kind::normal_cone:
      j["kind"] = "normal_cone";
      j["set"] = set_to_json(B.set());
      return j;
    case SetValuedOperator::Kind::l1:
      j["kind"] = "l1";
      j["lambda"] = B.lambda();
      j["dim"] = B.dim();
      return j;
    case SetValuedOperator::Kind::zero:
      j["kind"] = "zero";
      j["dim"] = B.dim();
      return j;
    case SetValuedOperator::Kind::custom:
      break;
  }
  throw IoError("custom set-valued operators cannot be serialized");
}

SetValuedOperator setvalued_from_json(const json& j, Index n, const std::string& what) {
  if (!j.is_object() || !j.contains("kind")) throw IoError(what + ": operator needs a kind tag");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "normal_cone") {
    ConvexSet set = set_from_json(j.at("set"), what + ".set");
    if (set.dim() != n) throw IoError(what + ": set dimension disagrees with n");
    return SetValuedOperator::normal_cone(std::move(set));
  }
  if (kind == "l1") return SetValuedOperator::l1(j.at("lambda").get<double>(), n);
  if (kind == "zero") return SetValuedOperator::zero(n);
  throw IoError(what + ": unknown set-valued-operator kind '" + kind + "'");
}

}  // namespace

std::string instance_to_json(const ProblemInstance& instance) {
  json j;
  j["name"] = instance.name;
  j["n"] = instance.n;
  j["m"] = instance.m();
  j["seed"] = instance.seed;
  j["R"] = instance.radius_R;
  j["X"] = set_to_json(instance.X);
  json comps = json::array();
  for (const Component& c : instance.components) {
    json entry;
    entry["A"] = forward_to_json(c.A);
    entry["B"] = setvalued_to_json(c.B);
    comps.push_back(std::move(entry));
  }
  j["components"] = std::move(comps);
  if (instance.known_solution) j["known_solution"] = to_json_array(*instance.known_solution);
  return j.dump(2) + "\n";
}

ProblemInstance instance_from_json(const std::string& text, bool allow_unchecked) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("instance parse failure: ") + e.what());
  }
  try {
    ProblemInstance inst;
    if (!j.contains("n")) throw IoError("instance: missing n");
    inst.n = j.at("n").get<Index>();
    if (inst.n < 1) throw IoError("instance: n must be >= 1");
    inst.name = j.value("name", std::string{});
    inst.seed = j.value("seed", std::uint64_t{0});
    inst.radius_R = j.value("R", 10.0);

    if (j.contains("X"))
      inst.X = set_from_json(j.at("X"), "X");
    else
      inst.X = ConvexSet::box(Vector::Constant(inst.n, -100.0), Vector::Constant(inst.n, 100.0));
    if (inst.X.dim() != inst.n) throw IoError("X dimension disagrees with n");

    if (!j.contains("components") || !j.at("components").is_array() ||
        j.at("components").empty())
      throw IoError("instance: components must be a nonempty array");
    std::size_t idx = 0;
    for (const auto& entry : j.at("components")) {
      const std::string tag = "components[" + std::to_string(idx) + "]";
      if (!entry.contains("A") || !entry.contains("B"))
        throw IoError(tag + ": needs both A and B");
      inst.components.push_back(
          {forward_from_json(entry.at("A"), inst.n, allow_unchecked, tag + ".A"),
           setvalued_from_json(entry.at("B"), inst.n, tag + ".B")});
      ++idx;
    }
    if (j.contains("m") && j.at("m").get<Index>() != inst.m())
      throw IoError("instance: m disagrees with the component count");

    if (j.contains("known_solution")) {
      Vector star = vector_from(j.at("known_solution"), "known_solution");
      if (star.size() != inst.n) throw IoError("known_solution dimension disagrees with n");
      inst.known_solution = std::move(star);
    }

    if (!allow_unchecked) inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw IoError(std::string("instance parse failure: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("instance rejected: ") + e.what());
  }
}

void save_instance(const ProblemInstance& instance, const std::filesystem::path& path) {
  const std::string text = instance_to_json(instance);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

ProblemInstance load_instance(const std::filesystem::path& path, bool allow_unchecked) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str(), allow_unchecked);
}

void write_trace_csv(const SolveTrace& trace, std::ostream& out) {
  out << "k,residual,dist_to_star,beta,linesearch_total,time_ms\n";
  for (const IterationRecord& rec : trace.iterations) {
    out << rec.k << ',' << format_double(rec.residual) << ','
        << format_double(rec.dist_to_solution) << ',' << format_double(rec.beta) << ','
        << rec.linesearch_total() << ',' << format_double(rec.time_ms) << '\n';
  }
}

void save_trace_csv(const SolveTrace& trace, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace_csv(trace, out);
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

json params_to_json(const AlgoParams& params) {
  json p;
  p["beta_lo"] = params.beta_lo;
  p["beta_hi"] = params.beta_hi;
  p["beta_schedule"] = params.beta_schedule.describe();
  p["theta"] = params.theta;
  p["delta"] = params.delta;
  p["radius"] = params.radius;
  p["tol_component"] = params.tol_component;
  p["tol_outer"] = params.tol_outer;
  p["max_outer"] = params.max_outer;
  p["max_linesearch"] = params.max_linesearch;
  return p;
}

}  // namespace

std::string params_fingerprint(const AlgoParams& params) {
  const std::string canon = params_to_json(params).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string metrics_to_json(const Metrics& metrics, const std::string& instance_name,
                            const AlgoParams& params) {
  json j;
  j["instance"] = instance_name;
  j["params"] = params_to_json(params);
  j["params_hash"] = params_fingerprint(params);
  j["status"] = to_string(metrics.status);
  j["stop_reason"] = to_string(metrics.stop_reason);
  j["iterations"] = metrics.iterations;
  j["final_residual"] = metrics.final_residual;
  j["total_linesearch_steps"] = metrics.total_linesearch_steps;
  j["max_linesearch_j"] = metrics.max_linesearch_j;
  j["fejer_violations"] = metrics.fejer_violations;
  j["chain_violations"] = metrics.chain_violations;
  j["containment_violations"] = metrics.containment_violations;
  j["accepted_step_violations"] = metrics.accepted_step_violations;
  j["x0_projected"] = metrics.x0_projected;
  json dists = json::array();
  for (double d : metrics.dist_to_solution) dists.push_back(d);
  j["dist_to_solution"] = std::move(dists);
  j["volatile"]["wall_time_ms"] = metrics.wall_time_ms;
  return j.dump(2) + "\n";
}

void save_metrics(const Metrics& metrics, const std::string& instance_name,
                  const AlgoParams& params, const std::filesystem::path& path) {
  const std::string text = metrics_to_json(metrics, instance_name, params);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace splitsys
