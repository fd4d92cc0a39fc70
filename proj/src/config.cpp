#include "mchom/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>

#include "mchom/macro_solver.hpp"

namespace mchom {

namespace {

using json = nlohmann::ordered_json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double get_number(const json& obj, const std::string& where, const char* key,
                  const double* fallback = nullptr) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + " is missing required key \"" + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(where + "." + key + " must be a number");
  }
  return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key,
            int lo, int hi, const int* fallback = nullptr) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + " is missing required key \"" + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(where + "." + key + " must be an integer");
  }
  const auto raw = v.get<long long>();
  if (raw < lo || raw > hi) {
    throw ConfigError(where + "." + key + " must be in [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(raw);
}

std::string get_string(const json& obj, const std::string& where,
                       const char* key, const char* fallback = nullptr) {
  if (!obj.contains(key)) {
    if (fallback) return fallback;
    throw ConfigError(where + " is missing required key \"" + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw ConfigError(where + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& where, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw ConfigError(where + "." + key + " must be a boolean");
  }
  return v.get<bool>();
}

std::array<double, 2> get_pair(const json& obj, const std::string& where,
                               const char* key,
                               const std::array<double, 2>& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    throw ConfigError(where + "." + key +
                      " must be an array of two numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> get_number_array(const json& obj, const std::string& where,
                                     const char* key) {
  if (!obj.contains(key)) {
    throw ConfigError(where + " is missing required key \"" + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_array()) {
    throw ConfigError(where + "." + key + " must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) {
      throw ConfigError(where + "." + key + " must be an array of numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

TabulatedField parse_table(const json& m, const std::string& where,
                           const char* key, double x_lo, double x_hi, int nx,
                           int ny) {
  TabulatedField t;
  t.x_lo = x_lo;
  t.x_hi = x_hi;
  t.nx = nx;
  t.ny = ny;
  t.data = get_number_array(m, where, key);
  return t;
}

CoefficientModel parse_model(const json& m) {
  const std::string where = "model";
  require_object(m, where);
  const std::string kind = get_string(m, where, "kind");
  if (kind == "paper4") {
    check_keys(m, where, {"kind", "a"});
    return CoefficientModel::paper4(get_number(m, where, "a"));
  }
  if (kind == "constant") {
    check_keys(m, where, {"kind", "k1", "k2", "q"});
    return CoefficientModel::constant(get_number(m, where, "k1"),
                                      get_number(m, where, "k2"),
                                      get_number(m, where, "q"));
  }
  if (kind == "laminate") {
    check_keys(m, where, {"kind", "profile", "q"});
    return CoefficientModel::laminate(
        get_string(m, where, "profile", "cosine"),
        get_number(m, where, "q"));
  }
  if (kind == "tabulated") {
    check_keys(m, where,
               {"kind", "x_lo", "x_hi", "nx", "ny", "k1", "k2", "q"});
    const double zero = 0.0, one = 1.0;
    const double x_lo = get_number(m, where, "x_lo", &zero);
    const double x_hi = get_number(m, where, "x_hi", &one);
    const int nx = get_int(m, where, "nx", 2, 4096);
    const int ny = get_int(m, where, "ny", 2, 4096);
    return CoefficientModel::tabulated(
        parse_table(m, where, "k1", x_lo, x_hi, nx, ny),
        parse_table(m, where, "k2", x_lo, x_hi, nx, ny),
        parse_table(m, where, "q", x_lo, x_hi, nx, ny));
  }
  throw ConfigError(
      "model.kind must be paper4, constant, laminate or tabulated");
}

json table_echo(const TabulatedField& t) { return json(t.data); }

json model_echo(const CoefficientModel& model) {
  json m;
  switch (model.kind()) {
    case CoefficientModel::Kind::Paper4:
      m["kind"] = "paper4";
      m["a"] = model.param_a();
      break;
    case CoefficientModel::Kind::Constant:
      m["kind"] = "constant";
      m["k1"] = model.param_k1();
      m["k2"] = model.param_k2();
      m["q"] = model.param_q();
      break;
    case CoefficientModel::Kind::Laminate:
      m["kind"] = "laminate";
      m["profile"] = model.profile();
      m["q"] = model.param_q();
      break;
    case CoefficientModel::Kind::Tabulated:
      m["kind"] = "tabulated";
      m["x_lo"] = model.tab_k1().x_lo;
      m["x_hi"] = model.tab_k1().x_hi;
      m["nx"] = model.tab_k1().nx;
      m["ny"] = model.tab_k1().ny;
      m["k1"] = table_echo(model.tab_k1());
      m["k2"] = table_echo(model.tab_k2());
      m["q"] = table_echo(model.tab_q());
      break;
  }
  return m;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Hier: return "hier";
    case RunMode::Full: return "full";
    case RunMode::Both: return "both";
  }
  return "both";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "hier") return RunMode::Hier;
  if (s == "full") return RunMode::Full;
  if (s == "both") return RunMode::Both;
  throw ConfigError("mode must be hier, full or both");
}

RunConfig parse_config_json(const nlohmann::ordered_json& doc) {
  require_object(doc, "configuration");
  check_keys(doc, "configuration",
             {"model", "base_n", "L", "macro", "interp_points", "mode",
              "output_dir", "reproducible", "workers", "qorder", "solver",
              "macro_solver"});
  if (!doc.contains("model")) {
    throw ConfigError("configuration is missing required key \"model\"");
  }

  RunConfig c;
  c.model = parse_model(doc.at("model"));
  const int two = 2, three = 3, one = 1;
  c.base_n = get_int(doc, "configuration", "base_n", 1, 1024, &two);
  c.L = get_int(doc, "configuration", "L", 0, 16, &three);

  if (doc.contains("macro")) {
    const json& m = doc.at("macro");
    require_object(m, "macro");
    check_keys(m, "macro", {"dim", "lo", "hi", "H"});
    c.macro_dim = get_int(m, "macro", "dim", 1, 2, &one);
    c.lo = get_pair(m, "macro", "lo", {0.0, 0.0});
    c.hi = get_pair(m, "macro", "hi", {1.0, 1.0});
    const double half = 0.5;
    c.H = get_number(m, "macro", "H", &half);
  }
  if (!(c.H > 0.0)) throw ConfigError("macro.H must be positive");
  for (int d = 0; d < c.macro_dim; ++d) {
    const double extent = c.hi[static_cast<size_t>(d)] -
                          c.lo[static_cast<size_t>(d)];
    if (!(extent > 0.0)) throw ConfigError("macro box is empty");
    const double cells = extent / c.H;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
      throw ConfigError("macro.H must divide the domain extent");
    }
  }

  c.interp_points =
      get_int(doc, "configuration", "interp_points", 1, 4, &one);
  if (c.interp_points != 1 && c.interp_points != (1 << c.macro_dim)) {
    throw ConfigError("interp_points must be 1 or 2^macro.dim");
  }
  c.mode = run_mode_from_string(
      get_string(doc, "configuration", "mode", "both"));
  c.output_dir = get_string(doc, "configuration", "output_dir", "out");
  c.reproducible = get_bool(doc, "configuration", "reproducible", false);
  c.workers = get_int(doc, "configuration", "workers", 1, 256, &one);
  c.qorder = get_int(doc, "configuration", "qorder", 1, 10, &three);

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    require_object(s, "solver");
    check_keys(s, "solver",
               {"tol", "max_iter", "direct_dim_limit", "force_iterative"});
    const double tol = 1e-10;
    c.solver.tol = get_number(s, "solver", "tol", &tol);
    if (!(c.solver.tol > 0.0) || c.solver.tol > 1e-2) {
      throw ConfigError("solver.tol must be in (0, 1e-2]");
    }
    const int max_iter = 20000;
    c.solver.max_iter = get_int(s, "solver", "max_iter", 1, 1000000,
                                &max_iter);
    if (s.contains("direct_dim_limit")) {
      c.solver.direct_dim_limit =
          get_int(s, "solver", "direct_dim_limit", 0, 1 << 30);
    }
    c.solver.force_iterative =
        get_bool(s, "solver", "force_iterative", false);
  }

  if (doc.contains("macro_solver")) {
    const json& m = doc.at("macro_solver");
    require_object(m, "macro_solver");
    check_keys(m, "macro_solver",
               {"dt", "t_end", "g1", "g2", "q", "snapshot_times", "mesh_n"});
    MacroSolverConfig ms;
    ms.dt = get_number(m, "macro_solver", "dt");
    if (!(ms.dt > 0.0)) throw ConfigError("macro_solver.dt must be positive");
    ms.t_end = get_number(m, "macro_solver", "t_end");
    if (ms.t_end < 0.0) {
      throw ConfigError("macro_solver.t_end must be non-negative");
    }
    ms.g1 = get_string(m, "macro_solver", "g1", "zero");
    ms.g2 = get_string(m, "macro_solver", "g2", "zero");
    ms.q = get_string(m, "macro_solver", "q", "zero");
    named_scalar_field(ms.g1);  // validates the names up front
    named_scalar_field(ms.g2);
    named_scalar_field(ms.q);
    if (m.contains("snapshot_times")) {
      ms.snapshot_times = get_number_array(m, "macro_solver",
                                           "snapshot_times");
      for (double t : ms.snapshot_times) {
        if (t < 0.0 || t > ms.t_end) {
          throw ConfigError(
              "macro_solver.snapshot_times must lie in [0, t_end]");
        }
      }
    }
    const int mesh_n = 32;
    ms.mesh_n = get_int(m, "macro_solver", "mesh_n", 2, 2048, &mesh_n);
    c.macro_solver = std::move(ms);
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read configuration file: " + path);
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") +
                      e.what());
  }
  return parse_config_json(doc);
}

nlohmann::ordered_json config_echo(const RunConfig& c) {
  json doc;
  doc["model"] = model_echo(c.model);
  doc["base_n"] = c.base_n;
  doc["L"] = c.L;
  doc["macro"] = json{{"dim", c.macro_dim},
                      {"lo", {c.lo[0], c.lo[1]}},
                      {"hi", {c.hi[0], c.hi[1]}},
                      {"H", c.H}};
  doc["interp_points"] = c.interp_points;
  doc["mode"] = to_string(c.mode);
  doc["output_dir"] = c.output_dir;
  doc["reproducible"] = c.reproducible;
  // The worker count schedules independent point solves and can never
  // change a computed number, so reproducible manifests leave it out to
  // stay bitwise identical across worker counts.
  if (!c.reproducible) doc["workers"] = c.workers;
  doc["qorder"] = c.qorder;
  doc["solver"] = json{{"tol", c.solver.tol},
                       {"max_iter", c.solver.max_iter},
                       {"direct_dim_limit", c.solver.direct_dim_limit},
                       {"force_iterative", c.solver.force_iterative}};
  if (c.macro_solver) {
    const MacroSolverConfig& ms = *c.macro_solver;
    doc["macro_solver"] = json{{"dt", ms.dt},
                               {"t_end", ms.t_end},
                               {"g1", ms.g1},
                               {"g2", ms.g2},
                               {"q", ms.q},
                               {"snapshot_times", ms.snapshot_times},
                               {"mesh_n", ms.mesh_n}};
  }
  return doc;
}

}  // namespace mchom
