#include "rsm/config.hpp"

#include <fstream>
#include <set>

#include "rsm/errors.hpp"
#include "rsm/examples.hpp"
#include "rsm/expression.hpp"

namespace rsm {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + where + it.key() + "'");
    }
  }
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError("field '" + field + "' must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError("field '" + field + "' must be an integer");
  return v.get<int>();
}

Vec vector_of(const json& v, const std::string& field) {
  if (v.is_number()) return Vec::Constant(1, v.get<double>());
  if (!v.is_array() || v.empty()) throw ConfigError("field '" + field + "' must be a non-empty array");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = number(v[i], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

Mat matrix_of(const json& v, const std::string& field) {
  if (v.is_number()) return Mat::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty()) throw ConfigError("field '" + field + "' must be a matrix");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array()) throw ConfigError("field '" + field + "' must be an array of rows");
    if (r == 0) cols = v[r].size();
    if (v[r].size() != cols || cols == 0) throw ConfigError("field '" + field + "' has ragged rows");
  }
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number(v[r][c], field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<std::string> strings_of(const json& v, const std::string& field) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ConfigError("field '" + field + "' must be a string or array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw ConfigError("field '" + field + "' must contain strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

SlowFastSystem inline_system(const json& doc) {
  reject_unknown(doc, {"name", "S", "F", "g1", "g2", "K", "g1_bound"}, "system.");
  for (const char* key : {"S", "F", "g1", "g2", "K"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("missing field 'system.") + key + "'");
  }
  SlowFastSystem s;
  s.name = doc.value("name", std::string("inline"));
  s.S = matrix_of(doc["S"], "system.S");
  s.F = matrix_of(doc["F"], "system.F");
  if (s.S.rows() != s.S.cols()) throw ConfigError("field 'system.S' must be square");
  if (s.F.rows() != s.F.cols()) throw ConfigError("field 'system.F' must be square");
  const auto n1 = static_cast<std::size_t>(s.S.rows());
  const auto n2 = static_cast<std::size_t>(s.F.rows());
  const auto g1 = strings_of(doc["g1"], "system.g1");
  const auto g2 = strings_of(doc["g2"], "system.g2");
  if (g1.size() != n1) throw ConfigError("field 'system.g1' needs one expression per slow variable");
  if (g2.size() != n2) throw ConfigError("field 'system.g2' needs one expression per fast variable");
  s.g1 = compile_field(g1, n1, n2);
  s.g2 = compile_field(g2, n1, n2);
  s.K = number(doc["K"], "system.K");
  if (doc.contains("g1_bound")) s.g1_bound = number(doc["g1_bound"], "system.g1_bound");
  return s;
}

std::vector<Vec> grid_of(const json& v, std::size_t n1) {
  std::vector<Vec> grid;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      grid.push_back(vector_of(v[i], "x0_grid[" + std::to_string(i) + "]"));
    }
  } else if (v.is_object()) {
    reject_unknown(v, {"from", "to", "points"}, "x0_grid.");
    if (!v.contains("from") || !v.contains("to") || !v.contains("points")) {
      throw ConfigError("field 'x0_grid' needs from, to and points");
    }
    const Vec a = vector_of(v["from"], "x0_grid.from");
    const Vec b = vector_of(v["to"], "x0_grid.to");
    const int n = integer(v["points"], "x0_grid.points");
    if (n < 2) throw ConfigError("field 'x0_grid.points' must be at least 2");
    if (a.size() != b.size()) throw ConfigError("field 'x0_grid' endpoints differ in dimension");
    for (int i = 0; i < n; ++i) grid.push_back(a + (b - a) * (static_cast<double>(i) / (n - 1)));
  } else {
    throw ConfigError("field 'x0_grid' must be an array of points or {from, to, points}");
  }
  if (grid.empty()) throw ConfigError("field 'x0_grid' is empty");
  for (const auto& p : grid) {
    if (static_cast<std::size_t>(p.size()) != n1) {
      throw ConfigError("field 'x0_grid' points must have dimension " + std::to_string(n1));
    }
  }
  return grid;
}

}  // namespace

SolverParams RunConfig::solver() const {
  SolverParams p;
  p.dt = solver_dt;
  p.tol = tol;
  p.max_iter = max_iter;
  p.horizon_tol = horizon_tol;
  p.gamma = gamma;
  return p;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(doc,
                 {"system", "epsilon", "sigma", "alpha", "seed", "dt", "t_span", "reduced_dt",
                  "solver_dt", "x0_grid", "initial_conditions", "tolerances", "gamma", "clamp",
                  "study", "workers"},
                 "");
  if (!doc.contains("system")) throw ConfigError("missing field 'system'");
  RunConfig cfg;
  cfg.snapshot = doc;
  const json& sys = doc["system"];
  if (sys.is_string()) {
    const auto ex = examples::lookup(sys.get<std::string>());
    if (!ex) throw ConfigError("field 'system': unknown example '" + sys.get<std::string>() + "'");
    cfg.system_name = ex->name;
    cfg.system = ex->system;
    cfg.h0_oracle = ex->h0;
    cfg.h1_quiet_oracle = ex->h1_quiet;
    cfg.x0_grid = ex->x0_grid;
    for (const auto& [x, y] : ex->initial_conditions) cfg.initial_conditions.push_back({x, y});
    cfg.span = ex->span;
  } else if (sys.is_object()) {
    cfg.system = inline_system(sys);
    cfg.system_name = cfg.system.name;
    cfg.system.epsilon = 0.01;
    cfg.system.sigma = 0.0;
    cfg.system.noise = StableSpec::uniform(1.8, static_cast<std::size_t>(cfg.system.n_fast()));
  } else {
    throw ConfigError("field 'system' must be an example name or an object");
  }
  const auto n1 = static_cast<std::size_t>(cfg.system.n_slow());
  const auto n2 = static_cast<std::size_t>(cfg.system.n_fast());

  if (doc.contains("epsilon")) cfg.system.epsilon = number(doc["epsilon"], "epsilon");
  if (doc.contains("sigma")) cfg.system.sigma = number(doc["sigma"], "sigma");
  if (doc.contains("alpha")) {
    const Vec a = vector_of(doc["alpha"], "alpha");
    if (a.size() == 1) {
      cfg.system.noise = StableSpec::uniform(a[0], n2);
    } else if (static_cast<std::size_t>(a.size()) == n2) {
      cfg.system.noise = StableSpec{std::vector<double>(a.data(), a.data() + a.size()), 1.0};
    } else {
      throw ConfigError("field 'alpha' needs one value or one per fast variable");
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      throw ConfigError("field 'seed' must be an unsigned integer");
    }
    if (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() < 0) {
      throw ConfigError("field 'seed' must be an unsigned integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("dt")) cfg.dt = number(doc["dt"], "dt");
  if (doc.contains("reduced_dt")) cfg.reduced_dt = number(doc["reduced_dt"], "reduced_dt");
  if (doc.contains("solver_dt")) cfg.solver_dt = number(doc["solver_dt"], "solver_dt");
  if (doc.contains("t_span")) {
    const Vec s = vector_of(doc["t_span"], "t_span");
    if (s.size() != 2 || !(s[1] > s[0])) throw ConfigError("field 't_span' must be [t0, t1] with t1 > t0");
    cfg.span = {s[0], s[1]};
  }
  if (doc.contains("x0_grid")) cfg.x0_grid = grid_of(doc["x0_grid"], n1);
  if (doc.contains("initial_conditions")) {
    const json& ics = doc["initial_conditions"];
    if (!ics.is_array()) throw ConfigError("field 'initial_conditions' must be an array");
    cfg.initial_conditions.clear();
    for (std::size_t i = 0; i < ics.size(); ++i) {
      const std::string f = "initial_conditions[" + std::to_string(i) + "]";
      if (!ics[i].is_object()) throw ConfigError("field '" + f + "' must be {x, y}");
      reject_unknown(ics[i], {"x", "y"}, f + ".");
      if (!ics[i].contains("x") || !ics[i].contains("y")) throw ConfigError("field '" + f + "' needs x and y");
      InitialCondition ic{vector_of(ics[i]["x"], f + ".x"), vector_of(ics[i]["y"], f + ".y")};
      if (static_cast<std::size_t>(ic.x.size()) != n1 || static_cast<std::size_t>(ic.y.size()) != n2) {
        throw ConfigError("field '" + f + "' has the wrong dimensions");
      }
      cfg.initial_conditions.push_back(ic);
    }
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw ConfigError("field 'tolerances' must be an object");
    reject_unknown(t, {"solver", "horizon", "lookback", "max_iter"}, "tolerances.");
    if (t.contains("solver")) cfg.tol = number(t["solver"], "tolerances.solver");
    if (t.contains("horizon")) cfg.horizon_tol = number(t["horizon"], "tolerances.horizon");
    if (t.contains("lookback")) cfg.lookback_tol = number(t["lookback"], "tolerances.lookback");
    if (t.contains("max_iter")) cfg.max_iter = integer(t["max_iter"], "tolerances.max_iter");
  }
  if (doc.contains("gamma") && !doc["gamma"].is_null()) cfg.gamma = number(doc["gamma"], "gamma");
  if (doc.contains("clamp")) {
    if (!doc["clamp"].is_boolean()) throw ConfigError("field 'clamp' must be a boolean");
    cfg.clamp = doc["clamp"].get<bool>();
  }
  if (doc.contains("workers")) cfg.workers = integer(doc["workers"], "workers");
  if (doc.contains("study")) {
    const json& s = doc["study"];
    if (!s.is_object()) throw ConfigError("field 'study' must be an object");
    reject_unknown(s, {"x0", "epsilons", "realizations", "ks_samples", "contraction_configs"}, "study.");
    if (s.contains("x0")) {
      cfg.study.x0 = vector_of(s["x0"], "study.x0");
      if (static_cast<std::size_t>(cfg.study.x0->size()) != n1) {
        throw ConfigError("field 'study.x0' has the wrong dimension");
      }
    }
    if (s.contains("epsilons")) {
      const Vec e = vector_of(s["epsilons"], "study.epsilons");
      cfg.study.epsilons.assign(e.data(), e.data() + e.size());
    }
    if (s.contains("realizations")) cfg.study.realizations = integer(s["realizations"], "study.realizations");
    if (s.contains("ks_samples")) cfg.study.ks_samples = integer(s["ks_samples"], "study.ks_samples");
    if (s.contains("contraction_configs")) {
      cfg.study.contraction_configs = integer(s["contraction_configs"], "study.contraction_configs");
    }
  }

  // Range checks.
  if (!(cfg.system.epsilon >= 0.0)) throw ConfigError("field 'epsilon' must be non-negative");
  if (!(cfg.system.sigma >= 0.0)) throw ConfigError("field 'sigma' must be non-negative");
  try {
    cfg.system.noise.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("field 'alpha': ") + e.what());
  }
  for (auto [v, name] : {std::pair{cfg.dt, "dt"}, std::pair{cfg.reduced_dt, "reduced_dt"},
                         std::pair{cfg.solver_dt, "solver_dt"}}) {
    if (!(v > 0.0)) throw ConfigError(std::string("field '") + name + "' must be positive");
  }
  for (auto [v, name] : {std::pair{cfg.tol, "tolerances.solver"},
                         std::pair{cfg.horizon_tol, "tolerances.horizon"},
                         std::pair{cfg.lookback_tol, "tolerances.lookback"}}) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string("field '") + name + "' must lie in (0, 1)");
  }
  if (cfg.max_iter < 1) throw ConfigError("field 'tolerances.max_iter' must be positive");
  if (cfg.gamma && !(*cfg.gamma > 0.0)) throw ConfigError("field 'gamma' must be positive");
  if (cfg.workers < 0) throw ConfigError("field 'workers' must be non-negative");
  if (cfg.study.realizations < 1) throw ConfigError("field 'study.realizations' must be positive");
  if (cfg.study.ks_samples < 50) throw ConfigError("field 'study.ks_samples' must be at least 50");
  if (cfg.study.contraction_configs < 1) {
    throw ConfigError("field 'study.contraction_configs' must be positive");
  }
  // validate() insists on eps > 0; eps = 0 is legal for critical objects.
  cfg.system.with_epsilon(cfg.system.epsilon > 0.0 ? cfg.system.epsilon : 1.0).validate();
  if (cfg.x0_grid.empty()) {
    for (int i = 0; i <= 10; ++i) cfg.x0_grid.push_back(Vec::Constant(static_cast<Eigen::Index>(n1), 0.1 * i));
  }
  if (cfg.initial_conditions.empty()) {
    cfg.initial_conditions.push_back({Vec::Constant(static_cast<Eigen::Index>(n1), 0.5),
                                      Vec::Zero(static_cast<Eigen::Index>(n2))});
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open configuration file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("configuration " + file.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

RunConfig default_config(const std::string& example) {
  return parse_config(json{{"system", example}});
}

}  // namespace rsm
