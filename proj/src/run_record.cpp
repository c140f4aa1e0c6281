#include "rsm/run_record.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "rsm/errors.hpp"

#ifndef RSM_SOURCE_VERSION
#define RSM_SOURCE_VERSION "unknown"
#endif

namespace rsm {

namespace {

std::string hex(const unsigned char* d, unsigned n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < n; ++i) {
    s += digits[d[i] >> 4];
    s += digits[d[i] & 15];
  }
  return s;
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr)) {
    throw Error("SHA-256 digest failed");
  }
  return hex(md, len);
}

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string source_version() { return RSM_SOURCE_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunRecord::add_output(const std::filesystem::path& dir, const std::string& name) {
  const auto p = dir / name;
  outputs.push_back({name, sha256_file(p), std::filesystem::file_size(p)});
}

nlohmann::json RunRecord::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["version"] = version;
  j["started_at"] = started_at;
  j["elapsed_seconds"] = elapsed_seconds;
  j["outputs"] = nlohmann::json::array();
  for (const auto& o : outputs) {
    j["outputs"].push_back({{"file", o.name}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  }
  j["hypotheses"] = hypotheses ? rsm::to_json(*hypotheses) : nlohmann::json(nullptr);
  j["warnings"] = warnings;
  j["results"] = results;
  return j;
}

void RunRecord::write(const std::filesystem::path& dir) const {
  std::ofstream out(dir / "run_record.json");
  if (!out) throw Error("cannot write " + (dir / "run_record.json").string());
  out << to_json().dump(2) << '\n';
}

nlohmann::json to_json(const HypothesisReport& r) {
  return {{"gamma_s", r.gamma_s},
          {"gamma_f", r.gamma_f},
          {"gamma", r.gamma},
          {"rho_eps", finite_or_null(r.rho_eps)},
          {"rho_bar_eps", finite_or_null(r.rho_bar_eps)},
          {"lip_h_bound", finite_or_null(r.lip_h_bound)},
          {"spectral_gap_ok", r.spectral_gap_ok},
          {"lipschitz_gap_ok", r.lipschitz_gap_ok},
          {"contraction_ok", r.contraction_ok},
          {"certified", r.certified},
          {"notes", r.notes}};
}

nlohmann::json to_json(const DecayFit& f) {
  return {{"rate", f.rate},
          {"intercept", f.intercept},
          {"fit_window", {f.t_a, f.t_b}},
          {"r_squared", f.r_squared},
          {"degenerate", f.degenerate},
          {"bound_ok", f.bound_ok},
          {"worst_bound_ratio", finite_or_null(f.worst_bound_ratio)}};
}

nlohmann::json to_json(const ConvergenceTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"epsilon", r.epsilon},
                    {"distance", finite_or_null(r.distance)},
                    {"realizations", r.realizations},
                    {"excluded", r.excluded}});
  }
  return {{"quantity", t.quantity},
          {"rows", rows},
          {"slope", finite_or_null(t.slope)},
          {"slope_ci", {finite_or_null(t.slope_lo), finite_or_null(t.slope_hi)}},
          {"valid", t.valid}};
}

nlohmann::json graph_metadata(const ManifoldGraph& g) {
  return {{"kind", to_string(g.kind)},
          {"epsilon", g.epsilon},
          {"seed", g.source.seed},
          {"origin_cell", g.source.origin_cell},
          {"tol", g.tol},
          {"T", g.horizon},
          {"iterations", g.iterations},
          {"points", g.x0.size()},
          {"empirical_lipschitz", g.empirical_lipschitz},
          {"lip_bound", finite_or_null(g.lip_bound)}};
}

}  // namespace rsm
