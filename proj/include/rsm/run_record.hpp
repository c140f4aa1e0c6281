#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rsm/analysis.hpp"
#include "rsm/lyapunov_perron.hpp"
#include "rsm/system_model.hpp"

namespace rsm {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& file);

// git describe of the source tree at configure time.
std::string source_version();

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunRecord {
  std::string command;
  nlohmann::json config;
  std::string version = source_version();
  std::string started_at;
  double elapsed_seconds = 0.0;
  std::vector<OutputFile> outputs;
  std::optional<HypothesisReport> hypotheses;
  std::vector<std::string> warnings;
  nlohmann::json results = nlohmann::json::object();

  // Hashes dir / name and appends it to the manifest.
  void add_output(const std::filesystem::path& dir, const std::string& name);
  nlohmann::json to_json() const;
  // Writes dir / run_record.json.
  void write(const std::filesystem::path& dir) const;
};

std::string utc_timestamp();

nlohmann::json to_json(const HypothesisReport& r);
nlohmann::json to_json(const DecayFit& f);
nlohmann::json to_json(const ConvergenceTable& t);
// Sidecar metadata for a graph CSV.
nlohmann::json graph_metadata(const ManifoldGraph& g);

}  // namespace rsm
