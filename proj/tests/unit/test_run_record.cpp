#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "rsm/errors.hpp"
#include "rsm/run_record.hpp"

using namespace rsm;

TEST_CASE("SHA-256 known answers", "[run_record]") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run record manifest and JSON", "[run_record]") {
  const auto dir = std::filesystem::temp_directory_path() / "rsm_record_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "data.csv") << "abc";
  RunRecord rec;
  rec.command = "manifold";
  rec.config = {{"seed", 3}};
  rec.started_at = utc_timestamp();
  rec.add_output(dir, "data.csv");
  REQUIRE(rec.outputs.size() == 1);
  CHECK(rec.outputs[0].bytes == 3);
  CHECK(rec.outputs[0].sha256 == sha256_hex("abc"));
  CHECK(sha256_file(dir / "data.csv") == sha256_hex("abc"));
  HypothesisReport h;
  h.rho_eps = std::numeric_limits<double>::quiet_NaN();
  rec.hypotheses = h;
  rec.write(dir);
  std::ifstream in(dir / "run_record.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["command"] == "manifold");
  CHECK(j["config"]["seed"] == 3);
  CHECK(j["outputs"][0]["file"] == "data.csv");
  CHECK(j["hypotheses"]["rho_eps"].is_null());
  CHECK(j["version"] == source_version());
  CHECK(j["started_at"].get<std::string>().size() == 20);  // YYYY-MM-DDTHH:MM:SSZ
  CHECK_THROWS_AS(sha256_file(dir / "missing.csv"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("JSON views of analysis results", "[run_record]") {
  ConvergenceTable t;
  t.quantity = "distance_h0";
  t.rows.push_back({0.1, 0.02, 50, 0});
  t.slope = 1.01;
  t.slope_lo = 0.9;
  t.slope_hi = 1.1;
  const auto j = to_json(t);
  CHECK(j["rows"][0]["realizations"] == 50);
  CHECK(j["slope_ci"][1] == 1.1);
  DecayFit f;
  f.rate = -30.0;
  CHECK(to_json(f)["rate"] == -30.0);
  ManifoldGraph g;
  g.kind = GraphKind::h0;
  g.lip_bound = std::numeric_limits<double>::quiet_NaN();
  const auto m = graph_metadata(g);
  CHECK(m["kind"] == "h0");
  CHECK(m["lip_bound"].is_null());
}
