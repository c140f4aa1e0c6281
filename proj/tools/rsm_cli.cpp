#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rsm/commands.hpp"
#include "rsm/config.hpp"
#include "rsm/errors.hpp"
#include "rsm/examples.hpp"

namespace {

struct Common {
  std::string config;
  std::string example = "example1";
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<int> workers;
  std::optional<double> tol;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "JSON configuration file");
  sub->add_option("-e,--example", c.example, "built-in example when no config is given")
      ->check(CLI::IsMember(rsm::examples::names()));
  sub->add_option("-s,--seed", c.seed, "master seed (overrides the config)");
  sub->add_option("-o,--out", c.out, "output directory")->capture_default_str();
  sub->add_option("-w,--workers", c.workers, "OpenMP threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--tol", c.tol, "fixed-point tolerance (overrides the config)")
      ->check(CLI::PositiveNumber);
}

rsm::RunConfig resolve(const Common& c) {
  rsm::RunConfig cfg = c.config.empty() ? rsm::default_config(c.example) : rsm::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  if (c.tol) {
    if (!(*c.tol < 1.0)) throw rsm::ConfigError("--tol must lie in (0, 1)");
    cfg.tol = *c.tol;
  }
#ifdef _OPENMP
  if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
#endif
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random slow manifolds of slow-fast systems with stable Levy noise"};
  app.require_subcommand(1);
  Common common;
  auto* simulate = app.add_subcommand("simulate", "integrate full, transformed and reduced systems");
  auto* manifold = app.add_subcommand("manifold", "tabulate manifold graphs over the x0 grid");
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  auto* study = app.add_subcommand("study", "epsilon convergence study of h0 and h0 + eps h1");
  for (auto* sub : {simulate, manifold, verify, study}) add_common(sub, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rsm::kConfigError;
  }

  try {
    const rsm::RunConfig cfg = resolve(common);
    if (simulate->parsed()) return rsm::cmd_simulate(cfg, common.out, std::cout);
    if (manifold->parsed()) return rsm::cmd_manifold(cfg, common.out, std::cout);
    if (verify->parsed()) return rsm::cmd_verify(cfg, common.out, std::cout);
    return rsm::cmd_study(cfg, common.out, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rsm::exit_code_for(e);
  }
}
