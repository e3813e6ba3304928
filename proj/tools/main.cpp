#include <CLI11.hpp>
#include <iostream>

#include "cli.hpp"

namespace {

void attach_overrides(CLI::App* cmd, std::string& config_path, kmx::cli::RunConfig& cfg, bool& tol_set,
                      bool& seed_set, bool& samples_set, bool& order_set, bool& out_set) {
  cmd->add_option("--config", config_path, "flat key=value config file");
  cmd->add_option_function<double>("--tol", [&](double v) { cfg.tolerance = v; tol_set = true; }, "tolerance");
  cmd->add_option_function<unsigned>("--seed", [&](unsigned v) { cfg.seed = v; seed_set = true; }, "RNG seed");
  cmd->add_option_function<int>("--samples", [&](int v) { cfg.spectral_samples = v; samples_set = true; },
                                "spectral samples");
  cmd->add_option_function<int>("--order", [&](int v) { cfg.order = v; order_set = true; }, "series order");
  cmd->add_option_function<std::string>("--out", [&](std::string v) { cfg.output_dir = std::move(v); out_set = true; },
                                        "output directory");
}

}  // namespace

int kmx::cli::run(int argc, char** argv) {
  CLI::App app{"verification and classification toolkit for rational reflection K-matrices"};
  app.require_subcommand(1);

  struct Cmd {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::string address;
    kmx::cli::RunConfig overrides;
    bool tol_set = false, seed_set = false, samples_set = false, order_set = false, out_set = false;
  };

  Cmd verify, classify, solve, crossing;
  std::string report_path;

  verify.sub = app.add_subcommand("verify", "run the residual suite for a K-family or R-matrix");
  verify.sub->add_option("address", verify.address, "family address (diag:..., twist-const:..., nilpotent:..., custom:...) or R address");
  attach_overrides(verify.sub, verify.config_path, verify.overrides, verify.tol_set, verify.seed_set,
                   verify.samples_set, verify.order_set, verify.out_set);

  classify.sub = app.add_subcommand("classify", "classify a K-family");
  classify.sub->add_option("address", classify.address, "family address");
  attach_overrides(classify.sub, classify.config_path, classify.overrides, classify.tol_set, classify.seed_set,
                   classify.samples_set, classify.order_set, classify.out_set);

  solve.sub = app.add_subcommand("solve", "order-by-order perturbative solve from a family's kappa");
  solve.sub->add_option("address", solve.address, "family address");
  attach_overrides(solve.sub, solve.config_path, solve.overrides, solve.tol_set, solve.seed_set, solve.samples_set,
                   solve.order_set, solve.out_set);

  crossing.sub = app.add_subcommand("crossing", "print the crossing parameter for sl(n)");
  crossing.sub->add_option("algebra", crossing.address, "algebra, e.g. sl(3)");
  attach_overrides(crossing.sub, crossing.config_path, crossing.overrides, crossing.tol_set, crossing.seed_set,
                   crossing.samples_set, crossing.order_set, crossing.out_set);

  CLI::App* report_sub = app.add_subcommand("report", "re-render a stored JSON report");
  report_sub->add_option("json", report_path, "path to classify_report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto build_cfg = [](Cmd& c, bool address_is_family) -> kmx::cli::RunConfig {
    kmx::cli::RunConfig cfg;
    if (!c.config_path.empty()) cfg = kmx::cli::load_config(c.config_path);
    if (c.tol_set) cfg.tolerance = c.overrides.tolerance;
    if (c.seed_set) cfg.seed = c.overrides.seed;
    if (c.samples_set) cfg.spectral_samples = c.overrides.spectral_samples;
    if (c.order_set) cfg.order = c.overrides.order;
    if (c.out_set) cfg.output_dir = c.overrides.output_dir;
    if (!c.address.empty()) {
      if (address_is_family) {
        if (c.address.rfind("yang", 0) == 0)
          cfg.r_matrix = c.address, cfg.k_family.clear();
        else
          cfg.k_family = c.address;
      } else {
        cfg.algebra = c.address;
      }
    }
    return cfg;
  };

  try {
    if (verify.sub->parsed()) return kmx::cli::cmd_verify(build_cfg(verify, true));
    if (classify.sub->parsed()) return kmx::cli::cmd_classify(build_cfg(classify, true));
    if (solve.sub->parsed()) return kmx::cli::cmd_solve(build_cfg(solve, true));
    if (crossing.sub->parsed()) return kmx::cli::cmd_crossing(build_cfg(crossing, false));
    if (report_sub->parsed()) return kmx::cli::cmd_report(report_path);
  } catch (const kmx::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}

int main(int argc, char** argv) { return kmx::cli::run(argc, argv); }
