#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tucb/run.hpp"

namespace {

void add_run_options(CLI::App* cmd, tucb::RunConfig& cfg) {
  cmd->add_option("--algo", cfg.algo, "tucb | ctucb | uniformmesh | ucb1")
      ->capture_default_str();
  cmd->add_option("--objective", cfg.objective,
                  "himmelblau | goldstein | himmelblau-ctx | goldstein-ctx | external")
      ->capture_default_str();
  cmd->add_option("--T", cfg.rounds, "number of rounds (also the horizon)")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "engine seed")->capture_default_str();
  cmd->add_option("--noise-seed", [&cfg](const std::vector<std::string>& vals) {
       cfg.noise_seed = std::stoull(vals.back());
       return true;
     },
     "noise stream seed (defaults to --seed)");
  cmd->add_option("--context-seed", [&cfg](const std::vector<std::string>& vals) {
       cfg.context_seed = std::stoull(vals.back());
       return true;
     },
     "context stream seed (defaults to --seed)");
  cmd->add_option("--noise", cfg.noise, "none | uniform:SIGMA | tgauss:SIGMA[:CLIP]")
      ->capture_default_str();
  cmd->add_option("--refinement", cfg.refinement,
                  "tree | mesh | zooming | fixed (default picked by --algo)");
  cmd->add_option("--exploration", cfg.exploration,
                  "paper | v | ctx | ucb1-horizon")
      ->capture_default_str();
  cmd->add_option("--v", cfg.v, "v for the v-schedule")->capture_default_str();
  cmd->add_option("--v1", cfg.v1, "v1 for the contextual schedule")->capture_default_str();
  cmd->add_option("--v2", cfg.v2, "v2 for the contextual schedule")->capture_default_str();
  cmd->add_option("--v3", cfg.v3, "v3 for the contextual schedule")->capture_default_str();
  cmd->add_option("--C", cfg.concentration, "concentration scale")->capture_default_str();
  cmd->add_option("--M", cfg.lipschitz_scale, "Lipschitz scale")->capture_default_str();
  cmd->add_option("--eta", cfg.eta, "minimum MAE reduction to split")
      ->capture_default_str();
  cmd->add_option("--max-leaves", cfg.max_leaves, "static leaf cap (0 = unlimited)")
      ->capture_default_str();
  cmd->add_option("--max-depth", cfg.max_depth, "tree depth cap (0 = unlimited)")
      ->capture_default_str();
  cmd->add_option("--min-leaf-diameter", cfg.min_leaf_diameter,
                  "smallest admissible child diameter")
      ->capture_default_str();
  cmd->add_option("--feature-policy", cfg.feature_policy, "all-features | round-robin")
      ->capture_default_str();
  cmd->add_option("--leaf-cap-exponent", cfg.leaf_cap_exponent,
                  "per-round cap floor(t^gamma); <= 0 disables")
      ->capture_default_str();
  cmd->add_option("--metric", cfg.metric, "linf | l2")->capture_default_str();
  cmd->add_option("--arms", cfg.arms, "discrete arm count (ucb1)")->capture_default_str();
  cmd->add_option("--grid-n", cfg.grid_n, "rescaling oracle grid resolution")
      ->capture_default_str();
  cmd->add_option("--lo", cfg.domain_lo, "external-objective domain lower bounds")
      ->delimiter(',');
  cmd->add_option("--hi", cfg.domain_hi, "external-objective domain upper bounds")
      ->delimiter(',');
  cmd->add_option("--out", cfg.out_prefix, "output path prefix")->capture_default_str();
  cmd->set_config("--config", "", "flat key=value config file (CLI flags win)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-partition Lipschitz bandit toolkit"};
  app.require_subcommand(1);

  tucb::RunConfig run_cfg;
  CLI::App* run_cmd = app.add_subcommand("run", "run a bandit session end to end");
  add_run_options(run_cmd, run_cfg);

  tucb::RunConfig serve_cfg;
  serve_cfg.objective = "external";
  CLI::App* serve_cmd =
      app.add_subcommand("serve", "drive an external objective over ask/tell on stdio");
  add_run_options(serve_cmd, serve_cfg);

  tucb::RunConfig sweep_cfg;
  std::string seeds_text = "0..9";
  int jobs = 1;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "independent seeded runs");
  add_run_options(sweep_cmd, sweep_cfg);
  sweep_cmd->add_option("--seeds", seeds_text, "seed list, e.g. 0..9 or 1,4,7")
      ->capture_default_str();
  sweep_cmd->add_option("--jobs", jobs, "parallel workers")->capture_default_str();

  std::string trace_path;
  std::vector<double> audit_alphas{0.5};
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "check the point-scattering inequalities on a trace");
  audit_cmd->add_option("--trace", trace_path, "decision trace (JSONL)")->required();
  audit_cmd->add_option("--alpha", audit_alphas, "alpha values in (0,1)")
      ->delimiter(',')
      ->capture_default_str();

  std::string partition_path, data_path, curves_path = "curves.csv";
  std::vector<double> demo_alphas{10, 50, 100, 500, 1000};
  double demo_noise = 0.01;
  int demo_grid = 512;
  CLI::App* demo_cmd =
      app.add_subcommand("gp-demo", "hard/soft box-kernel GP smoothing curves");
  demo_cmd->add_option("--partition", partition_path, "partition JSON")->required();
  demo_cmd->add_option("--data", data_path, "x,y training data CSV")->required();
  demo_cmd->add_option("--alpha", demo_alphas, "soft-kernel sharpness values")
      ->delimiter(',')
      ->capture_default_str();
  demo_cmd->add_option("--noise", demo_noise, "observation noise variance")
      ->capture_default_str();
  demo_cmd->add_option("--grid", demo_grid, "query grid resolution")
      ->capture_default_str();
  demo_cmd->add_option("--out", curves_path, "output CSV")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return tucb::run_session(run_cfg, std::cerr).exit_code;
    }
    if (serve_cmd->parsed()) {
      return tucb::serve_session(serve_cfg, std::cin, std::cout, std::cerr).exit_code;
    }
    if (sweep_cmd->parsed()) {
      return tucb::sweep_sessions(sweep_cfg, tucb::parse_seed_list(seeds_text), jobs,
                                  std::cerr);
    }
    if (audit_cmd->parsed()) {
      return tucb::audit_trace_file(trace_path, audit_alphas, std::cout);
    }
    if (demo_cmd->parsed()) {
      return tucb::gp_demo_file(partition_path, data_path, demo_alphas, demo_noise,
                                demo_grid, curves_path, std::cerr);
    }
  } catch (const tucb::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
