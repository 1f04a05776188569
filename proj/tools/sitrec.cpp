// sitrec: label propagation with novel-class discovery from the command line.
//
//   sitrec run --input items.csv --output out/ --method capped --theta 1 --p-exp 1
//   sitrec generate --output items.csv --with-meta
//   sitrec bench eval|grid|robustness --output bench/
#include "sitrec/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace sitrec;

struct SolverFlags {
  std::string method = "capped";
  std::string graph = "can";
  std::vector<double> sigma;
};

void add_solver_flags(CLI::App* app, SolverConfig& cfg, SolverFlags& flags, double& u_labeled,
                      double& u_unlabeled) {
  app->add_option("--method", flags.method, "gss | l1 | capped")->capture_default_str();
  app->add_option("--graph", flags.graph, "can | gaussian")->capture_default_str();
  app->add_option("-k,--neighbors", cfg.k, "neighbors per item")->capture_default_str();
  app->add_option("--p-exp", cfg.p_exp, "capped exponent in (0, 2]")->capture_default_str();
  app->add_option("--theta", cfg.theta, "capped threshold")->capture_default_str();
  app->add_option("--max-iter", cfg.max_iter, "reweighting iterations")->capture_default_str();
  app->add_option("--tol", cfg.tol, "relative objective change tolerance")->capture_default_str();
  app->add_option("--eps", cfg.eps, "reweighting floor")->capture_default_str();
  app->add_option("--sigma", flags.sigma, "Gaussian bandwidth per feature (default: median)");
  app->add_option("--u-labeled", u_labeled, "fitting weight of labeled items")->capture_default_str();
  app->add_option("--u-unlabeled", u_unlabeled, "fitting weight of unlabeled items")
      ->capture_default_str();
}

void apply_solver_flags(const SolverFlags& flags, SolverConfig& cfg, GraphKind& graph) {
  cfg.method = parse_method(flags.method);
  graph = parse_graph_kind(flags.graph);
  if (!flags.sigma.empty()) cfg.sigma = flags.sigma;
}

void add_spec_flags(CLI::App* app, eval::SyntheticSpec& spec) {
  app->add_option("--classes", spec.n_known_classes, "known classes")->capture_default_str();
  app->add_option("--per-class", spec.points_per_class, "points per known class")->capture_default_str();
  app->add_option("--novel", spec.novel_points, "points in the novel blob")->capture_default_str();
  app->add_option("--noise", spec.noise_points, "uniform noise points")->capture_default_str();
  app->add_option("--dim", spec.dim, "feature dimension")->capture_default_str();
  app->add_option("--separation", spec.separation, "distance between blob centres")->capture_default_str();
  app->add_option("--spread", spec.spread, "blob standard deviation")->capture_default_str();
  app->add_option("--outliers", spec.outlier_fraction, "fraction of items moved to the far field")
      ->capture_default_str();
  app->add_option("--label-fraction", spec.label_fraction, "labeled share per known class")
      ->capture_default_str();
  app->add_option("--seed", spec.seed, "random seed")->capture_default_str();
}

int report(const std::exception& e) {
  std::cerr << "sitrec: " << e.what() << '\n';
  return pipeline::exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph label propagation with novel-class discovery and space-time summaries"};
  app.require_subcommand(1);

  // run
  pipeline::PipelineConfig run_cfg;
  SolverFlags run_flags;
  std::string run_input, run_output = "out", config_file;
  auto* run = app.add_subcommand("run", "ingest a CSV, propagate labels, write artifacts");
  run->add_option("-i,--input", run_input, "input CSV")->required(false);
  run->add_option("-o,--output", run_output, "output directory")->capture_default_str();
  run->add_option("-c,--config", config_file, "JSON config file; its values override flags");
  add_solver_flags(run, run_cfg.solver, run_flags, run_cfg.u_labeled, run_cfg.u_unlabeled);
  run->add_option("--id-column", run_cfg.id_column)->capture_default_str();
  run->add_option("--label-column", run_cfg.label_column)->capture_default_str();
  run->add_option("--lat-column", run_cfg.lat_column)->capture_default_str();
  run->add_option("--lon-column", run_cfg.lon_column)->capture_default_str();
  run->add_option("--time-column", run_cfg.time_column)->capture_default_str();
  run->add_option("--lat-res", run_cfg.resolution.lat_deg, "degrees per latitude bin")
      ->capture_default_str();
  run->add_option("--lon-res", run_cfg.resolution.lon_deg, "degrees per longitude bin")
      ->capture_default_str();
  run->add_option("--time-res", run_cfg.resolution.time_s, "seconds per time bin")
      ->capture_default_str();
  run->add_option("--seed", run_cfg.seed)->capture_default_str();

  // generate
  eval::SyntheticSpec gen_spec;
  std::string gen_output = "synthetic.csv";
  bool gen_meta = false;
  auto* gen = app.add_subcommand("generate", "write a synthetic blob dataset as CSV");
  add_spec_flags(gen, gen_spec);
  gen->add_option("-o,--output", gen_output, "output CSV")->capture_default_str();
  gen->add_flag("--with-meta", gen_meta, "attach pseudo-random lat/lon/timestamp columns");

  // bench
  pipeline::BenchOptions bench_opts;
  SolverFlags bench_flags;
  std::string bench_output = "bench";
  auto* bench = app.add_subcommand("bench", "synthetic accuracy benchmarks");
  bench->require_subcommand(1);
  add_spec_flags(bench, bench_opts.spec);
  add_solver_flags(bench, bench_opts.solver, bench_flags, bench_opts.u_labeled,
                   bench_opts.u_unlabeled);
  bench->add_option("-o,--output", bench_output, "output directory")->capture_default_str();
  bench->add_option("--threads", bench_opts.threads, "worker threads (default: SITREC_THREADS)");

  auto* bench_eval = bench->add_subcommand("eval", "accuracy and confusion per method");
  eval::GridSpec grids;
  std::vector<std::string> grid_methods{"gss", "l1", "capped"};
  auto* bench_grid = bench->add_subcommand("grid", "cross-validated parameter grid");
  bench_grid->add_option("--methods", grid_methods)->capture_default_str();
  bench_grid->add_option("--u-grid", grids.u_labeled)->capture_default_str();
  bench_grid->add_option("--theta-grid", grids.theta)->capture_default_str();
  bench_grid->add_option("--p-grid", grids.p_exp)->capture_default_str();
  bench_grid->add_option("--folds", grids.folds)->capture_default_str();
  bench_grid->add_option("--cv-seed", grids.seed)->capture_default_str();
  int seeds = 20;
  auto* bench_robust = bench->add_subcommand("robustness", "paired mean accuracy over seeds");
  bench_robust->add_option("--seeds", seeds)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pipeline::kConfigError;
  }

  try {
    if (*run) {
      run_cfg.input = run_input;
      run_cfg.output_dir = run_output;
      try {
        apply_solver_flags(run_flags, run_cfg.solver, run_cfg.graph);
        if (!config_file.empty()) run_cfg = pipeline::apply_config_file(config_file, run_cfg);
      } catch (const std::exception& e) {
        throw pipeline::StageError("config", e);
      }
      const auto outcome = pipeline::run_pipeline(run_cfg);
      std::cout << "wrote " << outcome.data.x.size() << " assignments to "
                << run_cfg.output_dir.string() << " (" << outcome.result.iterations
                << " iterations, " << (outcome.result.converged ? "converged" : "not converged")
                << ")\n";
      return pipeline::kOk;
    }
    if (*gen) {
      const auto data = eval::generate(gen_spec);
      pipeline::write_synthetic(data, gen_output, gen_meta, gen_spec.seed);
      std::cout << "wrote " << data.x.size() << " items to " << gen_output << '\n';
      return pipeline::kOk;
    }
    if (*bench) {
      apply_solver_flags(bench_flags, bench_opts.solver, bench_opts.graph);
      bench_opts.output_dir = bench_output;
      if (*bench_eval) {
        for (const auto& r : pipeline::bench_eval(bench_opts)) {
          std::cout << to_string(r.params.method) << ": known " << r.acc_known << "%, unknown "
                    << r.acc_unknown << "%\n";
        }
      } else if (*bench_grid) {
        grids.methods.clear();
        for (const auto& m : grid_methods) grids.methods.push_back(parse_method(m));
        const auto result = pipeline::bench_grid(bench_opts, grids);
        for (const auto& b : result.best) {
          std::cout << to_string(b.config.method) << ": u=" << b.u_labeled;
          if (b.config.method == Method::Capped) {
            std::cout << " theta=" << b.config.theta << " p=" << b.config.p_exp;
          }
          std::cout << " cv-accuracy " << b.mean_acc << "%\n";
        }
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      } else if (*bench_robust) {
        const auto s = pipeline::bench_robustness(bench_opts, seeds);
        std::cout << "mean known accuracy: gss " << s.mean_known[0] << "%, l1 " << s.mean_known[1]
                  << "%, capped " << s.mean_known[2] << "%\n";
      }
      return pipeline::kOk;
    }
  } catch (const std::exception& e) {
    return report(e);
  }
  return pipeline::kOk;
}
