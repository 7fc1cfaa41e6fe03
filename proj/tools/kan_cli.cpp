#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kan/kernels.hpp"
#include "kan/runner.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text, std::vector<std::string>& errors) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      seeds.push_back(std::stoull(cell));
    } catch (const std::exception&) {
      errors.push_back("seeds: cannot parse '" + cell + "'");
    }
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive-grid KAN benchmark harness"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run an experiment and write artifacts");
  std::string experiment, strategy, seeds_text, config_path, out_dir;
  double scale = -1.0;
  long long threads = -1;
  bool dry_run = false;
  run->add_option("--experiment", experiment, "gaussian|synthetic|feynman|helmholtz");
  run->add_option("--strategy", strategy, "input|curvature|both");
  run->add_option("--seeds", seeds_text, "comma-separated seed list, e.g. 0,1,2");
  run->add_option("--config", config_path, "JSON config file (flags override it)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--scale", scale, "fraction of iterations/points, (0,1]");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");
  run->add_flag("--dry-run", dry_run, "print the resolved config and exit");

  // report
  auto* report = app.add_subcommand("report", "render the comparison table for a results dir");
  std::string report_dir;
  report->add_option("dir", report_dir, "results directory")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "re-render SVG figures from stored figure data");
  std::string plot_dir;
  plot->add_option("dir", plot_dir, "results directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (report->parsed()) return kan::report_command(report_dir, std::cout);
  if (plot->parsed()) return kan::plot_command(plot_dir, std::cout);

  kan::RunConfig cfg;
  std::vector<std::string> file_errors;
  if (!config_path.empty()) kan::apply_config_file(cfg, config_path, file_errors);
  if (!experiment.empty()) cfg.experiment = experiment;
  if (!strategy.empty()) cfg.strategy = strategy;
  if (!seeds_text.empty()) cfg.seeds = parse_seeds(seeds_text, file_errors);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (scale > 0.0) cfg.scale = scale;
  if (threads >= 0) cfg.threads = static_cast<std::size_t>(threads);
  cfg.dry_run = dry_run;

  if (!file_errors.empty()) {
    std::cout << "configuration invalid:\n";
    for (const std::string& e : file_errors) std::cout << "  - " << e << '\n';
    return 1;
  }
  std::cout << "kernel lane: " << kan::kernels::lane_name(kan::kernels::active_lane()) << '\n';
  return kan::run_experiment(cfg, std::cout);
}
