#include "kan/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "kan/adaptation.hpp"
#include "kan/svg.hpp"

namespace fs = std::filesystem;

namespace kan {

namespace {

constexpr const char* kInput = "input-based";
constexpr const char* kCurvature = "curvature-based";

std::vector<std::string> strategy_list(const std::string& strategy) {
  if (strategy == "input" || strategy == kInput) return {kInput};
  if (strategy == "curvature" || strategy == kCurvature) return {kCurvature};
  return {kInput, kCurvature};
}

AdaptationStrategy make_strategy(const std::string& name, double epsilon) {
  if (name == kCurvature) return AdaptationStrategy::curvature_based(epsilon);
  return AdaptationStrategy::input_based();
}

std::size_t scaled(std::size_t v, double scale, std::size_t floor_at) {
  const auto s = static_cast<std::size_t>(std::llround(static_cast<double>(v) * scale));
  return std::max(floor_at, s);
}

}  // namespace

std::string cell_id(const std::string& task, const std::string& strategy, std::uint64_t seed) {
  std::string tag = strategy == kCurvature ? "curv" : "input";
  return task + "_" + tag + "_s" + std::to_string(seed);
}

void apply_config_file(RunConfig& cfg, const std::string& path,
                       std::vector<std::string>& errors) {
  std::ifstream in(path);
  if (!in.good()) {
    errors.push_back("config: cannot open " + path);
    return;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const std::exception& err) {
    errors.push_back(std::string("config: parse error: ") + err.what());
    return;
  }
  try {
    if (doc.contains("schema_version") && doc["schema_version"].get<int>() != 1) {
      errors.push_back("config: unsupported schema_version");
      return;
    }
    if (doc.contains("experiment")) cfg.experiment = doc["experiment"].get<std::string>();
    if (doc.contains("strategy")) cfg.strategy = doc["strategy"].get<std::string>();
    if (doc.contains("seeds")) cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    if (doc.contains("scale")) cfg.scale = doc["scale"].get<double>();
    if (doc.contains("out")) cfg.out_dir = doc["out"].get<std::string>();
    if (doc.contains("threads")) cfg.threads = doc["threads"].get<std::size_t>();
    if (doc.contains("tasks")) cfg.tasks = doc["tasks"].get<std::vector<std::string>>();
    if (doc.contains("overrides")) {
      const auto& ov = doc["overrides"];
      if (ov.contains("iterations")) cfg.iterations = ov["iterations"].get<std::size_t>();
      if (ov.contains("learning_rate")) cfg.learning_rate = ov["learning_rate"].get<double>();
      if (ov.contains("epsilon")) cfg.epsilon = ov["epsilon"].get<double>();
      if (ov.contains("boundary_weight"))
        cfg.boundary_weight = ov["boundary_weight"].get<double>();
      if (ov.contains("grid_schedule")) {
        std::vector<GridEvent> sched;
        for (const auto& pair : ov["grid_schedule"])
          sched.push_back({pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>()});
        cfg.grid_schedule = std::move(sched);
      }
    }
  } catch (const std::exception& err) {
    errors.push_back(std::string("config: bad field: ") + err.what());
  }
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> errors;
  static const char* kExperiments[] = {"gaussian", "synthetic", "feynman", "helmholtz"};
  if (std::find_if(std::begin(kExperiments), std::end(kExperiments),
                   [&](const char* e) { return cfg.experiment == e; }) ==
      std::end(kExperiments))
    errors.push_back("experiment must be one of gaussian|synthetic|feynman|helmholtz (got '" +
                     cfg.experiment + "')");
  static const char* kStrategies[] = {"input", "curvature", "both", kInput, kCurvature};
  if (std::find_if(std::begin(kStrategies), std::end(kStrategies),
                   [&](const char* s) { return cfg.strategy == s; }) == std::end(kStrategies))
    errors.push_back("strategy must be input|curvature|both (got '" + cfg.strategy + "')");
  if (cfg.seeds.empty()) errors.push_back("seeds must be nonempty");
  if (!(cfg.scale > 0.0 && cfg.scale <= 1.0)) errors.push_back("scale must be in (0, 1]");
  if (cfg.out_dir.empty()) errors.push_back("output directory must be set");
  if (cfg.iterations && *cfg.iterations == 0) errors.push_back("iterations override must be > 0");
  if (cfg.learning_rate && !(*cfg.learning_rate > 0.0))
    errors.push_back("learning_rate override must be > 0");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) errors.push_back("epsilon override must be > 0");
  if (cfg.boundary_weight && !(*cfg.boundary_weight >= 0.0))
    errors.push_back("boundary_weight override must be >= 0");
  if (cfg.tasks) {
    for (const std::string& t : *cfg.tasks)
      if (t.empty()) errors.push_back("task filter entries must be nonempty");
  }
  return errors;
}

std::string resolved_config_json(const RunConfig& cfg) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["experiment"] = cfg.experiment;
  doc["strategy"] = cfg.strategy;
  doc["seeds"] = cfg.seeds;
  doc["scale"] = cfg.scale;
  doc["out"] = cfg.out_dir;
  doc["threads"] = cfg.threads;
  nlohmann::json ov = nlohmann::json::object();
  if (cfg.iterations) ov["iterations"] = *cfg.iterations;
  if (cfg.learning_rate) ov["learning_rate"] = *cfg.learning_rate;
  if (cfg.epsilon) ov["epsilon"] = *cfg.epsilon;
  if (cfg.boundary_weight) ov["boundary_weight"] = *cfg.boundary_weight;
  if (cfg.grid_schedule) {
    nlohmann::json sched = nlohmann::json::array();
    for (const GridEvent& ev : *cfg.grid_schedule)
      sched.push_back({ev.iteration, ev.g_new});
    ov["grid_schedule"] = std::move(sched);
  }
  doc["overrides"] = std::move(ov);
  if (cfg.tasks) doc["tasks"] = *cfg.tasks;
  return doc.dump(2);
}

ResolvedExperiment resolve_experiment(const RunConfig& cfg) {
  ResolvedExperiment exp;
  exp.name = cfg.experiment;
  TrainConfig& tc = exp.train_proto;

  if (cfg.experiment == "gaussian") {
    exp.tasks = {gaussian_bump_task()};
    exp.hidden = {10};
    tc.iterations = 1001;
    tc.learning_rate = 1e-2;
    tc.grid_schedule = {{1000, 10}};
    tc.loss_kind = LossKind::Mse;
  } else if (cfg.experiment == "synthetic") {
    exp.tasks = synthetic_suite();
    exp.hidden = {10};
    tc.iterations = 2000;
    tc.learning_rate = 1e-2;
    tc.grid_schedule = {{500, 6}, {1000, 9}, {1500, 12}};
    tc.loss_kind = LossKind::Mse;
  } else if (cfg.experiment == "feynman") {
    exp.tasks = feynman_subset();
    exp.hidden = {10};
    tc.iterations = 2000;
    tc.learning_rate = 1e-3;
    tc.grid_schedule = {{500, 6}, {1000, 9}, {1500, 12}};
    tc.loss_kind = LossKind::Mse;
  } else if (cfg.experiment == "helmholtz") {
    exp.helmholtz = {{1, 1}, {1, 2}, {2, 2}, {2, 4}};
    exp.hidden = {6, 6};
    tc.iterations = 5000;
    tc.learning_rate = 1e-3;
    tc.grid_schedule = {{1000, 6}, {2000, 9}, {3000, 12}};
    tc.loss_kind = LossKind::Pinn;
    tc.boundary_weight = 1.0;
  } else {
    fail("resolve_experiment: unknown experiment " + cfg.experiment);
  }

  if (cfg.iterations) tc.iterations = *cfg.iterations;
  if (cfg.learning_rate) tc.learning_rate = *cfg.learning_rate;
  if (cfg.boundary_weight) tc.boundary_weight = *cfg.boundary_weight;
  if (cfg.grid_schedule) tc.grid_schedule = *cfg.grid_schedule;
  if (cfg.epsilon) tc.strategy.epsilon = *cfg.epsilon;

  // desk-scale reduction: iterations and schedule shrink by `scale`, sample
  // counts likewise (collocation grids per axis by sqrt so the point count
  // tracks the factor)
  if (cfg.scale != 1.0) {
    tc.iterations = scaled(tc.iterations, cfg.scale, 1);
    std::vector<GridEvent> sched;
    for (const GridEvent& ev : tc.grid_schedule) {
      const std::size_t it = scaled(ev.iteration, cfg.scale, 0);
      if (it >= tc.iterations) continue;
      if (!sched.empty() && sched.back().iteration == it)
        sched.back().g_new = ev.g_new;
      else
        sched.push_back({it, ev.g_new});
    }
    tc.grid_schedule = std::move(sched);
    for (RegressionTask& t : exp.tasks) t.n_train = scaled(t.n_train, cfg.scale, 16);
    const double axis_scale = std::sqrt(cfg.scale);
    exp.helmholtz_per_axis = scaled(exp.helmholtz_per_axis, axis_scale, 4);
    exp.helmholtz_per_edge = scaled(exp.helmholtz_per_edge, axis_scale, 4);
  }

  if (cfg.tasks) {
    if (!exp.tasks.empty()) {
      std::vector<RegressionTask> keep;
      for (RegressionTask& t : exp.tasks)
        if (std::find(cfg.tasks->begin(), cfg.tasks->end(), t.name) != cfg.tasks->end())
          keep.push_back(std::move(t));
      exp.tasks = std::move(keep);
    } else {
      std::vector<std::pair<int, int>> keep;
      for (auto& hc : exp.helmholtz) {
        const std::string name =
            "helmholtz_" + std::to_string(hc.first) + "_" + std::to_string(hc.second);
        if (std::find(cfg.tasks->begin(), cfg.tasks->end(), name) != cfg.tasks->end())
          keep.push_back(hc);
      }
      exp.helmholtz = std::move(keep);
    }
  }
  return exp;
}

CellOutcome run_regression_cell(const ResolvedExperiment& exp, const RegressionTask& task,
                                const std::string& strategy, std::uint64_t seed) {
  CellOutcome out;
  out.result.task = task.name;
  out.result.strategy = strategy;
  out.result.seed = seed;
  try {
    const Dataset train_set = sample_training(task, seed);
    std::vector<std::size_t> widths;
    widths.push_back(task.dim);
    widths.insert(widths.end(), exp.hidden.begin(), exp.hidden.end());
    widths.push_back(1);
    Network net =
        init_network(widths, exp.grid_initial, 3, mix_seed(fnv1a(task.name), seed));

    TrainConfig tc = exp.train_proto;
    tc.seed = seed;
    tc.strategy = make_strategy(strategy, tc.strategy.epsilon);
    const LossEvaluator ev = LossEvaluator::mse(train_set.x, train_set.y);

    TrainResult tr = train(std::move(net), ev, tc);
    out.trace = std::move(tr.trace);
    out.net = std::move(tr.net);
    out.result.wall_ms = tr.wall_ms;
    if (tr.diverged) {
      out.failed = true;
      out.error = "non-finite loss at iteration " + std::to_string(tr.diverged_at);
      return out;
    }

    const Dataset ref = test_grid(task);
    const Mat pred = network_eval(out.net, ref.x);
    out.result.rel_l2 = relative_l2({pred.row(0), pred.cols}, {ref.y.row(0), ref.y.cols});
  } catch (const std::exception& err) {
    out.failed = true;
    out.error = err.what();
  }
  return out;
}

CellOutcome run_helmholtz_cell(const ResolvedExperiment& exp, int a1, int a2,
                               const std::string& strategy, std::uint64_t seed) {
  CellOutcome out;
  out.result.task = "helmholtz_" + std::to_string(a1) + "_" + std::to_string(a2);
  out.result.strategy = strategy;
  out.result.seed = seed;
  try {
    const HelmholtzProblem hp =
        helmholtz_problem(a1, a2, exp.helmholtz_per_axis, exp.helmholtz_per_edge);
    const PinnProblem prob = hp.pinn();
    std::vector<std::size_t> widths;
    widths.push_back(2);
    widths.insert(widths.end(), exp.hidden.begin(), exp.hidden.end());
    widths.push_back(1);
    Network net =
        init_network(widths, exp.grid_initial, 3, mix_seed(fnv1a(out.result.task), seed));

    TrainConfig tc = exp.train_proto;
    tc.seed = seed;
    tc.strategy = make_strategy(strategy, tc.strategy.epsilon);
    const LossEvaluator ev =
        LossEvaluator::pinn(hp.collocation, hp.boundary, prob, tc.boundary_weight);

    TrainResult tr = train(std::move(net), ev, tc);
    out.trace = std::move(tr.trace);
    out.net = std::move(tr.net);
    out.result.wall_ms = tr.wall_ms;
    if (tr.diverged) {
      out.failed = true;
      out.error = "non-finite loss at iteration " + std::to_string(tr.diverged_at);
      return out;
    }

    // dense reference grid, 256 per axis
    const std::size_t per_axis = 256;
    Mat grid(2, per_axis * per_axis);
    std::vector<double> ref(per_axis * per_axis);
    std::size_t s = 0;
    for (std::size_t ix = 0; ix < per_axis; ++ix) {
      const double x =
          -1.0 + 2.0 * static_cast<double>(ix) / static_cast<double>(per_axis - 1);
      for (std::size_t iy = 0; iy < per_axis; ++iy, ++s) {
        const double y =
            -1.0 + 2.0 * static_cast<double>(iy) / static_cast<double>(per_axis - 1);
        grid.at(0, s) = x;
        grid.at(1, s) = y;
        ref[s] = hp.u_true(x, y);
      }
    }
    const Mat pred = network_eval(out.net, grid);
    out.result.rel_l2 = relative_l2({pred.row(0), pred.cols}, {ref.data(), ref.size()});
  } catch (const std::exception& err) {
    out.failed = true;
    out.error = err.what();
  }
  return out;
}

void run_parallel(std::vector<std::function<void()>>& jobs, std::size_t threads) {
  if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  if (threads <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        jobs[i]();
      }
    });
  for (auto& th : pool) th.join();
}

namespace {

struct FigAccumulator {
  FigureData fig;
  bool want = false;
};

void build_figure(const ResolvedExperiment& exp, const RegressionTask& task,
                  const std::vector<std::string>& strategies, std::uint64_t seed,
                  const std::map<std::string, const CellOutcome*>& by_strategy,
                  FigureData& fig) {
  fig.task = task.name;
  const std::size_t npts = 512;
  fig.grid_x.resize(npts);
  fig.y_true.resize(npts);
  std::vector<double> raw(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    const double r = task.lo[0] + (task.hi[0] - task.lo[0]) * static_cast<double>(i) /
                                      static_cast<double>(npts - 1);
    raw[i] = r;
    fig.grid_x[i] = to_unit(task, 0, r);
    fig.y_true[i] = task.f(&r);
  }
  const Dataset train_set = sample_training(task, seed);
  fig.data_x.assign(train_set.x.row(0), train_set.x.row(0) + train_set.x.cols);
  fig.data_y.assign(train_set.y.row(0), train_set.y.row(0) + train_set.y.cols);

  Mat grid(1, npts);
  for (std::size_t i = 0; i < npts; ++i) grid.at(0, i) = fig.grid_x[i];
  for (const std::string& strategy : strategies) {
    const CellOutcome* cell = by_strategy.at(strategy);
    const Mat pred = network_eval(cell->net, grid);
    fig.strategies.push_back(strategy);
    fig.y_pred.emplace_back(pred.row(0), pred.row(0) + pred.cols);
    fig.knots.push_back(cell->net.layers[0].knots[0].primary);
  }
  (void)exp;
}

nlohmann::json figure_to_json(const FigureData& fig) {
  nlohmann::json doc;
  doc["task"] = fig.task;
  doc["grid_x"] = fig.grid_x;
  doc["y_true"] = fig.y_true;
  doc["data_x"] = fig.data_x;
  doc["data_y"] = fig.data_y;
  doc["strategies"] = fig.strategies;
  doc["y_pred"] = fig.y_pred;
  doc["knots"] = fig.knots;
  return doc;
}

FigureData figure_from_json(const nlohmann::json& doc) {
  FigureData fig;
  fig.task = doc["task"].get<std::string>();
  fig.grid_x = doc["grid_x"].get<std::vector<double>>();
  fig.y_true = doc["y_true"].get<std::vector<double>>();
  fig.data_x = doc["data_x"].get<std::vector<double>>();
  fig.data_y = doc["data_y"].get<std::vector<double>>();
  fig.strategies = doc["strategies"].get<std::vector<std::string>>();
  fig.y_pred = doc["y_pred"].get<std::vector<std::vector<double>>>();
  fig.knots = doc["knots"].get<std::vector<std::vector<double>>>();
  return fig;
}

}  // namespace

int run_experiment(const RunConfig& cfg, std::ostream& log) {
  const std::vector<std::string> errors = validate_config(cfg);
  if (!errors.empty()) {
    log << "configuration invalid:\n";
    for (const std::string& e : errors) log << "  - " << e << '\n';
    return 1;
  }
  if (cfg.dry_run) {
    log << resolved_config_json(cfg) << '\n';
    return 0;
  }

  const ResolvedExperiment exp = resolve_experiment(cfg);
  const std::vector<std::string> strategies = strategy_list(cfg.strategy);

  fs::create_directories(cfg.out_dir);
  {
    std::ofstream rc(fs::path(cfg.out_dir) / "resolved_config.json");
    rc << resolved_config_json(cfg) << '\n';
  }

  std::vector<std::string> task_names;
  for (const RegressionTask& t : exp.tasks) task_names.push_back(t.name);
  for (const auto& hc : exp.helmholtz)
    task_names.push_back("helmholtz_" + std::to_string(hc.first) + "_" +
                         std::to_string(hc.second));
  if (task_names.empty()) {
    log << "configuration invalid:\n  - task filter matched nothing\n";
    return 1;
  }

  struct Slot {
    std::string task;
    std::string strategy;
    std::uint64_t seed;
    CellOutcome outcome;
  };
  std::vector<Slot> slots;
  for (std::size_t t = 0; t < task_names.size(); ++t)
    for (const std::string& strategy : strategies)
      for (std::uint64_t seed : cfg.seeds) slots.push_back({task_names[t], strategy, seed, {}});

  std::mutex log_mutex;
  std::vector<std::function<void()>> jobs;
  jobs.reserve(slots.size());
  for (Slot& slot : slots)
    jobs.push_back([&slot, &exp, &log, &log_mutex]() {
      const bool is_helm = slot.task.rfind("helmholtz_", 0) == 0;
      if (is_helm) {
        int a1 = 0, a2 = 0;
        std::sscanf(slot.task.c_str(), "helmholtz_%d_%d", &a1, &a2);
        slot.outcome = run_helmholtz_cell(exp, a1, a2, slot.strategy, slot.seed);
      } else {
        const RegressionTask* task = nullptr;
        for (const RegressionTask& t : exp.tasks)
          if (t.name == slot.task) task = &t;
        slot.outcome = run_regression_cell(exp, *task, slot.strategy, slot.seed);
      }
      std::lock_guard<std::mutex> lk(log_mutex);
      log << "cell " << cell_id(slot.task, slot.strategy, slot.seed)
          << (slot.outcome.failed ? std::string(" FAILED: ") + slot.outcome.error
                                  : " rel_l2=" + std::to_string(slot.outcome.result.rel_l2))
          << '\n';
    });
  run_parallel(jobs, cfg.threads);

  // per-cell artifacts
  nlohmann::json failures = nlohmann::json::array();
  std::vector<CellResult> cells;
  for (Slot& slot : slots) {
    const std::string id = cell_id(slot.task, slot.strategy, slot.seed);
    if (!slot.outcome.trace.empty())
      write_trace_csv((fs::path(cfg.out_dir) / ("trace_" + id + ".csv")).string(),
                      slot.outcome.trace);
    if (slot.outcome.failed) {
      failures.push_back({{"cell", id}, {"error", slot.outcome.error}});
      continue;
    }
    save_network(slot.outcome.net, (fs::path(cfg.out_dir) / ("ckpt_" + id + ".json")).string());
    cells.push_back(slot.outcome.result);
  }
  if (!failures.empty()) {
    std::ofstream fm(fs::path(cfg.out_dir) / "failures.json");
    fm << failures.dump(2) << '\n';
    log << failures.size() << " cell(s) failed; partial results written to " << cfg.out_dir
        << '\n';
    return 2;
  }

  const ExperimentReport report =
      aggregate(cfg.experiment, task_names, strategies, cfg.seeds, cells);
  {
    std::ofstream rj(fs::path(cfg.out_dir) / "report.json");
    rj << report_to_json(report) << '\n';
  }
  write_report_csv((fs::path(cfg.out_dir) / "report.csv").string(), report);

  // figures for 1D regression tasks (first seed of each strategy)
  for (const RegressionTask& task : exp.tasks) {
    if (task.dim != 1) continue;
    std::map<std::string, const CellOutcome*> by_strategy;
    for (const Slot& slot : slots)
      if (slot.task == task.name && slot.seed == cfg.seeds.front())
        by_strategy[slot.strategy] = &slot.outcome;
    if (by_strategy.size() != strategies.size()) continue;
    FigureData fig;
    build_figure(exp, task, strategies, cfg.seeds.front(), by_strategy, fig);
    {
      std::ofstream fj(fs::path(cfg.out_dir) / ("fig_data_" + task.name + ".json"));
      fj << figure_to_json(fig).dump() << '\n';
    }
    write_figure_svg((fs::path(cfg.out_dir) / ("fig_" + task.name + ".svg")).string(), fig);
  }

  render_report(report, log);
  return 0;
}

void render_report(const ExperimentReport& report, std::ostream& out) {
  out << "experiment: " << report.experiment << " (seeds:";
  for (std::uint64_t s : report.seeds) out << ' ' << s;
  out << ")\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-22s %-24s %-24s %10s\n", "task", "input-based",
                "curvature-based", "improv.");
  out << buf;
  auto fmt_cell = [](const TaskSummary& ts, const std::string& strategy) {
    auto it = ts.by_strategy.find(strategy);
    if (it == ts.by_strategy.end()) return std::string("-");
    char b[64];
    std::snprintf(b, sizeof(b), "%.3e +/- %.1e", it->second.median(), it->second.stddev());
    return std::string(b);
  };
  for (const TaskSummary& ts : report.tasks) {
    std::string imp = "-";
    if (report.comparative) {
      char b[32];
      std::snprintf(b, sizeof(b), "%+.2f%%", ts.improvement);
      imp = b;
    }
    std::snprintf(buf, sizeof(buf), "%-22s %-24s %-24s %10s\n", ts.task.c_str(),
                  fmt_cell(ts, "input-based").c_str(), fmt_cell(ts, "curvature-based").c_str(),
                  imp.c_str());
    out << buf;
  }
  if (report.comparative) {
    std::snprintf(buf, sizeof(buf), "average improvement: %+.2f%%   wilcoxon p: %.4g\n",
                  report.average_improvement, report.wilcoxon_p);
    out << buf;
  }
  for (const auto& [strategy, ms] : report.wall_ms_by_strategy) {
    std::snprintf(buf, sizeof(buf), "wall clock %s: %.1f s\n", strategy.c_str(), ms / 1000.0);
    out << buf;
  }
}

int report_command(const std::string& results_dir, std::ostream& out) {
  const fs::path path = fs::path(results_dir) / "report.json";
  std::ifstream in(path);
  if (!in.good()) {
    out << "no report.json under " << results_dir << '\n';
    return 1;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    render_report(report_from_json(ss.str()), out);
  } catch (const std::exception& err) {
    out << "unreadable report: " << err.what() << '\n';
    return 1;
  }
  return 0;
}

int plot_command(const std::string& results_dir, std::ostream& log) {
  bool any = false;
  for (const auto& entry : fs::directory_iterator(results_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("fig_data_", 0) != 0 || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    nlohmann::json doc = nlohmann::json::parse(in);
    const FigureData fig = figure_from_json(doc);
    const fs::path svg = entry.path().parent_path() / ("fig_" + fig.task + ".svg");
    write_figure_svg(svg.string(), fig);
    log << "wrote " << svg.string() << '\n';
    any = true;
  }
  if (!any) log << "no figure data under " << results_dir << '\n';
  return 0;
}

}  // namespace kan
