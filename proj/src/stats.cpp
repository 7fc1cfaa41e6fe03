#include "kan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "kan/common.hpp"

namespace kan {

double relative_l2(std::span<const double> pred, std::span<const double> ref) {
  require(pred.size() == ref.size(), "relative_l2: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (!(den > 0.0)) fail("relative_l2: zero reference norm");
  return std::sqrt(num / den);
}

double improvement_pct(double err_input, double err_curv) {
  require(err_input > 0.0, "improvement_pct: input error must be positive");
  return (err_input - err_curv) / err_input * 100.0;
}

namespace {

// Ranks of |d| (ascending), ties averaged; returned aligned with `mags`.
std::vector<double> average_ranks(const std::vector<double>& mags) {
  const std::size_t n = mags.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return mags[a] < mags[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && mags[order[j + 1]] == mags[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double wilcoxon_one_tailed(std::span<const double> deltas, ZeroPolicy policy, bool* all_zero) {
  require(!deltas.empty(), "wilcoxon: empty input");
  if (all_zero) *all_zero = false;

  std::vector<double> mags;
  std::vector<bool> positive;
  if (policy == ZeroPolicy::Drop) {
    for (double d : deltas)
      if (d != 0.0) {
        mags.push_back(std::fabs(d));
        positive.push_back(d > 0.0);
      }
  } else {
    for (double d : deltas) {
      mags.push_back(std::fabs(d));
      positive.push_back(d > 0.0);
    }
  }
  if (mags.empty()) {
    if (all_zero) *all_zero = true;
    return 1.0;
  }

  std::vector<double> ranks = average_ranks(mags);

  // Pratt: zeros take part in the ranking, then drop out of the statistic.
  std::vector<double> sign_ranks;
  double w_plus = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (policy == ZeroPolicy::Pratt && deltas[i] == 0.0) continue;
    sign_ranks.push_back(ranks[i]);
    if (positive[i]) w_plus += ranks[i];
  }
  if (sign_ranks.empty()) {
    if (all_zero) *all_zero = true;
    return 1.0;
  }
  const std::size_t n = sign_ranks.size();

  if (n <= 20) {
    // Exact tail: average ranks are half-integers, so doubling gives an
    // integer subset-sum distribution.
    std::vector<std::uint64_t> r2(n);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r2[i] = static_cast<std::uint64_t>(std::llround(2.0 * sign_ranks[i]));
      total += r2[i];
    }
    std::vector<double> ways(total + 1, 0.0);
    ways[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = total + 1; s-- > r2[i];) ways[s] += ways[s - r2[i]];
    const auto w2 = static_cast<std::uint64_t>(std::llround(2.0 * w_plus));
    double tail = 0.0;
    for (std::size_t s = w2; s <= total; ++s) tail += ways[s];
    return tail / std::pow(2.0, static_cast<double>(n));
  }

  // Normal approximation; mean/variance from the actual (tie-averaged) ranks.
  double mu = 0.0, var = 0.0;
  for (double r : sign_ranks) {
    mu += r / 2.0;
    var += r * r / 4.0;
  }
  const double z = (w_plus - 0.5 - mu) / std::sqrt(var);
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double SeedErrors::median() const {
  require(!values.empty(), "median: empty");
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double SeedErrors::stddev() const {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(n - 1));
}

ExperimentReport aggregate(const std::string& experiment, const std::vector<std::string>& tasks,
                           const std::vector<std::string>& strategies,
                           const std::vector<std::uint64_t>& seeds,
                           const std::vector<CellResult>& cells) {
  ExperimentReport rep;
  rep.experiment = experiment;
  rep.strategies = strategies;
  rep.seeds = seeds;

  std::map<std::string, std::map<std::string, std::map<std::uint64_t, const CellResult*>>> index;
  for (const CellResult& c : cells) index[c.task][c.strategy][c.seed] = &c;

  std::string gaps;
  for (const auto& task : tasks)
    for (const auto& strategy : strategies)
      for (std::uint64_t seed : seeds)
        if (!index.count(task) || !index[task].count(strategy) ||
            !index[task][strategy].count(seed))
          gaps += " (" + task + ", " + strategy + ", seed " + std::to_string(seed) + ")";
  if (!gaps.empty()) fail("aggregate: missing cells:" + gaps);

  rep.comparative = std::find(strategies.begin(), strategies.end(), "input-based") !=
                        strategies.end() &&
                    std::find(strategies.begin(), strategies.end(), "curvature-based") !=
                        strategies.end();

  std::vector<double> deltas;
  double improvement_sum = 0.0;
  for (const auto& task : tasks) {
    TaskSummary ts;
    ts.task = task;
    for (const auto& strategy : strategies) {
      SeedErrors se;
      for (std::uint64_t seed : seeds) se.values.push_back(index[task][strategy][seed]->rel_l2);
      ts.by_strategy[strategy] = std::move(se);
    }
    if (rep.comparative) {
      const double mi = ts.by_strategy["input-based"].median();
      const double mc = ts.by_strategy["curvature-based"].median();
      ts.improvement = improvement_pct(mi, mc);
      improvement_sum += ts.improvement;
      deltas.push_back(mi - mc);
    }
    rep.tasks.push_back(std::move(ts));
  }

  for (const auto& strategy : strategies) {
    double total = 0.0;
    for (const auto& task : tasks)
      for (std::uint64_t seed : seeds) total += index[task][strategy][seed]->wall_ms;
    rep.wall_ms_by_strategy[strategy] = total;
  }

  if (rep.comparative) {
    rep.average_improvement = improvement_sum / static_cast<double>(tasks.size());
    rep.wilcoxon_p = wilcoxon_one_tailed(deltas);
  }
  return rep;
}

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["experiment"] = report.experiment;
  doc["strategies"] = report.strategies;
  doc["seeds"] = report.seeds;
  doc["comparative"] = report.comparative;
  nlohmann::json tasks = nlohmann::json::array();
  for (const TaskSummary& ts : report.tasks) {
    nlohmann::json jt;
    jt["task"] = ts.task;
    for (const auto& [strategy, se] : ts.by_strategy) {
      jt[strategy] = {
          {"errors", se.values}, {"median", se.median()}, {"std", se.stddev()}};
    }
    if (report.comparative) jt["improvement_pct"] = ts.improvement;
    tasks.push_back(std::move(jt));
  }
  doc["tasks"] = std::move(tasks);
  if (report.comparative) {
    doc["average_improvement_pct"] = report.average_improvement;
    doc["wilcoxon_p"] = report.wilcoxon_p;
  }
  doc["wall_ms_by_strategy"] = report.wall_ms_by_strategy;
  return doc.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  require(doc.contains("schema_version"), "report: missing schema_version");
  require(doc["schema_version"].get<int>() == 1, "report: unsupported schema_version");
  ExperimentReport rep;
  rep.experiment = doc["experiment"].get<std::string>();
  rep.strategies = doc["strategies"].get<std::vector<std::string>>();
  rep.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
  rep.comparative = doc["comparative"].get<bool>();
  for (const auto& jt : doc["tasks"]) {
    TaskSummary ts;
    ts.task = jt["task"].get<std::string>();
    for (const auto& strategy : rep.strategies) {
      SeedErrors se;
      se.values = jt[strategy]["errors"].get<std::vector<double>>();
      ts.by_strategy[strategy] = std::move(se);
    }
    if (rep.comparative) ts.improvement = jt["improvement_pct"].get<double>();
    rep.tasks.push_back(std::move(ts));
  }
  if (rep.comparative) {
    rep.average_improvement = doc["average_improvement_pct"].get<double>();
    rep.wilcoxon_p = doc["wilcoxon_p"].get<double>();
  }
  if (doc.contains("wall_ms_by_strategy"))
    rep.wall_ms_by_strategy = doc["wall_ms_by_strategy"].get<std::map<std::string, double>>();
  return rep;
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
  std::ofstream out(path);
  require(out.good(), "write_report_csv: cannot open " + path);
  out << "task,input_median,input_std,curvature_median,curvature_std,improvement_pct\n";
  out.precision(17);
  auto cell = [&](const TaskSummary& ts, const std::string& strategy, bool median) {
    auto it = ts.by_strategy.find(strategy);
    if (it == ts.by_strategy.end()) {
      out << "";
      return;
    }
    out << (median ? it->second.median() : it->second.stddev());
  };
  for (const TaskSummary& ts : report.tasks) {
    out << ts.task << ',';
    cell(ts, "input-based", true);
    out << ',';
    cell(ts, "input-based", false);
    out << ',';
    cell(ts, "curvature-based", true);
    out << ',';
    cell(ts, "curvature-based", false);
    out << ',';
    if (report.comparative) out << ts.improvement;
    out << '\n';
  }
  if (report.comparative)
    out << "AVERAGE,,,,," << report.average_improvement << '\n';
  require(out.good(), "write_report_csv: write failed");
}

}  // namespace kan
