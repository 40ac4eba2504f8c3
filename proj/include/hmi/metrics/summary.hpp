#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hmi/core/error.hpp"
#include "hmi/metrics/stats.hpp"

namespace hmi {

struct TrialMetrics {
  std::uint64_t seed = 0;
  double time_to_completion = 0.0;  // end time of the trial, t_max when not completed
  int collisions = 0;
  int ai_switches = 0;
  int total_switches = 0;
  int conflicts = 0;
  int pois_visited = 0;
  bool completed = false;
  int conflict_reports = 0;  // operator self-reports, for comparison only

  friend bool operator==(const TrialMetrics&, const TrialMetrics&) = default;
};

inline nlohmann::ordered_json to_json(const TrialMetrics& m) {
  return {{"seed", m.seed},
          {"time_to_completion", m.time_to_completion},
          {"collisions", m.collisions},
          {"ai_switches", m.ai_switches},
          {"total_switches", m.total_switches},
          {"conflicts", m.conflicts},
          {"pois_visited", m.pois_visited},
          {"completed", m.completed},
          {"conflict_reports", m.conflict_reports}};
}

inline TrialMetrics metrics_from_json(const nlohmann::json& j) {
  TrialMetrics m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.time_to_completion = j.at("time_to_completion").get<double>();
  m.collisions = j.at("collisions").get<int>();
  m.ai_switches = j.at("ai_switches").get<int>();
  m.total_switches = j.at("total_switches").get<int>();
  m.conflicts = j.at("conflicts").get<int>();
  m.pois_visited = j.at("pois_visited").get<int>();
  m.completed = j.at("completed").get<bool>();
  m.conflict_reports = j.at("conflict_reports").get<int>();
  return m;
}

enum class TestKind { Wilcoxon, PairedT };

struct MetricRow {
  std::string metric;
  TestKind test = TestKind::Wilcoxon;
  std::size_t n = 0;
  double emics_mean = 0.0;
  double emics_sd = 0.0;
  double hier_mean = 0.0;
  double hier_sd = 0.0;
  std::optional<double> statistic;  // Z for Wilcoxon, t for the t-test
  std::optional<double> p;
  std::string note;  // "insufficient-n" or "undefined" when no test result
};

struct ComparisonReport {
  std::string label;  // operator name, empty for a single operator
  std::vector<MetricRow> rows;

  const MetricRow& row(const std::string& metric) const {
    for (const auto& r : rows)
      if (r.metric == metric) return r;
    throw std::out_of_range("no metric row '" + metric + "'");
  }
};

namespace detail {

struct MetricSpec {
  const char* name;
  TestKind test;
  double (*get)(const TrialMetrics&);
};

inline const std::vector<MetricSpec>& metric_specs() {
  static const std::vector<MetricSpec> specs = {
      {"time_to_completion", TestKind::PairedT, [](const TrialMetrics& m) { return m.time_to_completion; }},
      {"collisions", TestKind::Wilcoxon, [](const TrialMetrics& m) { return double(m.collisions); }},
      {"conflicts", TestKind::Wilcoxon, [](const TrialMetrics& m) { return double(m.conflicts); }},
      {"ai_switches", TestKind::Wilcoxon, [](const TrialMetrics& m) { return double(m.ai_switches); }},
      {"total_switches", TestKind::Wilcoxon, [](const TrialMetrics& m) { return double(m.total_switches); }},
      {"pois_visited", TestKind::Wilcoxon, [](const TrialMetrics& m) { return double(m.pois_visited); }},
  };
  return specs;
}

}  // namespace detail

// Paired comparison of the two controllers' trials. Pairs are matched by
// position and must carry the same seed. Differences are taken as
// HierEMICS - EMICS, so a negative statistic means HierEMICS scored lower.
inline ComparisonReport summarize(const std::vector<TrialMetrics>& emics, const std::vector<TrialMetrics>& hier,
                                  std::string label = {}) {
  if (emics.size() != hier.size())
    throw ConfigError("summarize: " + std::to_string(emics.size()) + " EMICS trials vs " +
                      std::to_string(hier.size()) + " HierEMICS trials");
  for (std::size_t i = 0; i < emics.size(); ++i)
    if (emics[i].seed != hier[i].seed)
      throw ConfigError("summarize: trial " + std::to_string(i) + " is not paired by seed");

  ComparisonReport rep;
  rep.label = std::move(label);
  for (const auto& spec : detail::metric_specs()) {
    MetricRow row;
    row.metric = spec.name;
    row.test = spec.test;
    row.n = emics.size();
    std::vector<double> e, h;
    stats::Pairs pairs;
    for (std::size_t i = 0; i < emics.size(); ++i) {
      e.push_back(spec.get(emics[i]));
      h.push_back(spec.get(hier[i]));
      pairs.emplace_back(h.back(), e.back());
    }
    row.emics_mean = stats::mean(e);
    row.emics_sd = stats::sample_sd(e);
    row.hier_mean = stats::mean(h);
    row.hier_sd = stats::sample_sd(h);
    if (pairs.size() < 2) {
      row.note = "insufficient-n";
    } else {
      try {
        if (spec.test == TestKind::Wilcoxon) {
          const auto w = stats::wilcoxon_signed_rank(pairs);
          row.statistic = w.z;
          row.p = w.p;
        } else {
          const auto t = stats::paired_t(pairs);
          row.statistic = t.t;
          row.p = t.p;
        }
      } catch (const stats::UndefinedTest&) {
        row.note = "undefined";
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline std::string format_row(const MetricRow& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << r.metric << ": EMICS (M = " << r.emics_mean << ", SD = " << r.emics_sd << "), HierEMICS (M = " << r.hier_mean
     << ", SD = " << r.hier_sd << ")";
  if (r.statistic && r.p) {
    os << ", " << (r.test == TestKind::Wilcoxon ? "Z" : "t") << " = " << std::setprecision(3) << *r.statistic;
    if (*r.p < 0.001) os << ", p < .001";
    else os << ", p = " << *r.p;
  } else {
    os << ", test " << r.note;
  }
  return os.str();
}

inline std::string report_csv(const std::vector<ComparisonReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "metric,emics_mean,emics_sd,hier_mean,hier_sd,statistic,p\n";
  auto num = [&](double v) {
    if (std::isfinite(v)) os << v;
  };
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      os << (rep.label.empty() ? "" : rep.label + "/") << r.metric << ',';
      num(r.emics_mean);
      os << ',';
      num(r.emics_sd);
      os << ',';
      num(r.hier_mean);
      os << ',';
      num(r.hier_sd);
      os << ',';
      if (r.statistic) num(*r.statistic);
      os << ',';
      if (r.p) num(*r.p);
      os << '\n';
    }
  }
  return os.str();
}

inline nlohmann::ordered_json report_json(const std::vector<ComparisonReport>& reports) {
  auto num = [](double v) -> nlohmann::ordered_json { return std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr; };
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& rep : reports) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"metric", r.metric},
                      {"test", r.test == TestKind::Wilcoxon ? "wilcoxon" : "paired-t"},
                      {"n", r.n},
                      {"emics_mean", num(r.emics_mean)},
                      {"emics_sd", num(r.emics_sd)},
                      {"hier_mean", num(r.hier_mean)},
                      {"hier_sd", num(r.hier_sd)},
                      {"statistic", r.statistic ? num(*r.statistic) : nullptr},
                      {"p", r.p ? num(*r.p) : nullptr},
                      {"note", r.note}});
    }
    out.push_back({{"operator", rep.label}, {"rows", rows}});
  }
  return out;
}

}  // namespace hmi
