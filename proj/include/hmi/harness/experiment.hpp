#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <future>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hmi/harness/config.hpp"
#include "hmi/harness/trial.hpp"
#include "hmi/metrics/summary.hpp"

namespace hmi {

struct ExperimentSpec {
  std::shared_ptr<const World> world;
  std::string scenario_label;
  std::vector<std::string> operators;
  std::vector<std::uint64_t> seeds;
  ParamsFile params_file;
  std::vector<std::string> cli_overrides;
  bool keep_logs = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct OperatorResults {
  std::string op;
  std::vector<TrialResult> emics;  // in seed order
  std::vector<TrialResult> hier;
  ComparisonReport report;
};

struct ExperimentResult {
  std::vector<OperatorResults> per_operator;
  std::vector<ComparisonReport> reports() const {
    std::vector<ComparisonReport> r;
    for (const auto& o : per_operator) r.push_back(o.report);
    return r;
  }
};

inline std::vector<std::uint64_t> seed_range(std::uint64_t n, std::uint64_t first = 1) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 0; i < n; ++i) s.push_back(first + i);
  return s;
}

// Full factorial over operators x controllers x seeds; trials run in
// parallel and are paired by seed across the two controllers.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) throw ConfigError("experiment needs at least one seed");
  if (std::set<std::uint64_t>(spec.seeds.begin(), spec.seeds.end()).size() != spec.seeds.size())
    throw ConfigError("duplicate seeds in experiment");
  if (spec.operators.empty()) throw ConfigError("experiment needs at least one operator");

  std::vector<TrialConfig> jobs;
  for (const auto& op : spec.operators) {
    const auto setup = resolve_operator(op, spec.world->scenario.params, spec.params_file, spec.cli_overrides);
    for (auto ctrl : {ControllerKind::Emics, ControllerKind::HierEmics})
      for (auto seed : spec.seeds) jobs.push_back({spec.scenario_label, ctrl, setup.script, seed, setup.params, LOA::Teleoperation, {}});
  }

  std::vector<TrialResult> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads = std::min<unsigned>(spec.threads ? spec.threads : hw, static_cast<unsigned>(jobs.size()));
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        results[i] = run_trial(spec.world, jobs[i]);
        if (!spec.keep_logs) results[i].log.clear();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
  for (std::size_t i = 0; i < jobs.size(); ++i)
    if (!errors[i].empty())
      throw RuntimeFailure("trial failed (controller " + std::string(to_string(jobs[i].controller)) + ", operator " +
                           jobs[i].op.name() + ", seed " + std::to_string(jobs[i].seed) + "): " + errors[i]);

  ExperimentResult out;
  const std::size_t n = spec.seeds.size();
  for (std::size_t o = 0; o < spec.operators.size(); ++o) {
    OperatorResults r;
    r.op = spec.operators[o];
    const std::size_t base = o * 2 * n;
    std::vector<TrialMetrics> me, mh;
    for (std::size_t i = 0; i < n; ++i) {
      r.emics.push_back(std::move(results[base + i]));
      r.hier.push_back(std::move(results[base + n + i]));
      me.push_back(r.emics.back().metrics);
      mh.push_back(r.hier.back().metrics);
    }
    r.report = summarize(me, mh, spec.operators.size() > 1 ? r.op : std::string{});
    out.per_operator.push_back(std::move(r));
  }
  return out;
}

}  // namespace hmi
