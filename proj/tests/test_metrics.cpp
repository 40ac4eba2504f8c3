#include <gtest/gtest.h>

#include <random>

#include "hmi/metrics/conflicts.hpp"
#include "hmi/metrics/stats.hpp"
#include "hmi/metrics/summary.hpp"
#include "oracles.hpp"

using namespace hmi;
using stats::Pairs;

namespace {

constexpr auto T = LOA::Teleoperation;
constexpr auto A = LOA::Autonomy;

SwitchEvent ai(double t, LOA from, LOA to) { return {t, from, to, Agent::AI, "performance"}; }
SwitchEvent human(double t, LOA from, LOA to) { return {t, from, to, Agent::Human, "human"}; }

// Alternating-LOA switch log with random initiators and gaps.
std::vector<SwitchEvent> random_log(std::mt19937_64& rng, int n) {
  std::vector<SwitchEvent> log;
  std::exponential_distribution<double> gap(1.0 / 6.0);
  std::bernoulli_distribution by_ai(0.5);
  double t = 0.0;
  LOA loa = T;
  for (int i = 0; i < n; ++i) {
    t += gap(rng);
    const LOA to = other(loa);
    log.push_back(by_ai(rng) ? ai(t, loa, to) : human(t, loa, to));
    loa = to;
  }
  return log;
}

TrialMetrics trial(std::uint64_t seed, double time, int collisions, int conflicts) {
  TrialMetrics m;
  m.seed = seed;
  m.time_to_completion = time;
  m.collisions = collisions;
  m.conflicts = conflicts;
  m.completed = true;
  return m;
}

}  // namespace

TEST(Conflicts, ChainOfTwoReversals) {
  const std::vector<SwitchEvent> log{ai(10, T, A), human(12, A, T), ai(14, T, A)};
  const auto eps = detect_conflicts(log, 10.0);
  ASSERT_EQ(eps.size(), 1u);
  EXPECT_EQ(eps[0].length, 2);
  EXPECT_EQ(eps[0].t_start, 10.0);
  EXPECT_EQ(eps[0].t_end, 14.0);
  EXPECT_EQ(eps[0].events.size(), 3u);
}

TEST(Conflicts, GapBeyondWindowIsNotConflict) {
  EXPECT_TRUE(detect_conflicts({ai(10, T, A), human(20.5, A, T)}, 10.0).empty());
  EXPECT_EQ(detect_conflicts({ai(10, T, A), human(20.0, A, T)}, 10.0).size(), 1u);
}

TEST(Conflicts, SameInitiatorIsNotConflict) {
  EXPECT_TRUE(detect_conflicts({ai(10, T, A), ai(12, A, T)}, 10.0).empty());
  EXPECT_TRUE(detect_conflicts({human(10, T, A), human(12, A, T)}, 10.0).empty());
}

TEST(Conflicts, SeparateEpisodes) {
  const std::vector<SwitchEvent> log{ai(10, T, A), human(11, A, T), ai(30, T, A), human(31, A, T), ai(60, T, A)};
  const auto eps = detect_conflicts(log, 10.0);
  ASSERT_EQ(eps.size(), 2u);
  EXPECT_EQ(eps[0].length, 1);
  EXPECT_EQ(eps[1].t_start, 30.0);
}

TEST(ConflictsProperty, TranslationInvariant) {
  std::mt19937_64 rng(1);
  for (int run = 0; run < 200; ++run) {
    auto log = random_log(rng, 30);
    const auto base = detect_conflicts(log, 10.0);
    const double shift = 123.0;  // exactly representable offsets keep gaps exact
    for (auto& e : log) e.t += shift;
    const auto moved = detect_conflicts(log, 10.0);
    ASSERT_EQ(base.size(), moved.size());
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(base[i].length, moved[i].length);
  }
}

TEST(ConflictsProperty, EpisodesAreDisjointAndBounded) {
  std::mt19937_64 rng(2);
  for (int run = 0; run < 200; ++run) {
    const auto log = random_log(rng, 40);
    const auto eps = detect_conflicts(log, 10.0);
    int total = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      total += eps[i].length;
      EXPECT_EQ(static_cast<int>(eps[i].events.size()), eps[i].length + 1);
      if (i > 0) {
        EXPECT_LT(eps[i - 1].t_end, eps[i].t_start);
      }
      for (std::size_t k = 1; k < eps[i].events.size(); ++k) {
        EXPECT_NE(eps[i].events[k].initiator, eps[i].events[k - 1].initiator);
        EXPECT_LE(eps[i].events[k].t - eps[i].events[k - 1].t, 10.0);
      }
    }
    EXPECT_LE(total, static_cast<int>(log.size()) - 1);
  }
}

// Every reversal pair in the log lies inside some episode (maximality).
TEST(ConflictsProperty, EveryReversalIsCovered) {
  std::mt19937_64 rng(3);
  for (int run = 0; run < 200; ++run) {
    const auto log = random_log(rng, 25);
    const auto eps = detect_conflicts(log, 10.0);
    for (std::size_t i = 1; i < log.size(); ++i) {
      if (log[i].initiator == log[i - 1].initiator || log[i].t - log[i - 1].t > 10.0) continue;
      bool covered = false;
      for (const auto& ep : eps)
        covered = covered || (ep.t_start <= log[i - 1].t && log[i].t <= ep.t_end);
      EXPECT_TRUE(covered) << "run " << run << " event " << i;
    }
  }
}

TEST(Wilcoxon, SmallestExactCase) {
  const auto w = stats::wilcoxon_signed_rank({{1, 0}, {2, 0}, {3, 0}});
  EXPECT_EQ(w.w_plus, 6.0);
  EXPECT_TRUE(w.exact);
  EXPECT_DOUBLE_EQ(w.p, 0.25);
  EXPECT_GT(w.z, 0.0);
}

TEST(Wilcoxon, AllZeroIsUndefined) {
  EXPECT_THROW((void)stats::wilcoxon_signed_rank({{1, 1}, {2, 2}}), stats::UndefinedTest);
}

TEST(Wilcoxon, SignConvention) {
  // a consistently lower than b: negative Z
  const auto w = stats::wilcoxon_signed_rank({{0, 1}, {0, 2}, {1, 4}, {2, 3}, {0, 5}});
  EXPECT_LT(w.z, 0.0);
  EXPECT_EQ(w.w_plus, 0.0);
  EXPECT_DOUBLE_EQ(w.p, 2.0 / 32.0);
}

TEST(WilcoxonOracle, MatchesEnumeration) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> un(1, 12), uv(0, 4);
  for (int run = 0; run < 300; ++run) {
    Pairs pairs;
    const int n = un(rng);
    for (int i = 0; i < n; ++i) pairs.emplace_back(uv(rng), uv(rng));
    const double expect = oracle::wilcoxon_enumerated_p(pairs);
    bool nonzero = false;
    for (const auto& [a, b] : pairs) nonzero = nonzero || a != b;
    if (!nonzero) continue;
    const auto w = stats::wilcoxon_signed_rank(pairs);
    ASSERT_TRUE(w.exact);
    ASSERT_NEAR(w.p, expect, 1e-12) << "run " << run;
  }
}

TEST(Wilcoxon, NormalApproximationCloseAtTen) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.3, 1.0);
  for (int run = 0; run < 100; ++run) {
    Pairs pairs;
    for (int i = 0; i < 10; ++i) pairs.emplace_back(nd(rng), 0.0);
    const auto w = stats::wilcoxon_signed_rank(pairs);
    const double mu = 10 * 11 / 4.0, sd = std::sqrt(10 * 11 * 21 / 24.0);
    const double approx = stats::normal_two_sided(std::max(0.0, std::abs(w.w_plus - mu) - 0.5) / sd);
    EXPECT_LT(std::abs(w.p - approx), 0.05);
  }
}

TEST(Wilcoxon, LargeSampleUsesContinuityCorrection) {
  Pairs pairs;
  for (int i = 1; i <= 20; ++i) pairs.emplace_back(i % 3 == 0 ? -i : i, 0.0);
  const auto w = stats::wilcoxon_signed_rank(pairs);
  EXPECT_FALSE(w.exact);
  const double mu = 20 * 21 / 4.0, sd = std::sqrt(20 * 21 * 41 / 24.0);
  EXPECT_NEAR(w.z, (w.w_plus - mu) / sd, 1e-12);
  EXPECT_NEAR(w.p, std::erfc((std::abs(w.w_plus - mu) - 0.5) / sd / std::sqrt(2.0)), 1e-12);
}

TEST(PairedT, WorkedExample) {
  const Pairs pairs{{2, 0}, {4, 0}, {6, 0}};
  const auto r = stats::paired_t(pairs);
  EXPECT_NEAR(r.t, 3.4641, 1e-4);
  EXPECT_EQ(r.df, 2.0);
  EXPECT_NEAR(r.p, oracle::student_t_p(r.t, 2.0), 1e-4);
  EXPECT_NEAR(r.p, 1.0 - r.t / std::sqrt(r.t * r.t + 2.0), 1e-9);  // closed form at df = 2
  EXPECT_NEAR(r.p, 0.0742, 1e-4);
}

TEST(PairedT, SymmetricDifferences) {
  const auto r = stats::paired_t({{1, 0}, {-1, 0}});
  EXPECT_EQ(r.t, 0.0);
  EXPECT_NEAR(r.p, 1.0, 1e-12);
}

TEST(PairedT, UndefinedCases) {
  EXPECT_THROW((void)stats::paired_t({{3, 1}, {5, 3}}), stats::UndefinedTest);
  EXPECT_THROW((void)stats::paired_t({{3, 1}}), stats::UndefinedTest);
}

TEST(PairedTOracle, RandomSamples) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd(0.4, 2.0);
  std::uniform_int_distribution<int> un(2, 40);
  for (int run = 0; run < 100; ++run) {
    Pairs pairs;
    const int n = un(rng);
    for (int i = 0; i < n; ++i) pairs.emplace_back(nd(rng), nd(rng));
    const auto r = stats::paired_t(pairs);
    EXPECT_NEAR(r.t, oracle::paired_t_statistic(pairs), 1e-9);
    EXPECT_NEAR(r.p, oracle::student_t_p(r.t, r.df), 1e-4) << "run " << run;
  }
}

TEST(Summarize, IdenticalSetsAreUndefined) {
  std::vector<TrialMetrics> a{trial(1, 40, 0, 0), trial(2, 42, 1, 0), trial(3, 41, 0, 1)};
  const auto rep = summarize(a, a);
  for (const auto& r : rep.rows) {
    EXPECT_FALSE(r.p) << r.metric;
    EXPECT_EQ(r.note, "undefined");
  }
  EXPECT_NE(format_row(rep.row("conflicts")).find("test undefined"), std::string::npos);
}

TEST(Summarize, SinglePairIsInsufficient) {
  const auto rep = summarize({trial(1, 40, 0, 0)}, {trial(1, 38, 0, 0)});
  EXPECT_EQ(rep.row("time_to_completion").note, "insufficient-n");
}

TEST(Summarize, PairingErrors) {
  EXPECT_THROW((void)summarize({trial(1, 40, 0, 0)}, {}), ConfigError);
  EXPECT_THROW((void)summarize({trial(1, 40, 0, 0)}, {trial(2, 40, 0, 0)}), ConfigError);
}

TEST(Summarize, DirectionAndFormatting) {
  std::vector<TrialMetrics> e, h;
  for (std::uint64_t s = 1; s <= 8; ++s) {
    e.push_back(trial(s, 50.0 + static_cast<double>(s), 2, 3));
    h.push_back(trial(s, 45.0 + 0.5 * static_cast<double>(s), 0, static_cast<int>(s % 2)));
  }
  const auto rep = summarize(e, h);
  const auto& c = rep.row("conflicts");
  EXPECT_LT(*c.statistic, 0.0);
  EXPECT_DOUBLE_EQ(c.emics_mean, 3.0);
  EXPECT_DOUBLE_EQ(c.hier_mean, 0.5);
  EXPECT_EQ(rep.row("time_to_completion").test, TestKind::PairedT);
  EXPECT_LT(*rep.row("time_to_completion").statistic, 0.0);
  const auto line = format_row(c);
  EXPECT_EQ(line.rfind("conflicts: EMICS (M = 3.00, SD = 0.00), HierEMICS (M = 0.50, SD = 0.53), Z = ", 0), 0u);
  EXPECT_NE(line.find("p = 0.008"), std::string::npos);
}

TEST(Summarize, CsvAndJson) {
  std::vector<TrialMetrics> e{trial(1, 40, 1, 0), trial(2, 44, 2, 1)}, h{trial(1, 39, 0, 0), trial(2, 41, 0, 0)};
  const std::vector<ComparisonReport> reps{summarize(e, h, "compliant")};
  const auto csv = report_csv(reps);
  EXPECT_EQ(csv.rfind("metric,emics_mean,emics_sd,hier_mean,hier_sd,statistic,p\n", 0), 0u);
  EXPECT_NE(csv.find("\ncompliant/collisions,1.5,"), std::string::npos);
  const auto j = report_json(reps);
  EXPECT_EQ(j[0]["operator"], "compliant");
  EXPECT_EQ(j[0]["rows"][0]["metric"], "time_to_completion");
  EXPECT_EQ(j[0]["rows"][0]["test"], "paired-t");
}

TEST(Metrics, JsonRoundTrip) {
  auto m = trial(9, 63.45, 2, 1);
  m.ai_switches = 4;
  m.total_switches = 6;
  m.pois_visited = 3;
  m.conflict_reports = 1;
  EXPECT_EQ(metrics_from_json(nlohmann::json::parse(to_json(m).dump())), m);
}
