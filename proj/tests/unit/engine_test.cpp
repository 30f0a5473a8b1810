#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <gtest/gtest.h>

#include "stressgrid/engine.hpp"
#include "stressgrid/error.hpp"
#include "support.hpp"

namespace sg = stressgrid;
using sg::PowerLevel;

namespace {

sg::SimConfig small_sim(sg::Policy policy, double gap, double ap, std::uint64_t seed = 1, int hours = 6) {
  sg::SimConfig c;
  c.horizon_hours = hours;
  c.topology.homes = 200;
  c.topology.feeders = 10;
  c.topology.grid_stations = 2;
  c.topology.transformers_per_feeder = 2;
  c.topology.group_size = 2;
  c.topology.ap = ap;
  c.supply.gap_fraction = gap;
  c.policy = policy;
  c.seed = seed;
  return c;
}

const sg::Corpus& corpus() { return sg::testing::bundled_corpus(); }

double day_ulw(const sg::MetricsLog& log) {
  double sum = 0.0;
  for (const auto& h : log.hours) sum += h.ulw;
  return sum;
}

// Checks every property that must hold whatever the draws. Returns the
// number of views seen so callers can tell the observer actually ran.
std::size_t run_with_invariants(const sg::SimConfig& config) {
  const bool dlc = config.policy != sg::Policy::Baseline;
  std::size_t views = 0;
  int current_hour = -1;
  sg::LevelAssignment previous;     // last view of this hour
  sg::LevelAssignment shed_before;  // hour-end levels of the previous hour
  sg::LevelAssignment hour_end;

  const auto result = sg::run(config, corpus(), [&](const sg::SimView& v) {
    ++views;
    const auto& t = v.topology;
    const auto levels = t.levels();
    if (v.clock.hour != current_hour) {
      shed_before = hour_end;
      previous.assign(levels.size(), PowerLevel::L5);
      current_hour = v.clock.hour;
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto& h = t.homes[i];
      // Levels only move down within an hour.
      EXPECT_LE(sg::ordinal(levels[i]), sg::ordinal(previous[i])) << "home " << i;
      if (!h.aashiyana) EXPECT_TRUE(levels[i] == PowerLevel::L1 || levels[i] == PowerLevel::L5);
      if (dlc && !v.emergency) {
        if (h.aashiyana) EXPECT_NE(levels[i], PowerLevel::L1) << "home " << i;
        if (!shed_before.empty() && shed_before[i] != PowerLevel::L5)
          EXPECT_EQ(levels[i], PowerLevel::L5) << "home " << i << " shed two hours running";
      }
    }
    previous = levels;
    if (v.hour_end) {
      double served = 0.0;
      for (const auto& h : t.homes) served += sg::current_consumption(h);
      EXPECT_LE(served, v.capacity * (1.0 + 1e-12));
      hour_end = levels;
    }
  });

  const int pass = sg::rounds_per_pass(config.policy, 5);  // small_sim has five groups
  double served = 0.0, capacity = 0.0;
  for (const auto& h : result.log.hours) {
    EXPECT_TRUE(h.converged);
    EXPECT_LE(h.served, h.capacity * (1.0 + 1e-12));
    EXPECT_LE(h.convergence_seconds, 2 * pass + 1);
    if (!h.emergency) EXPECT_LE(h.convergence_seconds, pass);
    std::size_t total = 0;
    for (auto c : h.level_counts) total += c;
    EXPECT_EQ(total, result.log.home_count);
    served += h.served;
    capacity += h.capacity;
  }
  EXPECT_LE(served, capacity * (1.0 + 1e-12));

  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    const auto& a = result.trace[i - 1].at;
    const auto& b = result.trace[i].at;
    EXPECT_TRUE(a.hour < b.hour || (a.hour == b.hour && a.second <= b.second)) << i;
  }
  return views;
}

}  // namespace

TEST(RoundsPerPass, ByPolicy) {
  EXPECT_EQ(sg::rounds_per_pass(sg::Policy::Distributed, 5), 12);
  EXPECT_EQ(sg::rounds_per_pass(sg::Policy::Centralized, 5), 3);
  EXPECT_EQ(sg::rounds_per_pass(sg::Policy::Baseline, 5), 1);
}

TEST(Converged, Examples) {
  EXPECT_TRUE(sg::converged(100.0, 100.0));
  EXPECT_TRUE(sg::converged(0.0, 0.0));
  EXPECT_FALSE(sg::converged(100.1, 100.0));
}

TEST(Run, NoGapRunsNoRounds) {
  for (auto policy : {sg::Policy::Baseline, sg::Policy::Distributed, sg::Policy::Centralized}) {
    const auto r = sg::run(small_sim(policy, 0.0, 0.9), corpus());
    for (const auto& h : r.log.hours) {
      EXPECT_EQ(h.convergence_seconds, 0);
      EXPECT_EQ(h.level_counts[sg::level_index(PowerLevel::L5)], r.log.home_count);
      EXPECT_EQ(h.ulw, 0.0);
    }
  }
}

TEST(Run, NoAashiyanaMeansOnlyFullOrNoPower) {
  for (auto policy : {sg::Policy::Distributed, sg::Policy::Centralized}) {
    const auto r = sg::run(small_sim(policy, 0.2, 0.0), corpus());
    for (const auto& h : r.log.hours) {
      EXPECT_EQ(h.level_counts[1] + h.level_counts[2] + h.level_counts[3], 0u);
      EXPECT_LE(h.served, h.capacity);
    }
  }
}

TEST(Run, DeterministicInConfig) {
  const auto config = small_sim(sg::Policy::Distributed, 0.3, 0.7, 11);
  const auto a = sg::run(config, corpus());
  const auto b = sg::run(config, corpus());
  ASSERT_EQ(a.log.hours.size(), b.log.hours.size());
  for (std::size_t i = 0; i < a.log.hours.size(); ++i) {
    EXPECT_EQ(a.log.hours[i].served, b.log.hours[i].served);
    EXPECT_EQ(a.log.hours[i].level_counts, b.log.hours[i].level_counts);
  }
  EXPECT_EQ(a.trace.size(), b.trace.size());
  EXPECT_EQ(a.log.config_hash, b.log.config_hash);
  EXPECT_NE(a.log.config_hash, sg::config_hash(small_sim(sg::Policy::Distributed, 0.3, 0.5, 11)));
  EXPECT_EQ(a.log.config_hash, sg::config_hash(small_sim(sg::Policy::Distributed, 0.3, 0.7, 12)));
}

TEST(Run, SeedChangesDraws) {
  const auto a = sg::run(small_sim(sg::Policy::Baseline, 0.2, 0.5, 1, 1), corpus());
  const auto b = sg::run(small_sim(sg::Policy::Baseline, 0.2, 0.5, 2, 1), corpus());
  EXPECT_NE(a.log.hours[0].demand, b.log.hours[0].demand);
}

class InvariantSuite : public ::testing::TestWithParam<std::tuple<sg::Policy, double, double>> {};

TEST_P(InvariantSuite, HoldsAtEveryRound) {
  const auto [policy, gap, ap] = GetParam();
  for (std::uint64_t seed : {1u, 2u}) {
    auto config = small_sim(policy, gap, ap, seed, 8);
    EXPECT_GT(run_with_invariants(config), 0u);
  }
}

std::string sweep_name(const ::testing::TestParamInfo<InvariantSuite::ParamType>& info) {
  const auto& [policy, gap, ap] = info.param;
  return std::string(sg::to_string(policy)) + "_gap" + std::to_string(std::lround(gap * 100)) + "_ap" +
         std::to_string(std::lround(ap * 100));
}

INSTANTIATE_TEST_SUITE_P(
    Sweep, InvariantSuite,
    ::testing::Combine(::testing::Values(sg::Policy::Baseline, sg::Policy::Distributed, sg::Policy::Centralized),
                       ::testing::Values(0.1, 0.4), ::testing::Values(0.3, 0.9)),
    sweep_name);

TEST(Run, LossyFullProtocolKeepsInvariants) {
  for (auto policy : {sg::Policy::Distributed, sg::Policy::Centralized}) {
    auto config = small_sim(policy, 0.2, 0.9, 3, 4);
    config.protocol.mode = sg::ProtocolConfig::Mode::Full;
    config.protocol.distance_m = 50.0;
    EXPECT_GT(run_with_invariants(config), 0u);
  }
}

TEST(Run, FullProtocolOnPerfectLinkMatchesSummary) {
  auto summary = small_sim(sg::Policy::Distributed, 0.2, 0.9, 4, 4);
  auto full = summary;
  full.protocol.mode = sg::ProtocolConfig::Mode::Full;
  const auto a = sg::run(summary, corpus());
  const auto b = sg::run(full, corpus());
  for (std::size_t i = 0; i < a.log.hours.size(); ++i)
    EXPECT_EQ(a.log.hours[i].level_counts, b.log.hours[i].level_counts);
}

TEST(Run, WithoutEmergencyHoursMayStayUnconverged) {
  auto config = small_sim(sg::Policy::Distributed, 0.6, 0.9, 5, 3);
  config.emergency_enabled = false;
  const auto r = sg::run(config, corpus());
  for (const auto& h : r.log.hours) {
    EXPECT_FALSE(h.emergency);
    EXPECT_LE(h.convergence_seconds, sg::rounds_per_pass(config.policy, 5));
  }
}

TEST(Run, UlwOrderingAcrossSeeds) {
  int ordered = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::map<sg::Policy, double> w;
    for (auto policy : {sg::Policy::Baseline, sg::Policy::Distributed, sg::Policy::Centralized})
      w[policy] = day_ulw(sg::run(small_sim(policy, 0.2, 0.9, seed, 12), corpus()).log);
    if (w[sg::Policy::Centralized] <= w[sg::Policy::Distributed] && w[sg::Policy::Distributed] <= w[sg::Policy::Baseline])
      ++ordered;
  }
  EXPECT_GE(ordered, 8);
}

TEST(Run, RejectsInvalidConfig) {
  auto config = small_sim(sg::Policy::Baseline, 0.2, 0.5);
  config.horizon_hours = 0;
  EXPECT_THROW(sg::run(config, corpus()), sg::ConfigError);
  config = small_sim(sg::Policy::Baseline, 0.2, 0.5);
  config.protocol.distance_m = 80.0;
  EXPECT_THROW(sg::run(config, corpus()), sg::ConfigError);
}

TEST(Run, TraceBracketsEachHour) {
  const auto r = sg::run(small_sim(sg::Policy::Centralized, 0.3, 0.9, 6, 2), corpus());
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().kind, sg::TraceEvent::Kind::HourStart);
  EXPECT_EQ(r.trace.back().kind, sg::TraceEvent::Kind::HourEnd);
  const auto starts = std::count_if(r.trace.begin(), r.trace.end(),
                                    [](const sg::TraceEvent& e) { return e.kind == sg::TraceEvent::Kind::HourStart; });
  EXPECT_EQ(starts, 2);
  EXPECT_EQ(sg::to_string(sg::TraceEvent::Kind::PolicyRound), "policy_round");
}
