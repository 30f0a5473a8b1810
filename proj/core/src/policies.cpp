#include "stressgrid/policies.hpp"

#include <algorithm>
#include <cmath>

#include "stressgrid/error.hpp"

namespace stressgrid {
namespace {

constexpr double kMinStressPercent = 5.0;

double served_demand(const Topology& topology) {
  double served = 0.0;
  for (const auto& h : topology.homes) served += current_consumption(h);
  return served;
}

bool exempt(const Home& home, bool emergency) noexcept { return home.alg1.ls_lh && !emergency; }

// Smart-meter cutoff of a conventional home; bypasses the in-home channel.
double cut_to_l1(Home& home) {
  const double saved = current_consumption(home);
  home.current_level = PowerLevel::L1;
  return saved;
}

}  // namespace

void validate(const DistributionProfile& dp) {
  for (double a : {dp.alpha_l4, dp.alpha_l3, dp.alpha_l2})
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("distribution profile alphas must lie in [0, 1]");
  if (std::abs(dp.alpha_l4 + dp.alpha_l3 + dp.alpha_l2 - 1.0) > 1e-9)
    throw ConfigError("distribution profile must sum to 1");
}

bool command_level(Home& home, PowerLevel level, const CommandChannel& channel) {
  if (ordinal(level) >= ordinal(home.current_level)) return false;
  if (channel && !channel(home, level)) return false;
  home.current_level = level;
  return true;
}

LevelAssignment baseline_step(BaselineRotation& rotation, Topology& topology, double capacity) {
  rotation.blacked_out.clear();
  const std::size_t group_count = topology.groups.size();
  double served = served_demand(topology);
  for (std::size_t k = 0; k < group_count && served > capacity; ++k) {
    const auto& group = topology.groups[(rotation.next_group_index + k) % group_count];
    for (auto id : group.home_ids) served -= cut_to_l1(topology.homes[id]);
    rotation.blacked_out.insert(group.id);
  }
  rotation.next_group_index = (rotation.next_group_index + 1) % group_count;
  return topology.levels();
}

std::optional<PowerLevel> alg1_home_decision(Home& home, double sl, const DistributionProfile& dp,
                                             bool emergency, int r) {
  if (r < 1 || r > 100) throw Error("alg1 random draw must lie in [1, 100]");
  if (!home.aashiyana) throw Error("alg1 runs only on Aashiyana homes");
  if (exempt(home, emergency)) return std::nullopt;

  auto& st = home.alg1;
  if (!st.dlc_done) {
    const double s = std::max(sl, kMinStressPercent);
    st.sl_init = s;
    if (!(r < s)) return std::nullopt;
    st.dlc_done = true;
    // Windows are evaluated in this order; strict inequalities as written,
    // so boundary draws fall through to L2.
    if (r > (1.0 - dp.alpha_l4) * s) return PowerLevel::L4;
    if (dp.alpha_l2 * s < r && r < (dp.alpha_l3 + dp.alpha_l2) * s) return PowerLevel::L3;
    return PowerLevel::L2;
  }

  const double s = st.sl_init.value_or(std::max(sl, kMinStressPercent));
  const auto cl = home.current_level;
  const bool floor_reached = cl == PowerLevel::L1 || (cl == PowerLevel::L2 && !emergency);
  if ((r < s || emergency) && !floor_reached) return level_below(cl);
  return std::nullopt;
}

RoundOutcome alg1_round(Topology& topology, int round_index, const StressSignal& signal, double capacity,
                        const DistributedParams& params, DistributedState& state, Rng& rng,
                        const CommandChannel& channel) {
  if (round_index < 1) throw Error("round index starts at 1");
  RoundOutcome out;
  out.served_before = served_demand(topology);
  out.served_after = out.served_before;
  if (out.served_before <= capacity) return out;

  if (round_index == 2) {
    double served = out.served_before;
    const std::size_t group_count = topology.groups.size();
    for (std::size_t k = 0; k < group_count && served > capacity; ++k) {
      const auto& group = topology.groups[state.next_group_index % group_count];
      state.next_group_index = (state.next_group_index + 1) % group_count;
      for (auto id : group.home_ids) {
        auto& h = topology.homes[id];
        if (h.aashiyana || h.current_level == PowerLevel::L1 || exempt(h, signal.emergency)) continue;
        served -= cut_to_l1(h);
        ++out.homes_changed;
      }
    }
    out.served_after = served_demand(topology);
    return out;
  }

  // Every participating home draws its r in id order before any level moves.
  const double reduced_sl = params.reduction_factor * signal.sl;
  std::vector<std::pair<std::uint32_t, PowerLevel>> decisions;
  for (auto& h : topology.homes) {
    if (!h.aashiyana || exempt(h, signal.emergency)) continue;
    const int r = static_cast<int>(uniform_int(rng, 1, 100));
    const double sl = (round_index == 1 || h.alg1.dlc_done) ? signal.sl : reduced_sl;
    if (auto level = alg1_home_decision(h, sl, params.dp, signal.emergency, r)) decisions.emplace_back(h.id, *level);
  }
  for (const auto& [id, level] : decisions)
    if (command_level(topology.homes[id], level, channel)) ++out.homes_changed;

  out.served_after = served_demand(topology);
  return out;
}

std::vector<PowerLevel> eligible_lower_levels(double consumption_fraction) {
  std::vector<PowerLevel> out;
  for (PowerLevel level : {PowerLevel::L4, PowerLevel::L3, PowerLevel::L2})
    if (cap_fraction(level) < consumption_fraction) out.push_back(level);
  return out;
}

Alg2Outcome alg2_step(Topology& topology, double delta_gap, bool emergency, CentralizedState& state, Rng& rng,
                      const CommandChannel& channel) {
  Alg2Outcome out;
  double gap = delta_gap;
  if (gap <= 0.0) {
    out.converged = true;
    out.remaining_gap = gap;
    return out;
  }

  const std::size_t group_count = topology.groups.size();
  std::vector<std::uint32_t> candidates;
  for (std::size_t visit = 0; visit < group_count && gap > 0.0; ++visit) {
    const auto& group = topology.groups[state.next_group_index % group_count];
    state.next_group_index = (state.next_group_index + 1) % group_count;
    ++out.groups_visited;
    ++out.steps;

    for (auto id : group.home_ids) {
      auto& h = topology.homes[id];
      if (h.aashiyana || h.current_level == PowerLevel::L1 || exempt(h, emergency)) continue;
      gap -= cut_to_l1(h);
    }
    if (gap <= 0.0) break;

    candidates.clear();
    for (auto id : group.home_ids) {
      const auto& h = topology.homes[id];
      if (h.aashiyana && h.current_level != PowerLevel::L1 && !exempt(h, emergency)) candidates.push_back(id);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double ca = current_consumption(topology.homes[a]);
      const double cb = current_consumption(topology.homes[b]);
      if (ca != cb) return ca > cb;
      return a < b;
    });

    for (auto id : candidates) {
      auto& h = topology.homes[id];
      const double before = current_consumption(h);
      auto levels = eligible_lower_levels(before / h.rating());
      std::erase_if(levels, [&](PowerLevel l) { return ordinal(l) >= ordinal(h.current_level); });
      if (levels.empty()) continue;
      const auto pick = levels[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(levels.size()) - 1))];
      if (!command_level(h, pick, channel)) continue;
      ++out.steps;
      gap -= before - current_consumption(h);
      if (gap <= 0.0) break;
    }
  }
  out.converged = gap <= 0.0;
  out.remaining_gap = gap;
  return out;
}

LevelAssignment reset_hourly(Topology& topology) {
  for (auto& h : topology.homes) {
    h.alg1.ls_lh = h.current_level != PowerLevel::L5;
    h.alg1.dlc_done = false;
    h.alg1.sl_init.reset();
    h.current_level = PowerLevel::L5;
  }
  return topology.levels();
}

std::size_t emergency_cutoff(Topology& topology, double capacity, std::size_t& next_group_index) {
  const std::size_t group_count = topology.groups.size();
  double served = served_demand(topology);
  std::size_t cut = 0;
  for (std::size_t k = 0; k < group_count && served > capacity; ++k) {
    const auto& group = topology.groups[next_group_index % group_count];
    next_group_index = (next_group_index + 1) % group_count;
    for (auto id : group.home_ids) served -= cut_to_l1(topology.homes[id]);
    ++cut;
  }
  return cut;
}

}  // namespace stressgrid
