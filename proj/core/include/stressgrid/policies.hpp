#pragma once

// Demand-reduction policies: cyclic group blackout (baseline), the
// distributed stochastic back-off run inside each Aashiyana home, and the
// centralized DISCO-side greedy shedding.
//
// All policies mutate Home::current_level in place and only ever lower it
// within an hour; reset_hourly is the single restoration point.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "stressgrid/home.hpp"
#include "stressgrid/rng.hpp"
#include "stressgrid/topology.hpp"

namespace stressgrid {

/// Share of backing-off homes that should land in L4, L3 and L2. The default
/// sends most of them to the mildest cut.
struct DistributionProfile {
  double alpha_l4 = 0.7;
  double alpha_l3 = 0.2;
  double alpha_l2 = 0.1;
};

/// Throws ConfigError("distribution profile must sum to 1") and friends.
void validate(const DistributionProfile& dp);

struct StressSignal {
  double sl = 0.0;  // percent
  bool emergency = false;
};

/// Decides whether a level-change command reaches the home. Returning false
/// leaves the home at its previous level. An empty function delivers all.
using CommandChannel = std::function<bool(const Home&, PowerLevel)>;

/// Lowers `home` to `level` through `channel`; never raises. Returns true if
/// the level changed.
bool command_level(Home& home, PowerLevel level, const CommandChannel& channel);

// --- baseline ---------------------------------------------------------------

struct BaselineRotation {
  std::size_t next_group_index = 0;
  std::set<std::uint32_t> blacked_out;  // this hour
};

/// Starting from the current assignment, blacks out whole groups (every home
/// to L1) round-robin from next_group_index until served <= capacity, then
/// advances next_group_index by one.
LevelAssignment baseline_step(BaselineRotation& rotation, Topology& topology, double capacity);

// --- distributed ------------------------------------------------------------

/// Runs the per-home stochastic decision for an Aashiyana home. `r` is the
/// home's draw in [1, 100]. Updates home.alg1 and returns the new level, or
/// nullopt if the home keeps its level. Does not modify current_level.
/// Emergency lifts the previous-hour exemption, makes backed-off homes step
/// down regardless of r and allows L2 -> L1.
std::optional<PowerLevel> alg1_home_decision(Home& home, double sl, const DistributionProfile& dp,
                                             bool emergency, int r);

struct DistributedParams {
  DistributionProfile dp;
  double reduction_factor = 0.5;  // sl' = reduction_factor * sl for homes not yet backed off
};

struct DistributedState {
  std::size_t next_group_index = 0;  // round-robin pointer for non-Aashiyana cutoffs
};

struct RoundOutcome {
  double served_before = 0.0;
  double served_after = 0.0;
  std::size_t homes_changed = 0;
};

/// One ping-pong round (one simulated second).
///   round 1:  every Aashiyana home decides with the global stress level.
///   round 2:  non-Aashiyana homes are cut to L1 group by group until the gap
///             closes.
///   round 3+: backed-off homes step down using their initial stress level,
///             the rest decide with reduction_factor * sl.
/// Homes shed in the previous hour sit out unless the signal is an emergency.
RoundOutcome alg1_round(Topology& topology, int round_index, const StressSignal& signal, double capacity,
                        const DistributedParams& params, DistributedState& state, Rng& rng,
                        const CommandChannel& channel = {});

// --- centralized ------------------------------------------------------------

/// Levels among {L4, L3, L2} whose cap lies strictly below the home's
/// current consumption fraction.
std::vector<PowerLevel> eligible_lower_levels(double consumption_fraction);

struct CentralizedState {
  std::size_t next_group_index = 0;
};

struct Alg2Outcome {
  bool converged = false;
  double remaining_gap = 0.0;
  std::size_t steps = 0;  // group selections + home reductions
  std::size_t groups_visited = 0;
};

/// Greedy shedding of `delta_gap` watts. Picks groups round-robin; in each
/// group cuts non-Aashiyana homes first, then walks Aashiyana homes by
/// descending consumption (ties: lower id) dropping each to a uniformly
/// chosen lower level, and stops as soon as the gap is closed. Visits every
/// group at most once; if the gap persists the outcome is not converged.
/// Homes shed in the previous hour are skipped unless emergency. Aashiyana
/// homes never go below L2.
Alg2Outcome alg2_step(Topology& topology, double delta_gap, bool emergency, CentralizedState& state,
                      Rng& rng, const CommandChannel& channel = {});

// --- hour boundary ----------------------------------------------------------

/// Restores every home to L5. ls_lh records which homes ended the hour below
/// L5; dlc_done and sl_init are cleared.
LevelAssignment reset_hourly(Topology& topology);

/// Emergency fallback: cuts whole groups to L1 round-robin until served <=
/// capacity. Always succeeds for capacity >= 0.
std::size_t emergency_cutoff(Topology& topology, double capacity, std::size_t& next_group_index);

}  // namespace stressgrid
