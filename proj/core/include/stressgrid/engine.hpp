#pragma once

// Second-granularity simulation loop. Each hour: fresh appliance draws,
// hourly reset, capacity from the supply model; each second: if served
// demand exceeds capacity, one policy round.

#include <cstdint>
#include <functional>
#include <vector>

#include "stressgrid/corpus.hpp"
#include "stressgrid/metrics.hpp"
#include "stressgrid/policies.hpp"
#include "stressgrid/protocol.hpp"
#include "stressgrid/topology.hpp"

namespace stressgrid {

struct ProtocolConfig {
  enum class Mode { Summary, Full };
  Mode mode = Mode::Summary;
  double distance_m = 10.0;
  LinkModel link;
};

struct SimConfig {
  int horizon_hours = 24;
  TopologyConfig topology;
  SupplyModel supply;
  Policy policy = Policy::Baseline;
  DistributedParams distributed;
  UtilityParams utility;
  ProtocolConfig protocol;
  bool emergency_enabled = true;
  std::uint64_t seed = 1;
};

void validate(const SimConfig& config);

/// Stable hash of every field that influences a run except the seed.
std::uint64_t config_hash(const SimConfig& config);

struct SimClock {
  int hour = 0;
  int second = 0;  // 0..3599
};

struct TraceEvent {
  enum class Kind { HourStart, GapDetected, PolicyRound, Converged, Emergency, HourEnd };
  SimClock at;
  Kind kind;
  double demand = 0.0;
  double served = 0.0;
  double gap = 0.0;  // served - capacity
  int round = 0;
};

std::string_view to_string(TraceEvent::Kind kind) noexcept;

/// Snapshot handed to observers after each policy round and at hour end.
struct SimView {
  SimClock clock;
  const Topology& topology;
  double capacity;
  bool emergency;
  bool hour_end;
};

using SimObserver = std::function<void(const SimView&)>;

struct SimResult {
  MetricsLog log;
  std::vector<TraceEvent> trace;
};

inline constexpr int kSecondsPerHour = 3600;

/// Policy rounds allowed per ping-pong pass before escalating.
int rounds_per_pass(Policy policy, std::size_t group_count) noexcept;

/// Deterministic in (config, corpus). Hours that stay above capacity after
/// every escalation are logged with converged = false.
SimResult run(const SimConfig& config, const Corpus& corpus, const SimObserver& observer = {});

bool converged(double served, double capacity) noexcept;

}  // namespace stressgrid
