#include "stressgrid/engine.hpp"

#include <cstdio>
#include <string>

#include "stressgrid/error.hpp"

namespace stressgrid {
namespace {

constexpr std::uint64_t kTopologyStream = 100;
constexpr std::uint64_t kConsumptionStream = 101;
constexpr std::uint64_t kPolicyStream = 102;
constexpr std::uint64_t kProtocolStream = 103;

// Escalation ladder within one hour.
enum class Stage { Normal, Emergency, Cutoff, Exhausted };

double served_demand(const Topology& topology) {
  double served = 0.0;
  for (const auto& h : topology.homes) served += current_consumption(h);
  return served;
}

// Appliance i sits on device i / 5, relay i % 5.
ControlFrame frame_for(const Home& home, PowerLevel level, std::size_t devices) {
  std::vector<RelayStates> relays(devices, RelayStates{});
  for (std::size_t i = 0; i < home.hour_draws.size() && i / kRelaysPerDevice < devices; ++i)
    relays[i / kRelaysPerDevice][i % kRelaysPerDevice] =
        home.dm.appliance_count() == 0 ? level != PowerLevel::L1 : home.dm.is_connected(level, i);
  return encode(std::span<const RelayStates>(relays));
}

class HashBuilder {
 public:
  HashBuilder& add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001B3ULL;
    }
    h_ ^= 0xFF;
    h_ *= 0x100000001B3ULL;
    return *this;
  }
  HashBuilder& add(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return add(std::string_view(buf));
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

}  // namespace

std::string_view to_string(TraceEvent::Kind kind) noexcept {
  switch (kind) {
    case TraceEvent::Kind::HourStart: return "hour_start";
    case TraceEvent::Kind::GapDetected: return "gap_detected";
    case TraceEvent::Kind::PolicyRound: return "policy_round";
    case TraceEvent::Kind::Converged: return "converged";
    case TraceEvent::Kind::Emergency: return "emergency";
    case TraceEvent::Kind::HourEnd: return "hour_end";
  }
  return "?";
}

void validate(const SimConfig& c) {
  if (c.horizon_hours < 1) throw ConfigError("experiment.horizon_hours must be at least 1");
  validate(c.topology);
  validate(c.supply);
  validate(c.distributed.dp);
  if (!(c.distributed.reduction_factor > 0.0 && c.distributed.reduction_factor <= 1.0))
    throw ConfigError("policy.reduction_factor must lie in (0, 1]");
  validate(c.utility);
  validate(c.protocol.link);
  try {
    (void)c.protocol.link.prr(c.protocol.distance_m);
  } catch (const Error&) {
    throw ConfigError("protocol.distance_m lies outside the PRR table");
  }
}

std::uint64_t config_hash(const SimConfig& c) {
  HashBuilder h;
  h.add(static_cast<double>(c.horizon_hours));
  const auto& t = c.topology;
  for (auto v : {t.homes, t.feeders, t.grid_stations, t.transformers_per_feeder, t.group_size}) h.add(static_cast<double>(v));
  for (double w : t.class_mix) h.add(w);
  h.add(t.ap);
  h.add(c.supply.mode == SupplyModel::Mode::FixedCapacity ? "fixed" : "gap").add(c.supply.capacity_watts).add(c.supply.gap_fraction);
  h.add(to_string(c.policy));
  h.add(c.distributed.dp.alpha_l4).add(c.distributed.dp.alpha_l3).add(c.distributed.dp.alpha_l2);
  h.add(c.distributed.reduction_factor);
  h.add(c.utility.u_max).add(c.utility.th_u).add(c.utility.th_l);
  h.add(c.protocol.mode == ProtocolConfig::Mode::Full ? "full" : "summary").add(c.protocol.distance_m);
  const auto& l = c.protocol.link;
  for (const auto& [d, p] : l.prr_by_distance) h.add(d).add(p);
  h.add(static_cast<double>(l.retries)).add(l.ack_slot_ms).add(l.base_timeout_ms);
  h.add(l.sw_latency_typical_ms).add(l.sw_latency_worst_ms).add(l.hw_latency_ms).add(static_cast<double>(l.device_count));
  h.add(c.emergency_enabled ? "emergency" : "no-emergency");
  return h.value();
}

int rounds_per_pass(Policy policy, std::size_t group_count) noexcept {
  switch (policy) {
    case Policy::Distributed: return 2 + static_cast<int>(group_count) + 5;
    // A sweep lowers every eligible home at least one level, and L5 -> L2 is
    // three levels, so a fourth sweep could never shed anything.
    case Policy::Centralized: return 3;
    case Policy::Baseline: return 1;
  }
  return 1;
}

bool converged(double served, double capacity) noexcept { return served <= capacity; }

SimResult run(const SimConfig& config, const Corpus& corpus, const SimObserver& observer) {
  validate(config);

  Topology topo = build_topology(config.topology, stream_seed(config.seed, kTopologyStream));
  for (auto& h : topo.homes) {
    const auto& profile = corpus.profile(h.home_class.label);
    h.home_class = profile.home_class;
    h.dm = profile.dm;
  }

  Rng consumption_rng(stream_seed(config.seed, kConsumptionStream));
  Rng policy_rng(stream_seed(config.seed, kPolicyStream));
  Rng protocol_rng(stream_seed(config.seed, kProtocolStream));

  CommandChannel channel;
  const auto& proto = config.protocol;
  if (proto.mode == ProtocolConfig::Mode::Full) {
    channel = [&](const Home& home, PowerLevel level) {
      return deliver(frame_for(home, level, proto.link.device_count), proto.link, proto.distance_m, protocol_rng).acked;
    };
  } else if (const double p = delivery_probability(proto.link, proto.distance_m); p < 1.0) {
    channel = [&protocol_rng, p](const Home&, PowerLevel) { return uniform01(protocol_rng) < p; };
  }

  SimResult result;
  auto& log = result.log;
  log.policy = config.policy;
  log.seed = config.seed;
  log.config_hash = config_hash(config);
  log.gap_fraction = config.supply.mode == SupplyModel::Mode::FractionalGap ? config.supply.gap_fraction : 0.0;
  log.ap = config.topology.ap;
  log.home_count = topo.homes.size();

  BaselineRotation rotation;
  DistributedState dist_state;
  CentralizedState central_state;
  std::size_t cutoff_pointer = 0;
  const int pass_rounds = rounds_per_pass(config.policy, topo.groups.size());

  auto trace = [&](SimClock at, TraceEvent::Kind kind, double d, double served, double capacity, int round) {
    result.trace.push_back({at, kind, d, served, served - capacity, round});
  };

  for (int hour = 0; hour < config.horizon_hours; ++hour) {
    reset_hourly(topo);
    for (auto& h : topo.homes) {
      const auto& profile = corpus.profile(h.home_class.label);
      std::vector<double> draws;
      draws.reserve(profile.appliances.size());
      for (const auto& appliance : profile.appliances) draws.push_back(hourly_draw(appliance.cdf, consumption_rng));
      assign_hour_draws(h, std::move(draws));
    }

    const double d = served_demand(topo);
    const double capacity = config.supply.capacity_for(d);
    const double sl = d > 0.0 ? stress_level(d, capacity) : 0.0;
    double served = d;
    trace({hour, 0}, TraceEvent::Kind::HourStart, d, served, capacity, 0);

    Stage stage = Stage::Normal;
    int rounds = 0;
    int round_in_pass = 0;
    bool emergency = false;
    bool noted_convergence = false;

    for (int second = 0; second < kSecondsPerHour; ++second) {
      const SimClock clock{hour, second};
      if (converged(served, capacity)) {
        if (rounds > 0 && !noted_convergence) trace(clock, TraceEvent::Kind::Converged, d, served, capacity, rounds);
        noted_convergence = true;
        continue;
      }
      if (stage == Stage::Exhausted) continue;
      if (rounds == 0) trace(clock, TraceEvent::Kind::GapDetected, d, served, capacity, 0);

      ++round_in_pass;
      bool pass_failed = false;
      if (stage == Stage::Cutoff) {
        emergency_cutoff(topo, capacity, cutoff_pointer);
      } else {
        switch (config.policy) {
          case Policy::Baseline:
            baseline_step(rotation, topo, capacity);
            break;
          case Policy::Distributed:
            alg1_round(topo, round_in_pass, {sl, emergency}, capacity, config.distributed, dist_state, policy_rng, channel);
            break;
          case Policy::Centralized:
            alg2_step(topo, served_demand(topo) - capacity, emergency, central_state, policy_rng, channel);
            break;
        }
      }
      served = served_demand(topo);
      ++rounds;
      trace(clock, TraceEvent::Kind::PolicyRound, d, served, capacity, rounds);
      if (observer) observer(SimView{clock, topo, capacity, emergency, false});

      pass_failed = !converged(served, capacity) && round_in_pass >= pass_rounds;
      if (pass_failed) {
        round_in_pass = 0;
        if (stage == Stage::Normal && config.emergency_enabled && config.policy != Policy::Baseline) {
          stage = Stage::Emergency;
          emergency = true;
          trace(clock, TraceEvent::Kind::Emergency, d, served, capacity, rounds);
        } else if (stage == Stage::Emergency) {
          stage = Stage::Cutoff;
        } else {
          stage = Stage::Exhausted;
        }
      }
    }

    const SimClock end{hour, kSecondsPerHour - 1};
    if (observer) observer(SimView{end, topo, capacity, emergency, true});
    trace(end, TraceEvent::Kind::HourEnd, d, served, capacity, rounds);

    HourRecord rec;
    rec.hour = hour;
    rec.demand = d;
    rec.capacity = capacity;
    rec.served = served;
    rec.ulw = ulw(capacity, served);
    const auto levels = topo.levels();
    rec.level_counts = count_levels(levels);
    rec.mean_utility = mean_utility(levels, config.utility);
    rec.convergence_seconds = rounds;
    rec.emergency = emergency;
    rec.converged = converged(served, capacity);
    log.hours.push_back(rec);
  }
  return result;
}

}  // namespace stressgrid
