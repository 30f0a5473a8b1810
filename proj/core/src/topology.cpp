#include "stressgrid/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stressgrid/error.hpp"
#include "stressgrid/rng.hpp"

namespace stressgrid {
namespace {

constexpr std::uint64_t kClassStream = 0;
constexpr std::uint64_t kAashiyanaStream = 1;

// Largest-remainder apportionment of `total` items over `weights`.
std::array<std::size_t, 3> apportion(std::size_t total, const std::array<double, 3>& weights) {
  const double sum = weights[0] + weights[1] + weights[2];
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % 3]];
  return counts;
}

}  // namespace

void validate(const TopologyConfig& c) {
  if (c.homes == 0) throw ConfigError("topology.homes must be positive");
  if (c.feeders == 0) throw ConfigError("topology.feeders must be positive");
  if (c.grid_stations == 0) throw ConfigError("topology.grid_stations must be positive");
  if (c.transformers_per_feeder == 0) throw ConfigError("topology.transformers_per_feeder must be positive");
  if (c.group_size == 0) throw ConfigError("topology.group_size must be positive");
  if (std::any_of(c.class_mix.begin(), c.class_mix.end(), [](double w) { return !(w >= 0.0); }) ||
      c.class_mix[0] + c.class_mix[1] + c.class_mix[2] <= 0.0)
    throw ConfigError("topology.class_mix weights must be nonnegative with a positive sum");
  if (!(c.ap >= 0.0 && c.ap <= 1.0)) throw ConfigError("ap must lie in [0, 1]");
}

LevelAssignment Topology::levels() const {
  LevelAssignment out;
  out.reserve(homes.size());
  for (const auto& h : homes) out.push_back(h.current_level);
  return out;
}

void Topology::apply(const LevelAssignment& assignment) {
  if (assignment.size() != homes.size()) throw Error("assignment does not cover every home");
  for (std::size_t i = 0; i < homes.size(); ++i) homes[i].current_level = assignment[i];
}

const FeederGroup& Topology::group_of_home(std::uint32_t home_id) const {
  return groups.at(feeders.at(homes.at(home_id).feeder_id).group);
}

Topology build_topology(const TopologyConfig& config, std::uint64_t seed) {
  validate(config);
  Topology topo;
  topo.grid_stations = config.grid_stations;

  const std::size_t group_count = (config.feeders + config.group_size - 1) / config.group_size;
  topo.groups.resize(group_count);
  for (std::size_t g = 0; g < group_count; ++g) topo.groups[g].id = static_cast<std::uint32_t>(g);

  topo.feeders.reserve(config.feeders);
  for (std::size_t f = 0; f < config.feeders; ++f) {
    const auto group = static_cast<std::uint32_t>(f / config.group_size);
    topo.feeders.push_back({static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(f % config.grid_stations), group});
    topo.groups[group].feeder_ids.push_back(static_cast<std::uint32_t>(f));
  }

  const std::size_t transformer_count = config.feeders * config.transformers_per_feeder;
  topo.transformers.reserve(transformer_count);
  for (std::size_t t = 0; t < transformer_count; ++t)
    topo.transformers.push_back({static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t % config.feeders)});

  const auto counts = apportion(config.homes, config.class_mix);
  std::vector<ClassLabel> labels;
  labels.reserve(config.homes);
  for (std::size_t c = 0; c < 3; ++c) labels.insert(labels.end(), counts[c], static_cast<ClassLabel>(c));
  Rng class_rng(stream_seed(seed, kClassStream));
  shuffle(std::span(labels), class_rng);

  std::vector<std::uint32_t> permutation(config.homes);
  std::iota(permutation.begin(), permutation.end(), 0u);
  Rng ap_rng(stream_seed(seed, kAashiyanaStream));
  shuffle(std::span(permutation), ap_rng);
  const auto aashiyana_count = static_cast<std::size_t>(std::llround(config.ap * static_cast<double>(config.homes)));

  topo.homes.resize(config.homes);
  for (std::size_t i = 0; i < config.homes; ++i) {
    auto& h = topo.homes[i];
    h.id = static_cast<std::uint32_t>(i);
    h.home_class = standard_class(labels[i]);
    h.transformer_id = static_cast<std::uint32_t>(i % transformer_count);
    h.feeder_id = topo.transformers[h.transformer_id].feeder;
  }
  for (std::size_t k = 0; k < aashiyana_count; ++k) topo.homes[permutation[k]].aashiyana = true;

  for (const auto& h : topo.homes) topo.groups[topo.feeders[h.feeder_id].group].home_ids.push_back(h.id);
  return topo;
}

Demand demand(const Topology& topology) {
  Demand d;
  for (const auto& h : topology.homes) {
    d.unconstrained += consumption(h, PowerLevel::L5);
    d.served += current_consumption(h);
  }
  return d;
}

Demand demand(const Topology& topology, const LevelAssignment& assignment) {
  if (assignment.size() != topology.homes.size()) throw Error("assignment does not cover every home");
  Demand d;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    d.unconstrained += consumption(topology.homes[i], PowerLevel::L5);
    d.served += consumption(topology.homes[i], assignment[i]);
  }
  return d;
}

double stress_level(double demand_watts, double supply_watts) {
  if (!(demand_watts > 0.0)) throw Error("stress level needs positive demand");
  return std::max(0.0, 100.0 * (demand_watts - supply_watts) / demand_watts);
}

double SupplyModel::capacity_for(double unconstrained_demand) const noexcept {
  return mode == Mode::FixedCapacity ? capacity_watts : (1.0 - gap_fraction) * unconstrained_demand;
}

void validate(const SupplyModel& s) {
  if (s.mode == SupplyModel::Mode::FixedCapacity && !(s.capacity_watts >= 0.0))
    throw ConfigError("supply.capacity_w must be nonnegative");
  if (s.mode == SupplyModel::Mode::FractionalGap && !(s.gap_fraction >= 0.0 && s.gap_fraction < 1.0))
    throw ConfigError("supply gap must lie in [0, 1)");
}

}  // namespace stressgrid
