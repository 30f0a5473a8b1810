#pragma once

// DISCO -> grid station -> feeder -> transformer -> home tree, the feeder
// groups that are shed as a unit, and supply/demand accounting.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "stressgrid/home.hpp"
#include "stressgrid/power_level.hpp"

namespace stressgrid {

struct TopologyConfig {
  std::size_t homes = 1000;
  std::size_t feeders = 50;
  std::size_t grid_stations = 5;
  std::size_t transformers_per_feeder = 4;
  std::size_t group_size = 10;
  std::array<double, 3> class_mix{1.0, 1.0, 1.0};  // relative weights A, B, C
  double ap = 0.0;                                 // Aashiyana penetration
};

void validate(const TopologyConfig& config);

struct Feeder {
  std::uint32_t id;
  std::uint32_t grid_station;
  std::uint32_t group;
};

struct Transformer {
  std::uint32_t id;
  std::uint32_t feeder;
};

struct FeederGroup {
  std::uint32_t id;
  std::vector<std::uint32_t> feeder_ids;
  std::vector<std::uint32_t> home_ids;  // ascending
};

/// Per-home level snapshot, indexed by home id.
using LevelAssignment = std::vector<PowerLevel>;

struct Topology {
  std::size_t grid_stations = 0;
  std::vector<Feeder> feeders;
  std::vector<Transformer> transformers;
  std::vector<Home> homes;  // homes[i].id == i
  std::vector<FeederGroup> groups;

  LevelAssignment levels() const;
  void apply(const LevelAssignment& assignment);
  const FeederGroup& group_of_home(std::uint32_t home_id) const;
};

/// Deterministic given (config, seed). Class labels are dealt by exact quota
/// (largest remainder) and shuffled; exactly round(ap * homes) homes are
/// Aashiyana, taken as a prefix of a seeded permutation so the Aashiyana set
/// at a lower AP is a subset of the set at a higher AP. Homes are placed
/// round-robin onto transformers, transformers onto feeders, feeders onto
/// grid stations. Feeders [g*group_size, (g+1)*group_size) form group g.
Topology build_topology(const TopologyConfig& config, std::uint64_t seed);

struct Demand {
  double unconstrained = 0.0;  // every home at L5
  double served = 0.0;         // every home at its assigned level
};

Demand demand(const Topology& topology);
Demand demand(const Topology& topology, const LevelAssignment& assignment);

/// Percent of demand unmet: 100 * (D - S) / D, floored at 0. D must be > 0.
double stress_level(double demand_watts, double supply_watts);

struct SupplyModel {
  enum class Mode { FixedCapacity, FractionalGap };
  Mode mode = Mode::FractionalGap;
  double capacity_watts = 0.0;
  double gap_fraction = 0.2;

  /// Capacity available for an hour whose unconstrained demand is D.
  double capacity_for(double unconstrained_demand) const noexcept;
};

void validate(const SupplyModel& supply);

}  // namespace stressgrid
