#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stressgrid/power_level.hpp"

namespace stressgrid {

enum class ClassLabel : std::uint8_t { A, B, C };

constexpr std::size_t class_index(ClassLabel label) noexcept { return static_cast<std::size_t>(label); }
std::optional<ClassLabel> parse_class_label(std::string_view text) noexcept;
std::string_view to_string(ClassLabel label) noexcept;

struct HomeClass {
  ClassLabel label;
  double rating_watts;
  std::size_t appliance_count;
};

/// Meter ratings 500/750/1000 W with 7/10/13 appliances.
HomeClass standard_class(ClassLabel label) noexcept;

/// Appliances disconnected at each intermediate level. L5 disconnects nothing
/// and L1 disconnects everything; neither is stored.
class DisconnectivityMatrix {
 public:
  DisconnectivityMatrix() = default;
  DisconnectivityMatrix(std::size_t appliance_count, std::array<std::vector<std::size_t>, 3> disconnected);

  std::size_t appliance_count() const noexcept { return appliance_count_; }

  /// Sorted appliance indices switched off at `level`.
  std::vector<std::size_t> disconnected(PowerLevel level) const;
  bool is_connected(PowerLevel level, std::size_t appliance) const noexcept;

  friend bool operator==(const DisconnectivityMatrix&, const DisconnectivityMatrix&) = default;

 private:
  std::size_t appliance_count_ = 0;
  // Indexed L2, L3, L4; true = connected.
  std::array<std::vector<bool>, 3> connected_;
};

/// Greedy stand-in for user configuration: for each intermediate level,
/// switch off the largest-rated appliances first until the remaining rated
/// sum fits the level cap. Equal ratings: the higher index goes first.
DisconnectivityMatrix build_dm(const HomeClass& home_class, std::span<const double> appliance_ratings);

/// Per-hour bookkeeping of the distributed algorithm.
struct Alg1State {
  std::optional<double> sl_init;
  bool dlc_done = false;
  bool ls_lh = false;  // ended the previous hour below L5
};

struct Home {
  std::uint32_t id = 0;
  HomeClass home_class{};
  bool aashiyana = false;
  std::uint32_t feeder_id = 0;
  std::uint32_t transformer_id = 0;
  PowerLevel current_level = PowerLevel::L5;
  std::vector<double> hour_draws;  // per appliance, watts; sum <= rating
  DisconnectivityMatrix dm;
  Alg1State alg1;

  double rating() const noexcept { return home_class.rating_watts; }
};

/// Draw of the appliances left connected at `level`, bounded by the level
/// budget cap_fraction(level) * rating.
double consumption(const Home& home, PowerLevel level) noexcept;

/// consumption at the home's current level.
inline double current_consumption(const Home& home) noexcept { return consumption(home, home.current_level); }

/// Scales draws down proportionally when their sum exceeds the rating.
void assign_hour_draws(Home& home, std::vector<double> draws);

struct UtilityParams {
  double u_max = 1.0;
  double th_u = 0.6;
  double th_l = 0.4;
};

/// Throws ConfigError unless u_max >= th_u >= th_l >= 0.
void validate(const UtilityParams& params);

/// L5 -> u_max, L4 -> th_u, L3 -> midpoint, L2 -> th_l, L1 -> 0.
double utility(PowerLevel level, const UtilityParams& params) noexcept;

}  // namespace stressgrid
