#include "stressgrid/home.hpp"

#include <algorithm>
#include <numeric>

#include "stressgrid/error.hpp"

namespace stressgrid {
namespace {

// Intermediate levels only; index 0 -> L2.
std::size_t mid_index(PowerLevel level) noexcept { return level_index(level) - 1; }

}  // namespace

std::optional<ClassLabel> parse_class_label(std::string_view text) noexcept {
  if (text == "A") return ClassLabel::A;
  if (text == "B") return ClassLabel::B;
  if (text == "C") return ClassLabel::C;
  return std::nullopt;
}

std::string_view to_string(ClassLabel label) noexcept {
  switch (label) {
    case ClassLabel::A: return "A";
    case ClassLabel::B: return "B";
    case ClassLabel::C: return "C";
  }
  return "?";
}

HomeClass standard_class(ClassLabel label) noexcept {
  switch (label) {
    case ClassLabel::A: return {label, 500.0, 7};
    case ClassLabel::B: return {label, 750.0, 10};
    case ClassLabel::C: return {label, 1000.0, 13};
  }
  return {label, 0.0, 0};
}

DisconnectivityMatrix::DisconnectivityMatrix(std::size_t appliance_count,
                                             std::array<std::vector<std::size_t>, 3> disconnected)
    : appliance_count_(appliance_count) {
  for (std::size_t l = 0; l < 3; ++l) {
    connected_[l].assign(appliance_count, true);
    for (std::size_t idx : disconnected[l]) {
      if (idx >= appliance_count) throw Error("disconnectivity matrix index out of range");
      connected_[l][idx] = false;
    }
  }
}

std::vector<std::size_t> DisconnectivityMatrix::disconnected(PowerLevel level) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < appliance_count_; ++i)
    if (!is_connected(level, i)) out.push_back(i);
  return out;
}

bool DisconnectivityMatrix::is_connected(PowerLevel level, std::size_t appliance) const noexcept {
  switch (level) {
    case PowerLevel::L1: return false;
    case PowerLevel::L5: return true;
    default: return connected_[mid_index(level)][appliance];
  }
}

DisconnectivityMatrix build_dm(const HomeClass& home_class, std::span<const double> appliance_ratings) {
  if (appliance_ratings.size() != home_class.appliance_count)
    throw Error("appliance ratings do not match the class appliance count");

  // Largest first; among equals the higher index is switched off first.
  std::vector<std::size_t> order(appliance_ratings.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (appliance_ratings[a] != appliance_ratings[b]) return appliance_ratings[a] > appliance_ratings[b];
    return a > b;
  });

  const double total = std::accumulate(appliance_ratings.begin(), appliance_ratings.end(), 0.0);
  std::array<std::vector<std::size_t>, 3> off;
  for (PowerLevel level : {PowerLevel::L2, PowerLevel::L3, PowerLevel::L4}) {
    const double cap = cap_fraction(level) * home_class.rating_watts;
    double remaining = total;
    auto& list = off[mid_index(level)];
    for (std::size_t idx : order) {
      if (remaining <= cap) break;
      list.push_back(idx);
      remaining -= appliance_ratings[idx];
    }
    std::sort(list.begin(), list.end());
  }
  return DisconnectivityMatrix(appliance_ratings.size(), std::move(off));
}

double consumption(const Home& home, PowerLevel level) noexcept {
  if (level == PowerLevel::L1) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < home.hour_draws.size(); ++i)
    if (home.dm.appliance_count() == 0 || home.dm.is_connected(level, i)) sum += home.hour_draws[i];
  return std::min(sum, cap_fraction(level) * home.rating());
}

void assign_hour_draws(Home& home, std::vector<double> draws) {
  const double sum = std::accumulate(draws.begin(), draws.end(), 0.0);
  if (sum > home.rating() && sum > 0.0) {
    const double scale = home.rating() / sum;
    for (auto& d : draws) d *= scale;
  }
  home.hour_draws = std::move(draws);
}

void validate(const UtilityParams& p) {
  if (!(p.u_max >= p.th_u && p.th_u >= p.th_l && p.th_l >= 0.0))
    throw ConfigError("utility parameters must satisfy u_max >= th_u >= th_l >= 0");
}

double utility(PowerLevel level, const UtilityParams& p) noexcept {
  switch (level) {
    case PowerLevel::L5: return p.u_max;
    case PowerLevel::L4: return p.th_u;
    case PowerLevel::L3: return 0.5 * (p.th_u + p.th_l);
    case PowerLevel::L2: return p.th_l;
    case PowerLevel::L1: return 0.0;
  }
  return 0.0;
}

}  // namespace stressgrid
