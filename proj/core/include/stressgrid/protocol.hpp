#pragma once

// In-home control plane: the broadcast relay frame, time-slotted acks, the
// retry loop over a lossy link, and the controllers' own power draw.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "stressgrid/rng.hpp"

namespace stressgrid {

inline constexpr std::size_t kRelaysPerDevice = 5;

using RelayStates = std::array<bool, kRelaysPerDevice>;

/// One byte per device (device id i lives at byte i-1). Bits 0..4 are relay
/// states, set = conducting; bits 5..7 are always zero.
struct ControlFrame {
  std::vector<std::uint8_t> bytes;

  std::size_t device_count() const noexcept { return bytes.size(); }
  friend bool operator==(const ControlFrame&, const ControlFrame&) = default;
};

/// Each inner list must hold exactly five entries.
ControlFrame encode(std::span<const std::vector<bool>> relays_per_device);
ControlFrame encode(std::span<const RelayStates> relays_per_device);

/// Relay states for `device_id` (1-based).
RelayStates decode(const ControlFrame& frame, std::size_t device_id);

struct LinkModel {
  std::map<double, double> prr_by_distance{{10.0, 1.00}, {25.0, 0.98}, {50.0, 0.50}};
  int retries = 3;
  double ack_slot_ms = 5.0;
  double base_timeout_ms = 21.0;
  double sw_latency_typical_ms = 2.0;
  double sw_latency_worst_ms = 5.0;  // 28 + 5 = the 33 ms measured total
  double hw_latency_ms = 28.0;
  std::size_t device_count = 5;  // devices acking per frame

  /// Linear interpolation over the table; distances outside it are an error.
  double prr(double distance_m) const;
  /// Base-station wait per attempt: max(base timeout, device_count ack slots).
  double timeout_ms() const noexcept;
};

void validate(const LinkModel& link);

/// Ack offset for a device: (id - 1) * slot width.
double ack_slot(std::size_t device_id, double slot_ms = 5.0);

struct Delivery {
  bool acked = false;
  int attempts = 0;
  double latency_ms = 0.0;  // time until relays switched, or until nack
};

enum class SoftwarePath { Typical, Worst };

/// Sends one frame: each attempt succeeds iff both the command and its ack
/// get through (independent, each with the distance's PRR). Failed attempts
/// cost one timeout each; success adds software + hardware latency.
Delivery deliver(const ControlFrame& frame, const LinkModel& link, double distance_m, Rng& rng,
                 SoftwarePath path = SoftwarePath::Typical);

/// Closed form of deliver's success probability: 1 - (1 - prr^2)^(1 + retries).
double delivery_probability(const LinkModel& link, double distance_m);

enum class DeviceKind { MBD, SBD };

struct DeviceProfile {
  DeviceKind kind;
  double power_active_w;
  double power_shed_w;
};

DeviceProfile device_profile(DeviceKind kind) noexcept;

/// One SBD per room plus one MBD, all active or all shed.
double overhead_power(std::size_t rooms, bool shed);

}  // namespace stressgrid
