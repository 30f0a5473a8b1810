#include "stressgrid/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "stressgrid/error.hpp"

namespace stressgrid {
namespace {

constexpr std::uint8_t kRelayMask = 0x1F;

std::uint8_t pack(const RelayStates& relays) {
  std::uint8_t byte = 0;
  for (std::size_t bit = 0; bit < kRelaysPerDevice; ++bit)
    if (relays[bit]) byte |= static_cast<std::uint8_t>(1u << bit);
  return byte;
}

}  // namespace

ControlFrame encode(std::span<const RelayStates> relays_per_device) {
  ControlFrame frame;
  frame.bytes.reserve(relays_per_device.size());
  for (const auto& relays : relays_per_device) frame.bytes.push_back(pack(relays));
  return frame;
}

ControlFrame encode(std::span<const std::vector<bool>> relays_per_device) {
  std::vector<RelayStates> fixed;
  fixed.reserve(relays_per_device.size());
  for (const auto& relays : relays_per_device) {
    if (relays.size() != kRelaysPerDevice) throw Error("each device carries exactly five relay states");
    RelayStates s{};
    std::copy(relays.begin(), relays.end(), s.begin());
    fixed.push_back(s);
  }
  return encode(std::span<const RelayStates>(fixed));
}

RelayStates decode(const ControlFrame& frame, std::size_t device_id) {
  if (device_id < 1 || device_id > frame.bytes.size()) throw Error("device id outside frame");
  const std::uint8_t byte = frame.bytes[device_id - 1];
  if (byte & ~kRelayMask) throw Error("frame byte uses bits above relay 4");
  RelayStates out{};
  for (std::size_t bit = 0; bit < kRelaysPerDevice; ++bit) out[bit] = (byte >> bit) & 1u;
  return out;
}

double LinkModel::prr(double distance_m) const {
  if (prr_by_distance.empty()) throw Error("link model has no PRR table");
  const auto first = prr_by_distance.begin();
  const auto last = std::prev(prr_by_distance.end());
  if (distance_m < first->first || distance_m > last->first)
    throw Error("distance outside the PRR table");
  const auto hi = prr_by_distance.lower_bound(distance_m);
  if (hi->first == distance_m) return hi->second;
  const auto lo = std::prev(hi);
  const double t = (distance_m - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double LinkModel::timeout_ms() const noexcept {
  return std::max(base_timeout_ms, static_cast<double>(device_count) * ack_slot_ms);
}

void validate(const LinkModel& link) {
  if (link.prr_by_distance.empty()) throw ConfigError("protocol.prr table must not be empty");
  for (const auto& [d, p] : link.prr_by_distance)
    if (!(d >= 0.0) || !(p >= 0.0 && p <= 1.0)) throw ConfigError("protocol.prr entries need distance >= 0 and prr in [0, 1]");
  if (link.retries < 0) throw ConfigError("protocol.retries must be nonnegative");
  for (double v : {link.ack_slot_ms, link.base_timeout_ms, link.sw_latency_typical_ms, link.sw_latency_worst_ms,
                   link.hw_latency_ms})
    if (!(v >= 0.0)) throw ConfigError("protocol latencies must be nonnegative");
}

double ack_slot(std::size_t device_id, double slot_ms) {
  if (device_id < 1) throw Error("device ids start at 1");
  return static_cast<double>(device_id - 1) * slot_ms;
}

Delivery deliver(const ControlFrame& frame, const LinkModel& link, double distance_m, Rng& rng, SoftwarePath path) {
  (void)frame;  // payload content does not affect loss
  const double p = link.prr(distance_m);
  const double sw = path == SoftwarePath::Typical ? link.sw_latency_typical_ms : link.sw_latency_worst_ms;
  Delivery out;
  for (int attempt = 1; attempt <= 1 + link.retries; ++attempt) {
    out.attempts = attempt;
    const bool command_ok = uniform01(rng) < p;
    const bool ack_ok = uniform01(rng) < p;
    if (command_ok && ack_ok) {
      out.acked = true;
      out.latency_ms += sw + link.hw_latency_ms;
      return out;
    }
    out.latency_ms += link.timeout_ms();
  }
  return out;
}

double delivery_probability(const LinkModel& link, double distance_m) {
  const double p = link.prr(distance_m);
  return 1.0 - std::pow(1.0 - p * p, 1 + link.retries);
}

DeviceProfile device_profile(DeviceKind kind) noexcept {
  return kind == DeviceKind::MBD ? DeviceProfile{kind, 0.36, 0.10} : DeviceProfile{kind, 0.40, 0.10};
}

double overhead_power(std::size_t rooms, bool shed) {
  if (rooms < 1) throw Error("a home has at least one room");
  const auto sbd = device_profile(DeviceKind::SBD);
  const auto mbd = device_profile(DeviceKind::MBD);
  return shed ? static_cast<double>(rooms) * sbd.power_shed_w + mbd.power_shed_w
              : static_cast<double>(rooms) * sbd.power_active_w + mbd.power_active_w;
}

}  // namespace stressgrid
