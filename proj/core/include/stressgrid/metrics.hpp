#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stressgrid/home.hpp"
#include "stressgrid/topology.hpp"

namespace stressgrid {

enum class Policy { Baseline, Distributed, Centralized };

std::string_view to_string(Policy policy) noexcept;
std::optional<Policy> parse_policy(std::string_view text) noexcept;

using LevelCounts = std::array<std::size_t, 5>;      // indexed by level_index
using LevelFractions = std::array<double, 5>;

/// State of one hour after the policy has converged (or given up).
struct HourRecord {
  int hour = 0;
  double demand = 0.0;    // unconstrained D
  double capacity = 0.0;
  double served = 0.0;
  double ulw = 0.0;
  LevelCounts level_counts{};
  double mean_utility = 0.0;
  int convergence_seconds = 0;  // policy rounds spent this hour
  bool emergency = false;
  bool converged = true;
};

struct MetricsLog {
  Policy policy = Policy::Baseline;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  double gap_fraction = 0.0;
  double ap = 0.0;
  std::size_t home_count = 0;
  std::vector<HourRecord> hours;
};

/// Capacity left unused: max(0, capacity - served).
double ulw(double capacity, double served) noexcept;

/// Percent decrease of a level's share versus the baseline; 0 when the
/// baseline share is 0.
double fractional_decrease(double baseline_fraction, double algo_fraction) noexcept;

/// Social comfort index: |dec_L1 - dec_L5| in percentage points.
double sci(const LevelFractions& baseline, const LevelFractions& algo) noexcept;

LevelFractions level_distribution(const LevelAssignment& assignment);
LevelFractions level_distribution(const LevelCounts& counts);
LevelCounts count_levels(const LevelAssignment& assignment);

double mean_utility(const LevelAssignment& assignment, const UtilityParams& params);

/// Day aggregates of one run.
struct RunSummary {
  double ulw_total = 0.0;
  double served_total = 0.0;
  double capacity_total = 0.0;
  LevelFractions fractions{};  // mean over hours of the per-hour fractions
  double mean_utility = 0.0;   // mean over hours
  int emergency_hours = 0;
  int max_convergence_seconds = 0;
};

RunSummary summarize(const MetricsLog& log);

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
  std::size_t n = 0;
};

Stat aggregate(std::span<const double> values);

/// Formats with 6 significant digits ("%.6g").
std::string format_number(double value);

/// Writes, under out_dir:
///   run_<policy>_<gap>_<ap>_<run>.csv   hourly records per run
///   summary_<policy>_<gap>_<ap>.csv     mean/stddev over runs per metric
///   plot_<policy>_<metric>.csv          gap x AP matrices of dec_L1, dec_L5,
///                                       sci (needs baseline logs) and ulw
/// Logs of one cell share (policy, gap, ap); run order follows input order.
/// Throws IoError if out_dir cannot be created or written.
void write_report(std::span<const MetricsLog> logs, const std::filesystem::path& out_dir);

/// Cell tag used in file names, e.g. "distributed_0.2_0.9".
std::string cell_tag(Policy policy, double gap_fraction, double ap);

}  // namespace stressgrid
