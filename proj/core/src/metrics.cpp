#include "stressgrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "stressgrid/error.hpp"

namespace stressgrid {
namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

// Metric columns of the per-run day summary, in file order.
struct DayMetric {
  const char* name;
  double (*get)(const RunSummary&);
};

constexpr DayMetric kDayMetrics[] = {
    {"ulw_total_w", [](const RunSummary& s) { return s.ulw_total; }},
    {"served_total_w", [](const RunSummary& s) { return s.served_total; }},
    {"capacity_total_w", [](const RunSummary& s) { return s.capacity_total; }},
    {"frac_L1", [](const RunSummary& s) { return s.fractions[0]; }},
    {"frac_L2", [](const RunSummary& s) { return s.fractions[1]; }},
    {"frac_L3", [](const RunSummary& s) { return s.fractions[2]; }},
    {"frac_L4", [](const RunSummary& s) { return s.fractions[3]; }},
    {"frac_L5", [](const RunSummary& s) { return s.fractions[4]; }},
    {"mean_utility", [](const RunSummary& s) { return s.mean_utility; }},
    {"emergency_hours", [](const RunSummary& s) { return static_cast<double>(s.emergency_hours); }},
    {"max_convergence_s", [](const RunSummary& s) { return static_cast<double>(s.max_convergence_seconds); }},
};

using CellKey = std::tuple<Policy, double, double>;

}  // namespace

std::string_view to_string(Policy policy) noexcept {
  switch (policy) {
    case Policy::Baseline: return "baseline";
    case Policy::Distributed: return "distributed";
    case Policy::Centralized: return "centralized";
  }
  return "?";
}

std::optional<Policy> parse_policy(std::string_view text) noexcept {
  if (text == "baseline") return Policy::Baseline;
  if (text == "distributed") return Policy::Distributed;
  if (text == "centralized") return Policy::Centralized;
  return std::nullopt;
}

double ulw(double capacity, double served) noexcept { return std::max(0.0, capacity - served); }

double fractional_decrease(double baseline_fraction, double algo_fraction) noexcept {
  if (baseline_fraction == 0.0) return 0.0;
  return 100.0 * (baseline_fraction - algo_fraction) / baseline_fraction;
}

double sci(const LevelFractions& baseline, const LevelFractions& algo) noexcept {
  const auto l1 = level_index(PowerLevel::L1);
  const auto l5 = level_index(PowerLevel::L5);
  return std::abs(fractional_decrease(baseline[l1], algo[l1]) - fractional_decrease(baseline[l5], algo[l5]));
}

LevelCounts count_levels(const LevelAssignment& assignment) {
  LevelCounts counts{};
  for (auto level : assignment) ++counts[level_index(level)];
  return counts;
}

LevelFractions level_distribution(const LevelCounts& counts) {
  const auto total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) throw Error("level distribution of an empty home set");
  LevelFractions out{};
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return out;
}

LevelFractions level_distribution(const LevelAssignment& assignment) {
  return level_distribution(count_levels(assignment));
}

double mean_utility(const LevelAssignment& assignment, const UtilityParams& params) {
  if (assignment.empty()) throw Error("mean utility of an empty home set");
  double sum = 0.0;
  for (auto level : assignment) sum += utility(level, params);
  return sum / static_cast<double>(assignment.size());
}

RunSummary summarize(const MetricsLog& log) {
  RunSummary s;
  if (log.hours.empty()) return s;
  for (const auto& h : log.hours) {
    s.ulw_total += h.ulw;
    s.served_total += h.served;
    s.capacity_total += h.capacity;
    const auto f = level_distribution(h.level_counts);
    for (std::size_t i = 0; i < f.size(); ++i) s.fractions[i] += f[i];
    s.mean_utility += h.mean_utility;
    s.emergency_hours += h.emergency ? 1 : 0;
    s.max_convergence_seconds = std::max(s.max_convergence_seconds, h.convergence_seconds);
  }
  const auto n = static_cast<double>(log.hours.size());
  for (auto& f : s.fractions) f /= n;
  s.mean_utility /= n;
  return s;
}

Stat aggregate(std::span<const double> values) {
  Stat s;
  s.n = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string cell_tag(Policy policy, double gap_fraction, double ap) {
  return std::string(to_string(policy)) + "_" + format_number(gap_fraction) + "_" + format_number(ap);
}

void write_report(std::span<const MetricsLog> logs, const fs::path& out_dir) {
  if (logs.empty()) throw Error("no metrics logs to report");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());

  std::map<CellKey, std::vector<const MetricsLog*>> cells;
  for (const auto& log : logs) cells[{log.policy, log.gap_fraction, log.ap}].push_back(&log);

  for (const auto& [key, runs] : cells) {
    const auto [policy, gap, ap] = key;
    const auto tag = cell_tag(policy, gap, ap);

    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto path = out_dir / ("run_" + tag + "_" + std::to_string(r) + ".csv");
      auto out = open_output(path);
      out << "hour,demand_w,capacity_w,served_w,ulw_w,L1,L2,L3,L4,L5,mean_utility,convergence_s,emergency,converged\n";
      for (const auto& h : runs[r]->hours) {
        out << h.hour << ',' << format_number(h.demand) << ',' << format_number(h.capacity) << ','
            << format_number(h.served) << ',' << format_number(h.ulw);
        for (auto c : h.level_counts) out << ',' << c;
        out << ',' << format_number(h.mean_utility) << ',' << h.convergence_seconds << ',' << (h.emergency ? 1 : 0)
            << ',' << (h.converged ? 1 : 0) << '\n';
      }
      close_checked(out, path);
    }

    std::vector<RunSummary> summaries;
    for (const auto* log : runs) summaries.push_back(summarize(*log));
    const auto path = out_dir / ("summary_" + tag + ".csv");
    auto out = open_output(path);
    out << "metric,n,mean,stddev\n";
    for (const auto& metric : kDayMetrics) {
      std::vector<double> values;
      for (const auto& s : summaries) values.push_back(metric.get(s));
      const auto st = aggregate(values);
      out << metric.name << ',' << st.n << ',' << format_number(st.mean) << ',' << format_number(st.stddev) << '\n';
    }
    close_checked(out, path);
  }

  // Plot matrices: rows = gap, columns = AP. Decreases are measured against
  // the baseline cell with the same gap (baseline ignores AP; the first AP
  // present is used), on day-aggregated fractions averaged over runs.
  std::set<double> gaps;
  std::set<double> aps;
  std::set<Policy> policies;
  std::map<CellKey, LevelFractions> mean_fractions;
  std::map<CellKey, double> mean_ulw;
  for (const auto& [key, runs] : cells) {
    gaps.insert(std::get<1>(key));
    aps.insert(std::get<2>(key));
    policies.insert(std::get<0>(key));
    LevelFractions acc{};
    double ulw_acc = 0.0;
    for (const auto* log : runs) {
      const auto s = summarize(*log);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s.fractions[i];
      ulw_acc += s.ulw_total;
    }
    for (auto& f : acc) f /= static_cast<double>(runs.size());
    mean_fractions[key] = acc;
    mean_ulw[key] = ulw_acc / static_cast<double>(runs.size());
  }

  auto baseline_for = [&](double gap) -> std::optional<LevelFractions> {
    for (double ap : aps)
      if (auto it = mean_fractions.find({Policy::Baseline, gap, ap}); it != mean_fractions.end()) return it->second;
    return std::nullopt;
  };

  auto write_matrix = [&](Policy policy, const std::string& metric, auto value_of) {
    const auto path = out_dir / ("plot_" + std::string(to_string(policy)) + "_" + metric + ".csv");
    auto out = open_output(path);
    out << "gap";
    for (double ap : aps) out << ",ap_" << format_number(ap);
    out << '\n';
    for (double gap : gaps) {
      out << format_number(gap);
      for (double ap : aps) {
        const auto v = value_of(CellKey{policy, gap, ap});
        out << ',' << (v ? format_number(*v) : std::string("NA"));
      }
      out << '\n';
    }
    close_checked(out, path);
  };

  for (Policy policy : policies) {
    write_matrix(policy, "ulw", [&](const CellKey& k) -> std::optional<double> {
      if (auto it = mean_ulw.find(k); it != mean_ulw.end()) return it->second;
      return std::nullopt;
    });
    auto decrease = [&](PowerLevel level) {
      return [&, level](const CellKey& k) -> std::optional<double> {
        const auto it = mean_fractions.find(k);
        const auto base = baseline_for(std::get<1>(k));
        if (it == mean_fractions.end() || !base) return std::nullopt;
        return fractional_decrease((*base)[level_index(level)], it->second[level_index(level)]);
      };
    };
    if (policies.count(Policy::Baseline) == 0) continue;
    write_matrix(policy, "dec_L1", decrease(PowerLevel::L1));
    write_matrix(policy, "dec_L5", decrease(PowerLevel::L5));
    write_matrix(policy, "sci", [&](const CellKey& k) -> std::optional<double> {
      const auto it = mean_fractions.find(k);
      const auto base = baseline_for(std::get<1>(k));
      if (it == mean_fractions.end() || !base) return std::nullopt;
      return sci(*base, it->second);
    });
  }
}

}  // namespace stressgrid
