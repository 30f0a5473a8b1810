#include "stressgrid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "stressgrid/error.hpp"

namespace stressgrid {
namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) fail(key, "expected a number, got '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    fail(key, "expected a nonnegative integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  fail(key, "expected true or false, got '" + text + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
  if (out.empty()) fail(key, "list must not be empty");
  return out;
}

// Lists given in percent (any entry above 1) are converted to fractions.
std::vector<double> to_fractions(const std::string& key, const std::string& text) {
  auto values = to_doubles(key, text);
  if (std::any_of(values.begin(), values.end(), [](double v) { return v > 1.0; }))
    for (auto& v : values) v /= 100.0;
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0)) fail(key, "values must lie in [0, 1] or [0, 100] percent");
  return values;
}

using Handler = void (*)(ExperimentSpec&, const std::string& key, const std::string& value, const fs::path& base_dir);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"experiment.seed", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) { s.base.seed = to_uint(k, v); }},
      {"experiment.runs", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         const auto n = to_uint(k, v);
         if (n < 1) fail(k, "must be at least 1");
         s.runs = static_cast<int>(n);
       }},
      {"experiment.out", [](ExperimentSpec& s, const std::string&, const std::string& v, const fs::path& base) {
         s.out_dir = fs::path(v).is_absolute() ? fs::path(v) : base / v;
       }},
      {"experiment.policies", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.policies.clear();
         for (const auto& item : split(v, ',')) {
           const auto p = parse_policy(item);
           if (!p) fail(k, "unknown policy '" + item + "'");
           s.policies.push_back(*p);
         }
       }},
      {"experiment.gaps", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.gaps = to_fractions(k, v);
         for (double g : s.gaps)
           if (g >= 1.0) fail(k, "gap must be below 100%");
       }},
      {"experiment.aps", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) { s.aps = to_fractions(k, v); }},
      {"experiment.horizon_hours", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.horizon_hours = static_cast<int>(to_uint(k, v));
       }},
      {"topology.homes", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) { s.base.topology.homes = to_uint(k, v); }},
      {"topology.feeders", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) { s.base.topology.feeders = to_uint(k, v); }},
      {"topology.grid_stations", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.topology.grid_stations = to_uint(k, v);
       }},
      {"topology.transformers_per_feeder", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.topology.transformers_per_feeder = to_uint(k, v);
       }},
      {"topology.group_size", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.topology.group_size = to_uint(k, v);
       }},
      {"topology.class_mix", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         const auto w = to_doubles(k, v);
         if (w.size() != 3) fail(k, "expected three weights for classes A, B, C");
         s.base.topology.class_mix = {w[0], w[1], w[2]};
       }},
      {"supply.mode", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         if (v == "gap") s.base.supply.mode = SupplyModel::Mode::FractionalGap;
         else if (v == "fixed") s.base.supply.mode = SupplyModel::Mode::FixedCapacity;
         else fail(k, "expected 'gap' or 'fixed', got '" + v + "'");
       }},
      {"supply.capacity_w", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.supply.capacity_watts = to_double(k, v);
       }},
      {"consumption.corpus", [](ExperimentSpec& s, const std::string&, const std::string& v, const fs::path& base) {
         s.corpus_dir = fs::path(v).is_absolute() ? fs::path(v) : base / v;
       }},
      {"consumption.bandwidth_w", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         if (v == "auto") s.bandwidth.reset();
         else {
           const double h = to_double(k, v);
           if (!(h > 0.0)) fail(k, "bandwidth must be positive");
           s.bandwidth = h;
         }
       }},
      {"policy.dp", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         const auto a = to_doubles(k, v);
         if (a.size() != 3) fail(k, "expected three alphas for L4, L3, L2");
         s.base.distributed.dp = {a[0], a[1], a[2]};
         try {
           validate(s.base.distributed.dp);
         } catch (const ConfigError& e) {
           fail(k, e.what());
         }
       }},
      {"policy.reduction_factor", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.distributed.reduction_factor = to_double(k, v);
       }},
      {"policy.emergency", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.emergency_enabled = to_bool(k, v);
       }},
      {"utility.u_max", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) { s.base.utility.u_max = to_double(k, v); }},
      {"utility.th_u", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) { s.base.utility.th_u = to_double(k, v); }},
      {"utility.th_l", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) { s.base.utility.th_l = to_double(k, v); }},
      {"protocol.mode", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         if (v == "summary") s.base.protocol.mode = ProtocolConfig::Mode::Summary;
         else if (v == "full") s.base.protocol.mode = ProtocolConfig::Mode::Full;
         else fail(k, "expected 'summary' or 'full', got '" + v + "'");
       }},
      {"protocol.distance_m", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.protocol.distance_m = to_double(k, v);
       }},
      {"protocol.prr", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         std::map<double, double> table;
         for (const auto& item : split(v, ',')) {
           const auto parts = split(item, ':');
           if (parts.size() != 2) fail(k, "expected distance:prr pairs, got '" + item + "'");
           table[to_double(k, parts[0])] = to_double(k, parts[1]);
         }
         s.base.protocol.link.prr_by_distance = std::move(table);
       }},
      {"protocol.retries", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.protocol.link.retries = static_cast<int>(to_uint(k, v));
       }},
      {"protocol.ack_slot_ms", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.protocol.link.ack_slot_ms = to_double(k, v);
       }},
      {"protocol.timeout_ms", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.protocol.link.base_timeout_ms = to_double(k, v);
       }},
      {"protocol.sw_latency_ms", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.protocol.link.sw_latency_typical_ms = to_double(k, v);
       }},
      {"protocol.sw_latency_worst_ms", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.protocol.link.sw_latency_worst_ms = to_double(k, v);
       }},
      {"protocol.hw_latency_ms", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.protocol.link.hw_latency_ms = to_double(k, v);
       }},
      {"protocol.devices", [](ExperimentSpec& s, const std::string& k, const std::string& v, const fs::path&) {
         s.base.protocol.link.device_count = to_uint(k, v);
       }},
  };
  return table;
}

ExperimentSpec default_spec() {
  ExperimentSpec s;
  s.gaps = {0.10, 0.20, 0.30, 0.40};
  s.aps = {0.3, 0.5, 0.7, 0.9};
  s.policies = {Policy::Baseline, Policy::Distributed, Policy::Centralized};
  return s;
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text, const fs::path& base_dir) {
  ExperimentSpec spec = default_spec();
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const auto key = (section.empty() ? "" : section + ".") + trim(std::string_view(t).substr(0, eq));
    const auto value = trim(std::string_view(t).substr(eq + 1));
    const auto it = handlers().find(key);
    if (it == handlers().end()) throw ConfigError(key + ": unknown key");
    if (!seen.insert(key).second) throw ConfigError(key + ": duplicate key");
    it->second(spec, key, value, base_dir);
  }
  if (!seen.count("consumption.corpus")) throw ConfigError("consumption.corpus: missing required key");
  if (spec.base.supply.mode == SupplyModel::Mode::FixedCapacity && !seen.count("supply.capacity_w"))
    throw ConfigError("supply.capacity_w: required when supply.mode = fixed");
  validate(spec);
  return spec;
}

ExperimentSpec parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

void validate(const ExperimentSpec& spec) {
  if (spec.policies.empty()) throw ConfigError("experiment.policies: list must not be empty");
  if (spec.gaps.empty()) throw ConfigError("experiment.gaps: list must not be empty");
  if (spec.aps.empty()) throw ConfigError("experiment.aps: list must not be empty");
  if (spec.runs < 1) throw ConfigError("experiment.runs: must be at least 1");
  if (spec.corpus_dir.empty()) throw ConfigError("consumption.corpus: missing required key");
  validate(spec.base);
}

std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run_index) noexcept {
  return mix64(base_seed ^ mix64(static_cast<std::uint64_t>(run_index) + 1));
}

std::vector<Cell> expand_cells(const ExperimentSpec& spec) {
  const bool fixed = spec.base.supply.mode == SupplyModel::Mode::FixedCapacity;
  const std::vector<double> gaps = fixed ? std::vector<double>{0.0} : spec.gaps;
  std::vector<Cell> cells;
  for (Policy policy : spec.policies)
    for (double gap : gaps)
      for (double ap : spec.aps) cells.push_back({policy, gap, ap});
  return cells;
}

SimConfig cell_config(const ExperimentSpec& spec, const Cell& cell, std::size_t run_index) {
  SimConfig c = spec.base;
  c.policy = cell.policy;
  if (c.supply.mode == SupplyModel::Mode::FractionalGap) c.supply.gap_fraction = cell.gap;
  c.topology.ap = cell.ap;
  c.seed = run_seed(spec.base.seed, run_index);
  return c;
}

unsigned worker_count() {
  if (const char* env = std::getenv("STRESSGRID_THREADS")) {
    const std::string text(env);
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc{} && ptr == text.data() + text.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<MetricsLog> run_sweep(const ExperimentSpec& spec, const Corpus& corpus, unsigned threads,
                                  const ProgressFn& progress) {
  const auto cells = expand_cells(spec);
  const auto runs = static_cast<std::size_t>(spec.runs);
  const std::size_t total = cells.size() * runs;
  std::vector<MetricsLog> logs(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const auto& cell = cells[task / runs];
      const auto run_index = task % runs;
      try {
        logs[task] = run(cell_config(spec, cell, run_index), corpus).log;
        if (progress) {
          std::lock_guard lock(mu);
          progress(cell, run_index);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  const unsigned n = std::min<std::size_t>(threads == 0 ? worker_count() : threads, std::max<std::size_t>(total, 1));
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return logs;
}

}  // namespace stressgrid
