// Acceptance run: the desk-scale sweep plus the protocol, property and
// sampling checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stressgrid/corpus.hpp"
#include "stressgrid/engine.hpp"
#include "stressgrid/error.hpp"
#include "stressgrid/experiment.hpp"
#include "stressgrid/metrics.hpp"
#include "stressgrid/policies.hpp"
#include "stressgrid/protocol.hpp"

namespace fs = std::filesystem;
using namespace stressgrid;

namespace {

struct CellStats {
  LevelFractions fractions{};
  double ulw = 0.0;
  double utility = 0.0;
};

using Key = std::tuple<Policy, double, double>;

bool close_to(double a, double b) { return std::abs(a - b) < 1e-9; }

class Sweep {
 public:
  Sweep(const ExperimentSpec& spec, const std::vector<MetricsLog>& logs) {
    std::map<Key, int> n;
    for (const auto& log : logs) {
      const auto s = summarize(log);
      auto& c = cells_[{log.policy, log.gap_fraction, log.ap}];
      for (std::size_t i = 0; i < c.fractions.size(); ++i) c.fractions[i] += s.fractions[i];
      c.ulw += s.ulw_total;
      c.utility += s.mean_utility;
      ++n[{log.policy, log.gap_fraction, log.ap}];
    }
    for (auto& [key, c] : cells_) {
      const double k = n[key];
      for (auto& f : c.fractions) f /= k;
      c.ulw /= k;
      c.utility /= k;
    }
    gaps_ = spec.gaps;
    aps_ = spec.aps;
  }

  const CellStats& at(Policy p, double gap, double ap) const {
    for (const auto& [key, c] : cells_)
      if (std::get<0>(key) == p && close_to(std::get<1>(key), gap) && close_to(std::get<2>(key), ap)) return c;
    throw Error("acceptance: sweep lacks cell " + cell_tag(p, gap, ap));
  }

  double dec(Policy p, PowerLevel level, double gap, double ap) const {
    const auto i = level_index(level);
    return fractional_decrease(at(Policy::Baseline, gap, ap).fractions[i], at(p, gap, ap).fractions[i]);
  }

  double sci_at(Policy p, double gap, double ap) const {
    return sci(at(Policy::Baseline, gap, ap).fractions, at(p, gap, ap).fractions);
  }

  const std::vector<double>& gaps() const { return gaps_; }
  const std::vector<double>& aps() const { return aps_; }

 private:
  std::map<Key, CellStats> cells_;
  std::vector<double> gaps_, aps_;
};

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// --- property suite ---------------------------------------------------------

struct PropertyTally {
  std::size_t checks = 0;
  std::vector<std::string> broken;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && broken.size() < 5) broken.push_back(what);
  }
};

void check_sim_properties(const SimConfig& config, const Corpus& corpus, PropertyTally& t) {
  const bool dlc = config.policy != Policy::Baseline;
  const auto tag = cell_tag(config.policy, config.supply.gap_fraction, config.topology.ap);
  int hour = -1;
  LevelAssignment shed_last_hour, hour_end;
  const auto result = run(config, corpus, [&](const SimView& v) {
    if (v.clock.hour != hour) {
      shed_last_hour = hour_end;
      hour = v.clock.hour;
    }
    const auto levels = v.topology.levels();
    bool floor_ok = true, rest_ok = true, binary_ok = true;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto& h = v.topology.homes[i];
      if (!h.aashiyana) binary_ok &= levels[i] == PowerLevel::L1 || levels[i] == PowerLevel::L5;
      if (dlc && !v.emergency) {
        if (h.aashiyana) floor_ok &= ordinal(levels[i]) >= ordinal(PowerLevel::L2);
        if (!shed_last_hour.empty() && shed_last_hour[i] != PowerLevel::L5) rest_ok &= levels[i] == PowerLevel::L5;
      }
    }
    t.expect(floor_ok, tag + ": Aashiyana home below L2 without emergency");
    t.expect(rest_ok, tag + ": home shed in consecutive hours without emergency");
    t.expect(binary_ok, tag + ": non-Aashiyana home at an intermediate level");
    if (v.hour_end) {
      double served = 0.0;
      for (const auto& h : v.topology.homes) served += current_consumption(h);
      t.expect(served <= v.capacity, tag + ": served above capacity at hour end");
      hour_end = levels;
    }
  });
  for (const auto& h : result.log.hours) {
    const auto f = level_distribution(h.level_counts);
    double sum = 0.0;
    for (double x : f) sum += x;
    t.expect(std::abs(sum - 1.0) < 1e-12, tag + ": level fractions do not sum to 1");
    t.expect(h.converged && h.served <= h.capacity, tag + ": hour logged above capacity");
  }
}

void check_branch_partition(PropertyTally& t) {
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; i + j <= 10; ++j) {
      const DistributionProfile dp{i / 10.0, j / 10.0, (10 - i - j) / 10.0};
      for (int sl = 5; sl <= 100; ++sl)
        for (int r = 1; r <= 100; ++r) {
          Home h;
          h.aashiyana = true;
          const auto got = alg1_home_decision(h, sl, dp, false, r);
          std::optional<PowerLevel> want;
          if (r < sl) {
            if (r > (1.0 - dp.alpha_l4) * sl) want = PowerLevel::L4;
            else if (dp.alpha_l2 * sl < r && r < (dp.alpha_l3 + dp.alpha_l2) * sl) want = PowerLevel::L3;
            else want = PowerLevel::L2;
          }
          t.expect(got == want, "branch partition differs at r=" + std::to_string(r) + " sl=" + std::to_string(sl));
        }
    }
}

void check_frames(PropertyTally& t) {
  for (std::size_t devices = 1; devices <= 5; ++devices)
    for (unsigned mask = 0; mask < 32; ++mask) {
      std::vector<RelayStates> in(devices);
      for (std::size_t bit = 0; bit < kRelaysPerDevice; ++bit) in.back()[bit] = (mask >> bit) & 1u;
      const auto frame = encode(std::span<const RelayStates>(in));
      bool ok = true;
      for (std::size_t id = 1; id <= devices; ++id) ok &= decode(frame, id) == in[id - 1];
      t.expect(ok, "frame round trip failed for mask " + std::to_string(mask));
    }
  const LinkModel link;
  for (std::size_t a = 1; a <= link.device_count; ++a)
    for (std::size_t b = a + 1; b <= link.device_count; ++b) {
      const double sa = ack_slot(a, link.ack_slot_ms), sb = ack_slot(b, link.ack_slot_ms);
      t.expect(sa + link.ack_slot_ms <= sb || sb + link.ack_slot_ms <= sa, "ack slots overlap");
    }
}

bool same_files(const fs::path& a, const fs::path& b) {
  auto slurp = [](const fs::path& p) {
    std::FILE* f = std::fopen(p.c_str(), "rb");
    std::string s;
    if (!f) return s;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) s.append(buf, n);
    std::fclose(f);
    return s;
  };
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (slurp(e.path()) != slurp(b / e.path().filename())) return false;
    ++count;
  }
  return count > 0;
}

// --- sampling fidelity ------------------------------------------------------

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

int main() {
  try {
    auto spec = parse_config(STRESSGRID_DESK_CONFIG);
    spec.corpus_dir = STRESSGRID_CORPUS_DIR;
    const auto corpus = Corpus::load(spec.corpus_dir, spec.bandwidth);
    std::printf("desk sweep: %zu cells x %d runs, base seed %llu\n", expand_cells(spec).size(), spec.runs,
                static_cast<unsigned long long>(spec.base.seed));
    const auto logs = run_sweep(spec, corpus);
    const Sweep sweep(spec, logs);

    // 1. L1 reduction at 90% AP, 20% gap.
    {
      const double d = sweep.dec(Policy::Distributed, PowerLevel::L1, 0.2, 0.9);
      const double c = sweep.dec(Policy::Centralized, PowerLevel::L1, 0.2, 0.9);
      report(1, d >= 70.0 && c >= 70.0, fmt("L1 decrease distributed %.1f%%, centralized %.1f%% (need >= 70%%)", d, c));
    }

    // 2. ULW collapse at 90% AP, 20% gap.
    {
      const double b = sweep.at(Policy::Baseline, 0.2, 0.9).ulw;
      const double d = sweep.at(Policy::Distributed, 0.2, 0.9).ulw;
      const double c = sweep.at(Policy::Centralized, 0.2, 0.9).ulw;
      report(2, c <= 0.10 * b && c <= 0.25 * d,
             fmt("ULW W/day baseline %.0f, distributed %.0f, centralized %.0f (%.2f%% of baseline)", b, d, c,
                 100.0 * c / b));
    }

    // 3. Some cell where centralized raises the L5 share.
    {
      double best = -1e9, best_gap = 0, best_ap = 0;
      for (double gap : sweep.gaps())
        for (double ap : sweep.aps()) {
          const double gain = -sweep.dec(Policy::Centralized, PowerLevel::L5, gap, ap);
          if (gain > best) best = gain, best_gap = gap, best_ap = ap;
        }
      report(3, best > 0.0, fmt("largest centralized L5 increase %.1f%% at gap %.2f, AP %.2f", best, best_gap, best_ap));
    }

    // 4. SCI trend at 90% AP, for both DLC policies.
    {
      bool ok = true;
      std::string detail;
      for (Policy p : {Policy::Distributed, Policy::Centralized}) {
        std::vector<double> s;
        for (double gap : sweep.gaps()) s.push_back(sweep.sci_at(p, gap, 0.9));
        int inversions = 0;
        double worst = 0.0;
        for (std::size_t i = 1; i < s.size(); ++i)
          if (s[i] > s[i - 1]) ++inversions, worst = std::max(worst, s[i] - s[i - 1]);
        const bool trend = inversions == 0 || (inversions == 1 && worst <= 3.0);
        const bool level = sweep.sci_at(p, 0.1, 0.9) >= 60.0 && sweep.sci_at(p, 0.2, 0.9) >= 60.0;
        ok &= trend && level;
        detail += std::string(to_string(p)) + " [";
        for (std::size_t i = 0; i < s.size(); ++i) detail += (i ? " " : "") + fmt("%.1f", s[i]);
        detail += "]" + fmt(" inversions %.0f ", inversions) + (p == Policy::Distributed ? "; " : "");
      }
      report(4, ok, "SCI pp over gap 10..40%: " + detail);
    }

    // 5. Utility ordering at 30% gap, 90% AP.
    {
      const double u_max = spec.base.utility.u_max;
      const double diff = 100.0 * (sweep.at(Policy::Centralized, 0.3, 0.9).utility -
                                   sweep.at(Policy::Distributed, 0.3, 0.9).utility) / u_max;
      report(5, diff >= 2.0 && diff <= 10.0, fmt("centralized - distributed utility %.2f pp of u_max (need 2..10)", diff));
    }

    // 6. Property suite.
    {
      PropertyTally t;
      for (Policy p : {Policy::Baseline, Policy::Distributed, Policy::Centralized})
        for (double gap : {0.1, 0.4})
          for (double ap : {0.3, 0.9}) check_sim_properties(cell_config(spec, {p, gap, ap}, 0), corpus, t);
      check_branch_partition(t);
      check_frames(t);

      // Same seed, same bytes.
      auto small = spec;
      small.runs = 2;
      small.gaps = {0.2};
      small.aps = {0.9};
      const auto tmp = fs::temp_directory_path() / ("stressgrid_acceptance_" + std::to_string(spec.base.seed));
      fs::remove_all(tmp);
      write_report(run_sweep(small, corpus), tmp / "a");
      write_report(run_sweep(small, corpus), tmp / "b");
      t.expect(same_files(tmp / "a", tmp / "b"), "re-run with the same seed wrote different bytes");
      fs::remove_all(tmp);

      std::string detail = std::to_string(t.checks) + " checks";
      for (const auto& b : t.broken) detail += "; " + b;
      report(6, t.broken.empty(), detail);
    }

    // 7. Protocol numbers.
    {
      const LinkModel link;
      Rng rng(stream_seed(spec.base.seed, 7));
      const auto typical = deliver({{0x1F}}, link, 10.0, rng);
      const int n = 100000;
      int acked = 0;
      for (int i = 0; i < n; ++i) acked += deliver({{0x1F}}, link, 50.0, rng).acked ? 1 : 0;
      const double mc = acked / static_cast<double>(n);
      const double analytic = delivery_probability(link, 50.0);
      const double active = overhead_power(4, false), shed = overhead_power(4, true);
      const bool ok = typical.acked && std::abs(typical.latency_ms - 30.0) <= 2.0 &&
                      std::abs(mc - analytic) <= 0.01 * analytic && std::abs(active - 1.96) < 1e-12 &&
                      std::abs(shed - 0.50) < 1e-12;
      report(7, ok, fmt("latency %.1f ms, delivery MC %.4f vs %.4f, overhead %.2f W", typical.latency_ms, mc,
                        analytic, active) +
                        fmt(" / %.2f W", shed));
    }

    // 8. Sampling fidelity per appliance model.
    {
      bool ok = true;
      double worst_ks = 0.0, worst_mean = 0.0;
      std::string worst_name;
      Rng rng(stream_seed(spec.base.seed, 8));
      std::size_t models = 0;
      for (const char* cls : {"A", "B", "C"}) {
        const auto dir = spec.corpus_dir / cls;
        const auto manifest = read_manifest(dir / "manifest.txt");
        for (const auto& file : manifest.appliance_files) {
          const auto raw = read_appliance_file(dir / file);
          const auto filtered = filter_outliers(raw);
          const auto model = fit_appliance(raw, spec.bandwidth);
          std::vector<double> draws(10000);
          for (auto& x : draws) x = hourly_draw(model.cdf, rng);
          const double ks = ks_distance(draws, filtered.samples);
          double src = 0.0, got = 0.0;
          for (double v : filtered.samples) src += v;
          for (double v : draws) got += v;
          src /= static_cast<double>(filtered.samples.size());
          got /= static_cast<double>(draws.size());
          const double rel = std::abs(got - src) / src;
          ok &= ks <= 0.05 && rel <= 0.05;
          if (ks > worst_ks) worst_ks = ks, worst_name = std::string(cls) + "/" + raw.appliance_name;
          worst_mean = std::max(worst_mean, rel);
          ++models;
        }
      }
      report(8, ok, fmt("%.0f models, worst KS %.4f (", models, worst_ks) + worst_name +
                        fmt("), worst mean error %.2f%%", 100.0 * worst_mean));
    }
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
