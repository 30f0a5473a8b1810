// stressgrid: runs a gap x AP x policy sweep of the load-shedding simulator
// and writes per-run, summary and plot-data CSVs.
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stressgrid/corpus.hpp"
#include "stressgrid/error.hpp"
#include "stressgrid/experiment.hpp"
#include "stressgrid/metrics.hpp"

namespace {

using namespace stressgrid;

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

double as_fraction(double v) { return v > 1.0 ? v / 100.0 : v; }

void print_cell_table(const std::vector<MetricsLog>& logs, const ExperimentSpec& spec) {
  const auto cells = expand_cells(spec);
  const auto runs = static_cast<std::size_t>(spec.runs);
  std::printf("%-12s %6s %6s %12s %8s %8s %8s\n", "policy", "gap", "ap", "ulw_w/day", "L1", "L5", "utility");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double ulw_sum = 0.0, l1 = 0.0, l5 = 0.0, u = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto s = summarize(logs[c * runs + r]);
      ulw_sum += s.ulw_total;
      l1 += s.fractions[0];
      l5 += s.fractions[4];
      u += s.mean_utility;
    }
    const double n = static_cast<double>(runs);
    std::printf("%-12s %6.2f %6.2f %12.1f %8.4f %8.4f %8.4f\n", std::string(to_string(cells[c].policy)).c_str(),
                cells[c].gap, cells[c].ap, ulw_sum / n, l1 / n, l5 / n, u / n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Load-shedding simulator for highly stressed grids"};
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> policy;
  std::optional<double> gap;
  std::optional<double> ap;
  bool validate_only = false;
  bool single = false;
  bool quiet = false;

  app.add_option("--config", config_path, "Experiment config file")->required();
  app.add_option("--out", out_dir, "Output directory (overrides experiment.out)");
  app.add_option("--seed", seed, "Base seed (overrides experiment.seed)");
  app.add_option("--runs", runs, "Runs per cell (overrides experiment.runs)")->check(CLI::PositiveNumber);
  app.add_option("--policy", policy, "Restrict to one policy: baseline|distributed|centralized");
  app.add_option("--gap", gap, "Restrict to one supply gap (fraction or percent)");
  app.add_option("--ap", ap, "Restrict to one Aashiyana penetration (fraction or percent)");
  app.add_flag("--validate", validate_only, "Check the config and exit");
  app.add_flag("--single", single, "Run only the first (policy, gap, ap) cell after overrides");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    ExperimentSpec spec = parse_config(config_path);
    if (out_dir) spec.out_dir = *out_dir;
    if (seed) spec.base.seed = *seed;
    if (runs) spec.runs = *runs;
    if (policy) {
      const auto p = parse_policy(*policy);
      if (!p) throw ConfigError("--policy: unknown policy '" + *policy + "'");
      spec.policies = {*p};
    }
    if (gap) spec.gaps = {as_fraction(*gap)};
    if (ap) spec.aps = {as_fraction(*ap)};
    if (single) {
      spec.policies.resize(1);
      spec.gaps.resize(1);
      spec.aps.resize(1);
    }
    validate(spec);
    if (validate_only) {
      if (!quiet) std::cout << "config ok: " << expand_cells(spec).size() << " cells x " << spec.runs << " runs\n";
      return 0;
    }

    const auto corpus = Corpus::load(spec.corpus_dir, spec.bandwidth);
    const auto total = expand_cells(spec).size() * static_cast<std::size_t>(spec.runs);
    std::size_t done = 0;
    ProgressFn progress;
    if (!quiet)
      progress = [&](const Cell& cell, std::size_t run_index) {
        std::fprintf(stderr, "[%zu/%zu] %s run %zu\n", ++done, total,
                     cell_tag(cell.policy, cell.gap, cell.ap).c_str(), run_index);
      };
    const auto logs = run_sweep(spec, corpus, 0, progress);
    write_report(logs, spec.out_dir);
    if (!quiet) {
      print_cell_table(logs, spec);
      std::cout << "wrote " << logs.size() << " run logs to " << spec.out_dir.string() << '\n';
    }
  } catch (const IoError& e) {
    std::cerr << "stressgrid: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "stressgrid: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
