#pragma once

// Experiment description (config file), sweep expansion and the seeded
// worker pool that runs it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stressgrid/engine.hpp"

namespace stressgrid {

struct ExperimentSpec {
  SimConfig base;
  std::filesystem::path corpus_dir;
  std::optional<double> bandwidth;
  std::vector<double> gaps;  // fractions
  std::vector<double> aps;   // fractions
  std::vector<Policy> policies;
  int runs = 10;
  std::filesystem::path out_dir = "results";
};

/// Parses the `key = value` / `[section]` format. Throws ConfigError naming
/// the offending key, IoError when the file cannot be read.
ExperimentSpec parse_config(const std::filesystem::path& path);
ExperimentSpec parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");

void validate(const ExperimentSpec& spec);

/// Seed of run j: mix64(base_seed ^ mix64(j + 1)). The cell does not enter
/// the derivation, so every (policy, gap, ap) cell replays the same demand
/// realizations and a single cell reproduces the sweep's files.
std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run_index) noexcept;

struct Cell {
  Policy policy;
  double gap;
  double ap;
};

std::vector<Cell> expand_cells(const ExperimentSpec& spec);

SimConfig cell_config(const ExperimentSpec& spec, const Cell& cell, std::size_t run_index);

/// Worker count: STRESSGRID_THREADS if set and positive, else hardware
/// concurrency (at least 1).
unsigned worker_count();

using ProgressFn = std::function<void(const Cell&, std::size_t run_index)>;

/// Runs every cell x run on a worker pool. Output order is cell-major and
/// independent of scheduling.
std::vector<MetricsLog> run_sweep(const ExperimentSpec& spec, const Corpus& corpus,
                                  unsigned threads = 0, const ProgressFn& progress = {});

}  // namespace stressgrid
