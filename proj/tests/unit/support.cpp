#include "support.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <vector>

#include <unistd.h>

namespace stressgrid::testing {

namespace fs = std::filesystem;

const Corpus& bundled_corpus() {
  static const Corpus corpus = Corpus::load(STRESSGRID_CORPUS_DIR);
  return corpus;
}

Topology uniform_topology(const TopologyConfig& config, double load_fraction, std::uint64_t seed) {
  Topology topo = build_topology(config, seed);
  for (auto& h : topo.homes) {
    h.home_class = standard_class(h.home_class.label);
    const auto n = h.home_class.appliance_count;
    const std::vector<double> ratings(n, h.rating() / static_cast<double>(n));
    h.dm = build_dm(h.home_class, ratings);
    assign_hour_draws(h, std::vector<double>(n, load_fraction * h.rating() / static_cast<double>(n)));
  }
  return topo;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("stressgrid_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace stressgrid::testing
