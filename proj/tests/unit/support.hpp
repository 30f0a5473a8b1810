#pragma once

#include <filesystem>
#include <string>

#include "stressgrid/corpus.hpp"
#include "stressgrid/topology.hpp"

namespace stressgrid::testing {

/// The bundled corpus, loaded once per test binary.
const Corpus& bundled_corpus();

/// Topology whose homes all draw `load_fraction` of their rating, spread
/// evenly over equally rated appliances, with a DM built from those ratings.
Topology uniform_topology(const TopologyConfig& config, double load_fraction, std::uint64_t seed = 7);

/// Fresh empty directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace stressgrid::testing
