#pragma once

// Appliance sample files and per-class manifests.
//
// Appliance file:   "appliance,<name>" header, then one watt reading per line.
// Class manifest:   "class,<A|B|C>" header, then one appliance file name per
//                   line (relative to the manifest's directory).
// Corpus directory: one subdirectory per class, each with manifest.txt.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stressgrid/consumption.hpp"
#include "stressgrid/home.hpp"

namespace stressgrid {

ApplianceSamples read_appliance_file(const std::filesystem::path& path);
void write_appliance_file(const std::filesystem::path& path, const ApplianceSamples& samples);

struct ClassManifest {
  ClassLabel label;
  std::vector<std::filesystem::path> appliance_files;
};

ClassManifest read_manifest(const std::filesystem::path& path);

/// One appliance after filtering and fitting.
struct ApplianceModel {
  std::string name;
  EmpiricalCdf cdf;
  double rated_watts;  // 95th percentile of the fitted distribution
  double filtered_mean;
};

/// Everything needed to instantiate homes of one class.
struct ClassProfile {
  HomeClass home_class;
  std::vector<ApplianceModel> appliances;
  DisconnectivityMatrix dm;
};

inline constexpr double kRatedQuantile = 0.95;

ApplianceModel fit_appliance(const ApplianceSamples& raw, std::optional<double> bandwidth = {});

/// Builds a class profile (HomeClass from the standard rating, appliance count
/// from the models) and its disconnectivity matrix.
ClassProfile make_profile(ClassLabel label, std::vector<ApplianceModel> appliances);

/// Loads A/, B/, C/ under `root`, filters, fits, and builds each class DM.
/// Immutable once built; shared across simulation runs.
class Corpus {
 public:
  static Corpus load(const std::filesystem::path& root, std::optional<double> bandwidth = {});
  /// Profiles must be ordered A, B, C.
  static Corpus from_profiles(std::array<ClassProfile, 3> profiles);

  const ClassProfile& profile(ClassLabel label) const { return profiles_.at(class_index(label)); }

 private:
  std::array<ClassProfile, 3> profiles_;
  explicit Corpus(std::array<ClassProfile, 3> profiles) : profiles_(std::move(profiles)) {}
};

}  // namespace stressgrid
