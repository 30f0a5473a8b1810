// Writes the bundled synthetic appliance corpus.
//
// Readings are hourly averages: a gamma(shape) running power around
// mean/duty times the share of the hour the appliance was on, which is
// Beta(2, 2(1-duty)/duty) so it averages to `duty`. The Beta keeps density
// away from a spike at 0 W, which a Silverman-width kernel could not
// resolve. A few readings are replaced by meter spikes so the outlier filter
// has something to remove. Output layout:
//   <out>/<class>/manifest.txt
//   <out>/<class>/<appliance>.txt

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stressgrid/corpus.hpp"
#include "stressgrid/error.hpp"

namespace {

namespace fs = std::filesystem;
using namespace stressgrid;

struct ApplianceSpec {
  const char* name;
  double mean_w;
  double shape;
  double duty;
};

struct ClassSpec {
  ClassLabel label;
  std::vector<ApplianceSpec> appliances;
};

const std::vector<ClassSpec>& class_specs() {
  static const std::vector<ClassSpec> specs = {
      {ClassLabel::A,
       {{"lights", 35, 6, 0.6}, {"ceiling_fan", 55, 5, 0.7}, {"refrigerator", 70, 8, 1.0},
        {"television", 35, 4, 0.4}, {"phone_charger", 8, 4, 0.5}, {"water_pump", 45, 3, 0.25},
        {"iron", 40, 3, 0.1}}},
      {ClassLabel::B,
       {{"lights", 45, 6, 0.6}, {"ceiling_fan", 70, 5, 0.7}, {"refrigerator", 85, 8, 1.0},
        {"television", 45, 4, 0.4}, {"phone_charger", 10, 4, 0.5}, {"water_pump", 55, 3, 0.25},
        {"iron", 45, 3, 0.1}, {"washing_machine", 40, 3, 0.1}, {"microwave", 35, 3, 0.15},
        {"computer", 30, 5, 0.4}}},
      {ClassLabel::C,
       {{"lights", 50, 6, 0.6}, {"ceiling_fan", 70, 5, 0.7}, {"refrigerator", 90, 8, 1.0},
        {"television", 45, 4, 0.4}, {"phone_charger", 12, 4, 0.5}, {"water_pump", 50, 3, 0.25},
        {"iron", 40, 3, 0.1}, {"washing_machine", 40, 3, 0.1}, {"microwave", 35, 3, 0.15},
        {"computer", 35, 5, 0.4}, {"air_conditioner", 120, 4, 0.35}, {"water_heater", 40, 3, 0.2},
        {"vacuum_cleaner", 15, 3, 0.05}}},
  };
  return specs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic appliance sample corpus"};
  std::string out = "data/corpus";
  std::uint64_t seed = 20240601;
  std::size_t samples = 3000;
  double spike_rate = 0.003;
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  app.add_option("--samples", samples, "Readings per appliance")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--spike-rate", spike_rate, "Fraction of readings replaced by spikes")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    std::mt19937_64 rng(seed);
    for (const auto& cls : class_specs()) {
      const fs::path dir = fs::path(out) / std::string(to_string(cls.label));
      fs::create_directories(dir);
      std::ofstream manifest(dir / "manifest.txt");
      if (!manifest) throw IoError("cannot write " + (dir / "manifest.txt").string());
      manifest << "class," << to_string(cls.label) << '\n';
      for (const auto& a : cls.appliances) {
        const double active_mean = a.mean_w / a.duty;
        std::gamma_distribution<double> active(a.shape, active_mean / a.shape);
        // Beta(2, b) as X / (X + Y) with X ~ gamma(2), Y ~ gamma(b).
        std::gamma_distribution<double> on_x(2.0, 1.0);
        std::gamma_distribution<double> on_y(a.duty < 1.0 ? 2.0 * (1.0 - a.duty) / a.duty : 1.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        ApplianceSamples s{a.name, {}};
        s.samples.reserve(samples);
        for (std::size_t i = 0; i < samples; ++i) {
          double share = 1.0;
          if (a.duty < 1.0) {
            const double x = on_x(rng);
            share = x / (x + on_y(rng));
          }
          const double v = active(rng) * share;
          s.samples.push_back(unit(rng) < spike_rate ? active_mean * (4.0 + 4.0 * unit(rng)) : v);
        }
        const std::string file = std::string(a.name) + ".txt";
        write_appliance_file(dir / file, s);
        manifest << file << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "stressgrid-corpus: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
