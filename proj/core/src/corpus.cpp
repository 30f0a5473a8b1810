#include "stressgrid/corpus.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

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

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

// "key,value" header line; returns value.
std::string read_header(std::istream& in, std::string_view key, const fs::path& path) {
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos || trim(t.substr(0, comma)) != key)
      throw Error(path.string() + ": expected header '" + std::string(key) + ",<value>'");
    auto value = trim(t.substr(comma + 1));
    if (value.empty()) throw Error(path.string() + ": empty " + std::string(key) + " in header");
    return value;
  }
  throw Error(path.string() + ": missing header");
}

}  // namespace

ApplianceSamples read_appliance_file(const fs::path& path) {
  auto in = open_input(path);
  ApplianceSamples out{read_header(in, "appliance", path), {}};
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !(value >= 0.0))
      throw Error(path.string() + ":" + std::to_string(line_no) + ": invalid watt reading '" + t + "'");
    out.samples.push_back(value);
  }
  if (out.samples.empty()) throw Error(path.string() + ": no samples");
  return out;
}

void write_appliance_file(const fs::path& path, const ApplianceSamples& samples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "appliance," << samples.appliance_name << '\n';
  char buf[64];
  for (double s : samples.samples) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s, std::chars_format::fixed, 2);
    out.write(buf, ptr - buf);
    out.put('\n');
  }
  if (!out) throw IoError("failed writing " + path.string());
}

ClassManifest read_manifest(const fs::path& path) {
  auto in = open_input(path);
  const auto label_text = read_header(in, "class", path);
  const auto label = parse_class_label(label_text);
  if (!label) throw Error(path.string() + ": unknown class '" + label_text + "'");
  ClassManifest manifest{*label, {}};
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (!t.empty()) manifest.appliance_files.push_back(path.parent_path() / t);
  }
  if (manifest.appliance_files.empty()) throw Error(path.string() + ": manifest lists no appliances");
  return manifest;
}

ApplianceModel fit_appliance(const ApplianceSamples& raw, std::optional<double> bandwidth) {
  const auto filtered = filter_outliers(raw);
  auto cdf = fit_cdf(filtered, bandwidth);
  const double rated = sample_inverse(cdf, kRatedQuantile);
  const double mean = std::accumulate(filtered.samples.begin(), filtered.samples.end(), 0.0) /
                      static_cast<double>(filtered.samples.size());
  return ApplianceModel{raw.appliance_name, std::move(cdf), rated, mean};
}

ClassProfile make_profile(ClassLabel label, std::vector<ApplianceModel> appliances) {
  HomeClass home_class = standard_class(label);
  home_class.appliance_count = appliances.size();
  std::vector<double> ratings;
  ratings.reserve(appliances.size());
  for (const auto& a : appliances) ratings.push_back(a.rated_watts);
  auto dm = build_dm(home_class, ratings);
  return ClassProfile{home_class, std::move(appliances), std::move(dm)};
}

Corpus Corpus::load(const fs::path& root, std::optional<double> bandwidth) {
  if (!fs::is_directory(root)) throw IoError("corpus directory not found: " + root.string());
  std::array<std::optional<ClassProfile>, 3> loaded;
  for (ClassLabel label : {ClassLabel::A, ClassLabel::B, ClassLabel::C}) {
    const auto manifest_path = root / std::string(to_string(label)) / "manifest.txt";
    const auto manifest = read_manifest(manifest_path);
    if (manifest.label != label)
      throw Error(manifest_path.string() + ": manifest declares class " + std::string(to_string(manifest.label)));
    std::vector<ApplianceModel> models;
    for (const auto& file : manifest.appliance_files) models.push_back(fit_appliance(read_appliance_file(file), bandwidth));
    loaded[class_index(label)] = make_profile(label, std::move(models));
  }
  return Corpus({std::move(*loaded[0]), std::move(*loaded[1]), std::move(*loaded[2])});
}

Corpus Corpus::from_profiles(std::array<ClassProfile, 3> profiles) {
  for (std::size_t i = 0; i < profiles.size(); ++i)
    if (class_index(profiles[i].home_class.label) != i) throw Error("class profiles must be ordered A, B, C");
  return Corpus(std::move(profiles));
}

}  // namespace stressgrid
