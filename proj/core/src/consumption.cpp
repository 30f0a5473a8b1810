#include "stressgrid/consumption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stressgrid/error.hpp"

namespace stressgrid {
namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Quantile of sorted data with linear interpolation between order statistics.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> x, std::vector<double> f, double bandwidth)
    : x_(std::move(x)), f_(std::move(f)), bandwidth_(bandwidth) {
  if (x_.size() < 2 || x_.size() != f_.size()) throw Error("cdf grid needs at least two matching points");
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw Error("cdf grid must be strictly increasing in x");
    if (f_[i] < f_[i - 1]) throw Error("cdf must be nondecreasing");
  }
}

double EmpiricalCdf::evaluate(double watts) const noexcept {
  if (watts <= x_.front()) return watts < x_.front() ? 0.0 : f_.front();
  if (watts >= x_.back()) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), watts);
  const auto i = static_cast<std::size_t>(it - x_.begin());
  const double t = (watts - x_[i - 1]) / (x_[i] - x_[i - 1]);
  return f_[i - 1] + t * (f_[i] - f_[i - 1]);
}

ApplianceSamples filter_outliers(const ApplianceSamples& samples) {
  if (samples.samples.empty()) throw Error("no samples");
  const auto& v = samples.samples;
  const double mean = mean_of(v);
  double ss = 0.0;
  for (double s : v) ss += (s - mean) * (s - mean);
  const double threshold = mean + 3.0 * std::sqrt(ss / static_cast<double>(v.size()));

  ApplianceSamples out{samples.appliance_name, {}};
  out.samples.reserve(v.size());
  std::copy_if(v.begin(), v.end(), std::back_inserter(out.samples), [&](double s) { return s <= threshold; });
  if (out.samples.empty()) return samples;
  return out;
}

double silverman_bandwidth(const std::vector<double>& samples) {
  if (samples.empty()) throw Error("no samples");
  const auto n = static_cast<double>(samples.size());
  const double mean = mean_of(samples);
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);

  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = sd;
  if (spread <= 0.0) {
    // Constant data: keep the kernel narrow relative to the value itself.
    return std::max(1e-3 * std::abs(mean), 1e-3);
  }
  return 0.9 * spread * std::pow(n, -0.2);
}

EmpiricalCdf fit_cdf(const ApplianceSamples& samples, std::optional<double> bandwidth) {
  if (samples.samples.empty()) throw Error("no samples");
  if (std::any_of(samples.samples.begin(), samples.samples.end(), [](double s) { return !(s >= 0.0); }))
    throw Error("appliance '" + samples.appliance_name + "' has negative or NaN readings");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(samples.samples);
  if (!(h > 0.0)) throw Error("bandwidth must be positive");

  std::vector<double> sorted = samples.samples;
  std::sort(sorted.begin(), sorted.end());
  const double lo = std::max(0.0, sorted.front() - 3.0 * h);
  const double hi = sorted.back() + 3.0 * h;
  const auto n = sorted.size();

  // Raw KDE CDF at x: mean of Phi((x - s) / h). Samples further than 8h away
  // contribute exactly 0 or 1 in double precision.
  const double reach = 8.0 * h;
  auto raw_cdf = [&](double x) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
    const auto last = std::upper_bound(first, sorted.end(), x + reach);
    double acc = static_cast<double>(first - sorted.begin());
    for (auto it = first; it != last; ++it) acc += normal_cdf((x - *it) / h);
    return acc / static_cast<double>(n);
  };

  std::vector<double> xs(kCdfGridPoints);
  std::vector<double> fs(kCdfGridPoints);
  const double step = (hi - lo) / static_cast<double>(kCdfGridPoints - 1);
  for (std::size_t i = 0; i < kCdfGridPoints; ++i) {
    xs[i] = i + 1 == kCdfGridPoints ? hi : lo + step * static_cast<double>(i);
    fs[i] = raw_cdf(xs[i]);
  }

  // Clip the mass outside [lo, hi] (including any below 0 W) and renormalize.
  const double f_lo = fs.front();
  const double f_hi = fs.back();
  const double mass = f_hi - f_lo;
  for (auto& f : fs) f = std::clamp((f - f_lo) / mass, 0.0, 1.0);
  fs.front() = 0.0;
  fs.back() = 1.0;
  for (std::size_t i = 1; i < fs.size(); ++i) fs[i] = std::max(fs[i], fs[i - 1]);

  return EmpiricalCdf(std::move(xs), std::move(fs), h);
}

double sample_inverse(const EmpiricalCdf& cdf, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw Error("inverse-transform probability must lie in [0, 1)");
  const auto& x = cdf.x();
  const auto& f = cdf.f();
  const auto it = std::lower_bound(f.begin(), f.end(), u);
  const auto i = static_cast<std::size_t>(it - f.begin());
  if (i == 0) return x.front();
  const double t = (u - f[i - 1]) / (f[i] - f[i - 1]);
  return std::max(0.0, x[i - 1] + t * (x[i] - x[i - 1]));
}

double hourly_draw(const EmpiricalCdf& cdf, Rng& rng) { return sample_inverse(cdf, uniform01(rng)); }

}  // namespace stressgrid
