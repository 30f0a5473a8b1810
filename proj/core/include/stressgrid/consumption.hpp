#pragma once

// Stochastic per-appliance consumption models: outlier filtering, Gaussian
// KDE fitted to a dense CDF grid, and inverse-transform sampling.

#include <optional>
#include <string>
#include <vector>

#include "stressgrid/rng.hpp"

namespace stressgrid {

struct ApplianceSamples {
  std::string appliance_name;
  std::vector<double> samples;  // watts, all >= 0
};

/// Dense (x, F(x)) grid of a KDE-smoothed CDF. F(x.front()) == 0 and
/// F(x.back()) == 1; F is nondecreasing.
class EmpiricalCdf {
 public:
  EmpiricalCdf(std::vector<double> x, std::vector<double> f, double bandwidth);

  double support_min() const noexcept { return x_.front(); }
  double support_max() const noexcept { return x_.back(); }
  double bandwidth() const noexcept { return bandwidth_; }
  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& f() const noexcept { return f_; }

  /// F(w), linear between grid points; 0 below support, 1 above.
  double evaluate(double watts) const noexcept;

 private:
  std::vector<double> x_;
  std::vector<double> f_;
  double bandwidth_;
};

inline constexpr std::size_t kCdfGridPoints = 512;

/// Drops every reading above mean + 3 stdev (population stdev of the input).
/// Returns the input unchanged if filtering would leave nothing.
ApplianceSamples filter_outliers(const ApplianceSamples& samples);

/// Silverman's rule of thumb: 0.9 * min(sd, IQR/1.34) * n^(-1/5).
/// Falls back to a small positive width for degenerate (constant) data.
double silverman_bandwidth(const std::vector<double>& samples);

/// Gaussian KDE integrated onto a kCdfGridPoints grid spanning
/// [max(0, min - 3h), max + 3h]. Mass below the lower bound is clipped and
/// the CDF renormalized.
EmpiricalCdf fit_cdf(const ApplianceSamples& samples, std::optional<double> bandwidth = {});

/// Generalized inverse: smallest x with F(x) >= u, interpolated linearly
/// within the bracketing grid cell. u must lie in [0, 1).
double sample_inverse(const EmpiricalCdf& cdf, double u);

/// One hourly-average draw for an appliance.
double hourly_draw(const EmpiricalCdf& cdf, Rng& rng);

}  // namespace stressgrid
