#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace pfocus {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares y = slope*x + intercept. Needs two distinct x.
LinearFit least_squares(std::span<const double> xs, std::span<const double> ys);

/// delta_max, delta_max*ratio, ... down to delta_min (inclusive up to rounding).
/// ratio in (0,1); default 10^(-1/4).
std::vector<double> geometric_ladder(double delta_max, double delta_min, double ratio = 0.0);

inline constexpr int kDefaultDiscard = 2;

struct DimensionEstimate {
  double value = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  int ambient = 1;
  /// min/max of measure/delta^(ambient - value) over the fitted rungs
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  std::vector<double> ladder;
  std::vector<double> measures;
  /// number of largest rungs left out of the regression
  int discarded = 0;
  std::optional<double> predicted;
  /// largest relative disagreement between two independent measure computations
  std::optional<double> crosscheck_error;
};

/// dimension = ambient - slope of ln(measure) against ln(delta), fitted on
/// ladder[discard..]. Throws DegenerateFit if every fitted measure is equal.
DimensionEstimate fit_dimension(std::vector<double> ladder, std::vector<double> measures, int ambient,
                                int discard = kDefaultDiscard);

/// measure/delta^(ambient - d) over rungs [first, last)
std::pair<double, double> ratio_band(const DimensionEstimate& e, double d, std::size_t first, std::size_t last);

nlohmann::json to_json(const DimensionEstimate& e);

}  // namespace pfocus
