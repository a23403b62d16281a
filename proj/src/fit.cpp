#include "pfocus/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "pfocus/errors.hpp"

namespace pfocus {

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw Error(ErrorCode::DegenerateFit, "need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw Error(ErrorCode::DegenerateFit, "all abscissae coincide");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

std::vector<double> geometric_ladder(double delta_max, double delta_min, double ratio) {
  if (ratio == 0.0) ratio = std::pow(10.0, -0.25);
  if (!(delta_max > 0) || !(delta_min > 0) || delta_min > delta_max || !(ratio > 0 && ratio < 1)) {
    throw Error(ErrorCode::InvalidInput, "ladder needs 0 < delta_min <= delta_max and 0 < ratio < 1");
  }
  std::vector<double> out;
  const double steps = std::log(delta_min / delta_max) / std::log(ratio);
  const auto count = static_cast<long>(std::floor(steps + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(delta_max * std::pow(ratio, static_cast<double>(i)));
  return out;
}

std::pair<double, double> ratio_band(const DimensionEstimate& e, double d, std::size_t first, std::size_t last) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const double r = e.measures[i] / std::pow(e.ladder[i], e.ambient - d);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

DimensionEstimate fit_dimension(std::vector<double> ladder, std::vector<double> measures, int ambient, int discard) {
  if (ladder.size() != measures.size()) throw Error(ErrorCode::InvalidInput, "ladder/measure size mismatch");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (!(ladder[i] < ladder[i - 1])) throw Error(ErrorCode::InvalidInput, "ladder must be strictly decreasing");
  }
  if (discard < 0 || ladder.size() < static_cast<std::size_t>(discard) + 2) {
    throw Error(ErrorCode::DegenerateFit, "too few rungs to fit");
  }
  const auto first = static_cast<std::size_t>(discard);
  std::vector<double> lx, ly;
  for (std::size_t i = first; i < ladder.size(); ++i) {
    if (!(measures[i] > 0)) throw Error(ErrorCode::DegenerateFit, "non-positive measure at delta=" + std::to_string(ladder[i]));
    lx.push_back(std::log(ladder[i]));
    ly.push_back(std::log(measures[i]));
  }
  if (std::all_of(ly.begin(), ly.end(), [&](double v) { return v == ly.front(); })) {
    throw Error(ErrorCode::DegenerateFit, "all measures are equal");
  }
  const LinearFit f = least_squares(lx, ly);
  DimensionEstimate e;
  e.slope = f.slope;
  e.intercept = f.intercept;
  e.rms_residual = f.rms_residual;
  e.ambient = ambient;
  e.value = ambient - f.slope;
  e.discarded = discard;
  e.ladder = std::move(ladder);
  e.measures = std::move(measures);
  std::tie(e.ratio_min, e.ratio_max) = ratio_band(e, e.value, first, e.ladder.size());
  return e;
}

nlohmann::json to_json(const DimensionEstimate& e) {
  nlohmann::json j;
  j["value"] = e.value;
  j["slope"] = e.slope;
  j["intercept"] = e.intercept;
  j["rms_residual"] = e.rms_residual;
  j["ambient"] = e.ambient;
  j["ratio_band"] = {e.ratio_min, e.ratio_max};
  j["discarded_rungs"] = e.discarded;
  nlohmann::json rungs = nlohmann::json::array();
  for (std::size_t i = 0; i < e.ladder.size(); ++i) rungs.push_back({{"delta", e.ladder[i]}, {"measure", e.measures[i]}});
  j["rungs"] = std::move(rungs);
  if (e.predicted) j["predicted"] = *e.predicted;
  if (e.crosscheck_error) j["crosscheck_error"] = *e.crosscheck_error;
  return j;
}

}  // namespace pfocus
