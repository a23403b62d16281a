#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfocus/fit.hpp"

namespace pfocus {

/// Contracting germ on (0, radius): P(x) = x - c x^k + o(x^k) when the form is declared.
struct Map1D {
  std::function<double(double)> eval;
  double radius = 1.0;
  std::optional<int> k;
  std::optional<double> c;
  std::string label;

  /// P(x) = x - c x^k
  static Map1D power(int k, double c = 1.0, double radius = 1.0);
  /// P(x) = x - x^alpha for real alpha > 1
  static Map1D power(double alpha, double radius = 1.0);
  static Map1D linear(double factor);
};

struct OrbitSequence {
  std::vector<double> points;
  std::string generator;
};

/// x_0..x_n with x_{i+1} = P(x_i).
/// NotContracting if P(x) >= x or P(x) <= 0; Underflow below 1e-300.
OrbitSequence iterate(const Map1D& p, double x0, std::size_t n);

/// 1 - 1/alpha
double predicted_orbit_dimension(double alpha);

struct NucleusTail {
  std::size_t split = 0;  // first n with x_n - x_{n+1} < 2 delta
  double length = 0.0;    // x_split + delta + 2 delta split
};

/// Exact length of the delta-neighbourhood of {x_n} clipped to (0, x_0 + delta].
/// The generated points must reach the nucleus; every later gap must be < 2 delta.
NucleusTail nucleus_tail(std::span<const double> points, double delta);

/// Brute-force union of [x_i - delta, x_i + delta] plus [0, x_last], clipped at 0.
double union_length(std::span<const double> points, double delta);

DimensionEstimate sequence_dimension_exact(const OrbitSequence& s, const std::vector<double>& ladder,
                                           int discard = kDefaultDiscard);

/// Iterates until the gap resolves the smallest delta, then estimates. When the
/// map declares its order k the estimate carries 1 - 1/k as the prediction.
DimensionEstimate orbit_dimension(const Map1D& p, double x0, const std::vector<double>& ladder,
                                  int discard = kDefaultDiscard);

void write_orbit_csv(std::ostream& os, const OrbitSequence& s);

}  // namespace pfocus
