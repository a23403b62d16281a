#include "pfocus/dyn1d.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "pfocus/errors.hpp"

namespace pfocus {

namespace {

constexpr double kUnderflow = 1e-300;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double step(const Map1D& p, double x) {
  const double y = p.eval(x);
  if (!(y < x) || y < 0 || std::isnan(y)) {
    throw Error(ErrorCode::NotContracting, "P(" + num(x) + ") = " + num(y) + " is not in (0, x)");
  }
  if (y < kUnderflow) throw Error(ErrorCode::Underflow, "orbit reached " + num(y));
  return y;
}

}  // namespace

Map1D Map1D::power(int k, double c, double radius) {
  if (k < 1 || !(c > 0) || (k == 1 && !(c < 1))) throw Error(ErrorCode::InvalidInput, "need k >= 1, c > 0 (c < 1 if k = 1)");
  Map1D m;
  m.eval = [k, c](double x) { return x - c * std::pow(x, k); };
  m.radius = radius;
  m.k = k;
  m.c = c;
  m.label = "x - " + num(c) + "*x^" + std::to_string(k);
  return m;
}

Map1D Map1D::power(double alpha, double radius) {
  if (!(alpha > 1)) throw Error(ErrorCode::DomainError, "alpha must exceed 1");
  if (alpha == std::floor(alpha)) return power(static_cast<int>(alpha), 1.0, radius);
  Map1D m;
  m.eval = [alpha](double x) { return x - std::pow(x, alpha); };
  m.radius = radius;
  m.label = "x - x^" + num(alpha);
  return m;
}

Map1D Map1D::linear(double factor) {
  if (!(factor > 0 && factor < 1)) throw Error(ErrorCode::InvalidInput, "linear contraction needs 0 < factor < 1");
  Map1D m;
  m.eval = [factor](double x) { return factor * x; };
  m.radius = std::numeric_limits<double>::infinity();
  m.k = 1;
  m.c = 1 - factor;
  m.label = num(factor) + "*x";
  return m;
}

OrbitSequence iterate(const Map1D& p, double x0, std::size_t n) {
  if (!(x0 > 0 && x0 < p.radius)) throw Error(ErrorCode::DomainError, "x0 = " + num(x0) + " outside (0, radius)");
  if (n < 1) throw Error(ErrorCode::InvalidInput, "need at least one step");
  OrbitSequence s;
  s.generator = p.label;
  s.points.reserve(n + 1);
  s.points.push_back(x0);
  for (std::size_t i = 0; i < n; ++i) s.points.push_back(step(p, s.points.back()));
  return s;
}

double predicted_orbit_dimension(double alpha) {
  if (!(alpha > 1)) throw Error(ErrorCode::DomainError, "alpha must exceed 1, got " + num(alpha));
  return 1.0 - 1.0 / alpha;
}

NucleusTail nucleus_tail(std::span<const double> x, double delta) {
  if (!(delta > 0)) throw Error(ErrorCode::InvalidInput, "delta must be positive");
  const double two = 2 * delta;
  std::size_t split = x.size();
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] - x[i + 1] < two) {
      split = i;
      break;
    }
  }
  if (split == x.size()) {
    throw Error(ErrorCode::GapsNotEventuallyMonotone,
                "no gap below 2*delta among " + std::to_string(x.size()) + " points at delta=" + num(delta));
  }
  for (std::size_t i = split + 1; i + 1 < x.size(); ++i) {
    if (!(x[i] - x[i + 1] < two)) {
      throw Error(ErrorCode::GapsNotEventuallyMonotone,
                  "gap at n=" + std::to_string(i) + " exceeds 2*delta after the split at n=" + std::to_string(split));
    }
  }
  return {split, x[split] + delta + two * static_cast<double>(split)};
}

double union_length(std::span<const double> x, double delta) {
  if (x.empty()) return 0.0;
  // sweep upward from 0; points are decreasing so walk them in reverse
  double covered_to = x.back();  // [0, x_last] stands in for the unlisted tail
  double total = x.back();
  for (auto it = x.rbegin(); it != x.rend(); ++it) {
    const double lo = std::max(0.0, *it - delta), hi = *it + delta;
    if (hi <= covered_to) continue;
    total += hi - std::max(lo, covered_to);
    covered_to = hi;
  }
  return total;
}

DimensionEstimate sequence_dimension_exact(const OrbitSequence& s, const std::vector<double>& ladder, int discard) {
  if (ladder.size() < 8) throw Error(ErrorCode::InvalidInput, "ladder needs at least 8 rungs");
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    if (!(s.points[i] < s.points[i - 1]) || !(s.points[i] > 0)) {
      throw Error(ErrorCode::InvalidInput, "sequence must be strictly decreasing and positive");
    }
  }
  std::vector<double> lengths;
  double worst = 0.0;
  std::size_t previous_split = 0;
  for (std::size_t r = 0; r < ladder.size(); ++r) {
    const NucleusTail nt = nucleus_tail(s.points, ladder[r]);
    if (r > 0 && nt.split < previous_split) {
      throw std::logic_error("splitting index decreased as delta shrank");
    }
    previous_split = nt.split;
    const double brute = union_length(s.points, ladder[r]);
    worst = std::max(worst, std::abs(brute - nt.length) / nt.length);
    lengths.push_back(nt.length);
  }
  DimensionEstimate e = fit_dimension(ladder, std::move(lengths), 1, discard);
  e.crosscheck_error = worst;
  return e;
}

DimensionEstimate orbit_dimension(const Map1D& p, double x0, const std::vector<double>& ladder, int discard) {
  if (ladder.empty()) throw Error(ErrorCode::InvalidInput, "empty ladder");
  const double target = 2 * *std::min_element(ladder.begin(), ladder.end());
  if (!(x0 > 0 && x0 < p.radius)) throw Error(ErrorCode::DomainError, "x0 = " + num(x0) + " outside (0, radius)");
  OrbitSequence s;
  s.generator = p.label;
  s.points.push_back(x0);
  // iterate lazily until the smallest delta is resolved, then a little further
  // so the gaps after the split can be checked
  std::size_t resolved_at = 0;
  while (true) {
    const double next = step(p, s.points.back());
    const double gap = s.points.back() - next;
    s.points.push_back(next);
    if (resolved_at == 0 && gap < target) resolved_at = s.points.size();
    if (resolved_at != 0 && s.points.size() >= resolved_at + resolved_at / 8 + 16) break;
  }
  DimensionEstimate e = sequence_dimension_exact(s, ladder, discard);
  if (p.k) e.predicted = *p.k == 1 ? 0.0 : predicted_orbit_dimension(*p.k);
  return e;
}

void write_orbit_csv(std::ostream& os, const OrbitSequence& s) {
  os << "n,x\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.points.size(); ++i) os << i << ',' << s.points[i] << '\n';
}

}  // namespace pfocus
