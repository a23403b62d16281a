#include "pfocus/pwflow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pfocus/errors.hpp"
#include "pfocus/fit.hpp"

namespace pfocus {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Rhs make_rhs(const PolyField& f) {
  return [&f](const Vec2& p) -> Vec2 { return {f.M(p[0], p[1]), f.N(p[0], p[1])}; };
}

double dist(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

// Appends dense vertices on (ta, tb] so consecutive vertices are at most `spacing` apart.
void sample_step(const Dop853& solver, double ta, double tb, double spacing, std::vector<Point>& path) {
  const Vec2 a = solver.dense(ta);
  const Vec2 b = solver.dense(tb);
  int m = std::max(1, static_cast<int>(std::ceil(1.25 * dist(a, b) / spacing)));
  for (;;) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(m));
    Vec2 prev = a;
    bool ok = true;
    for (int j = 1; j <= m; ++j) {
      const Vec2 p = j == m ? b : solver.dense(ta + (tb - ta) * j / m);
      if (dist(p, prev) > spacing) {
        ok = false;
        break;
      }
      pts.push_back({p[0], p[1]});
      prev = p;
    }
    if (ok) {
      path.insert(path.end(), pts.begin(), pts.end());
      return;
    }
    m *= 2;
  }
}

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

Crossing flow_to_section(const PolyField& f, double x, Half half, const FlowOptions& opt, TimeDirection dir,
                         std::vector<Point>* path, double max_spacing) {
  if (!std::isfinite(x) || x == 0.0) throw Error(ErrorCode::InvalidInput, "start abscissa must be finite and nonzero");
  if (std::abs(x) >= opt.radius) {
    throw Error(ErrorCode::EscapedNeighborhood, "start x=" + fmt(x) + " outside radius " + fmt(opt.radius));
  }
  if (path && !(max_spacing > 0)) throw Error(ErrorCode::InvalidInput, "vertex spacing must be positive");
  const double side = half == Half::Upper ? 1.0 : -1.0;
  const int d = dir == TimeDirection::Forward ? 1 : -1;
  const auto [m0, n0] = f(x, 0.0);
  if (side * d * n0 == 0.0) throw Error(ErrorCode::TangentialAmbiguity, "field tangent to the axis at x=" + fmt(x));
  if (side * d * n0 < 0.0) {
    throw Error(ErrorCode::InvalidInput, "field does not enter the " + std::string(half == Half::Upper ? "upper" : "lower") +
                                             " half-plane at x=" + fmt(x));
  }
  const Rhs rhs = make_rhs(f);
  const double speed = std::hypot(m0, n0);
  OdeOptions oo;
  oo.rtol = opt.rtol;
  oo.atol = opt.atol;
  oo.max_steps = opt.max_steps;
  oo.initial_step = 0.05 * std::abs(x) / speed;

  const std::size_t path_start = path ? path->size() : 0;
  for (int restart = 0; restart < 20; ++restart, oo.initial_step /= 16) {
    if (path) {
      path->resize(path_start);
      path->push_back({x, 0.0});
    }
    Dop853 solver(rhs, {x, 0.0}, 0.0, d, oo);
    bool first = true;
    bool retry = false;
    for (;;) {
      solver.step();
      const Vec2& y = solver.y();
      auto escape = [&](const Vec2& p, double t) {
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || std::hypot(p[0], p[1]) > opt.radius) {
          throw Error(ErrorCode::EscapedNeighborhood,
                      "trajectory from x=" + fmt(x) + " left the radius " + fmt(opt.radius) + " at t=" + fmt(t));
        }
      };
      const double t0 = solver.t_prev(), t1 = solver.t();
      // look for the first sign change on a few interior samples
      double ta = t0, ga = first ? 0.0 : side * solver.y_prev()[1];
      std::optional<std::pair<double, double>> bracket;
      constexpr int kSub = 4;
      for (int j = 1; j <= kSub; ++j) {
        const double tj = j == kSub ? t1 : t0 + (t1 - t0) * j / kSub;
        const Vec2 pj = j == kSub ? y : solver.dense(tj);
        const double gj = side * pj[1];
        if (gj <= 0.0) {
          if (ga <= 0.0) {
            retry = true;  // arc shorter than the first sub-step
          } else {
            bracket = {ta, tj};
          }
          break;
        }
        escape(pj, tj);
        ta = tj;
        ga = gj;
      }
      if (retry) break;
      first = false;
      if (!bracket) {
        if (path) sample_step(solver, t0, t1, max_spacing, *path);
        continue;
      }
      // Illinois iteration on the dense output
      auto g = [&](double t) { return side * solver.dense(t)[1]; };
      double a = bracket->first, b = bracket->second;
      double fa = g(a), fb = g(b);
      int stale = 0;
      for (int it = 0; it < 200 && std::abs(b - a) > 4e-16 * std::max(1.0, std::abs(b)); ++it) {
        double c = b - fb * (b - a) / (fb - fa);
        if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
        const double fc = g(c);
        if (fc == 0.0) {
          a = b = c;
          fa = fb = 0.0;
          break;
        }
        if (fc > 0) {
          a = c;
          fa = fc;
          if (stale == -1) fb *= 0.5;
          stale = -1;
        } else {
          b = c;
          fb = fc;
          if (stale == 1) fa *= 0.5;
          stale = 1;
        }
      }
      const double tc = std::abs(fa) < std::abs(fb) ? a : b;
      Vec2 p = solver.dense(tc);
      // Newton polish along the field
      double tcross = tc;
      for (int it = 0; it < 3 && p[1] != 0.0; ++it) {
        const Vec2 v = rhs(p);
        if (v[1] == 0.0) break;
        const double dt = -p[1] / v[1];
        p = {p[0] + v[0] * dt, p[1] + v[1] * dt};
        tcross += dt;
      }
      if (std::abs(p[1]) > 1e-12) {
        throw Error(ErrorCode::TangentialAmbiguity, "root polishing stalled at |y|=" + fmt(std::abs(p[1])));
      }
      const auto [mc, nc] = f(p[0], 0.0);
      if (!(side * d * nc < 0.0) || std::abs(nc) <= 1e-11 * std::hypot(mc, nc)) {
        throw Error(ErrorCode::TangentialAmbiguity, "non-transversal axis crossing at x=" + fmt(p[0]));
      }
      if (path) {
        sample_step(solver, t0, tc, max_spacing, *path);
        path->back() = {p[0], 0.0};
      }
      return {p[0], std::abs(tcross), solver.accepted()};
    }
  }
  throw Error(ErrorCode::NoCrossing, "could not resolve a crossing from x=" + fmt(x));
}

FlowOptions PiecewiseSystem::flow_options(double rtol, double atol) const {
  FlowOptions o;
  o.rtol = rtol;
  o.atol = atol;
  o.radius = radius;
  return o;
}

double semi_monodromy(const PiecewiseSystem& s, Half half, double x, const FlowOptions& opt) {
  const double hx = flow_to_section(s.field(half), x, half, opt).x;
  if (!(hx * x < 0)) {
    throw Error(ErrorCode::OrientationViolated, "half-turn from x=" + fmt(x) + " landed at x=" + fmt(hx));
  }
  return hx;
}

double semi_monodromy(const PiecewiseSystem& s, Half half, double x) {
  return semi_monodromy(s, half, x, s.flow_options());
}

double transition_map(const PolyField& f, double x, const FlowOptions& opt) {
  const double p = f.M.coeff(0, 0) * f.N.coeff(1, 0);
  if (f.N.coeff(0, 0) != 0.0 || p == 0.0) {
    throw Error(ErrorCode::InvalidInput, "field has no parabolic contact at the origin");
  }
  const Half half = p > 0 ? Half::Lower : Half::Upper;
  const double side = half == Half::Upper ? 1.0 : -1.0;
  const TimeDirection dir = side * f.N(x, 0.0) > 0 ? TimeDirection::Forward : TimeDirection::Backward;
  const double hx = flow_to_section(f, x, half, opt, dir).x;
  if (!(hx * x < 0)) {
    throw Error(ErrorCode::OrientationViolated, "transition from x=" + fmt(x) + " landed at x=" + fmt(hx));
  }
  return hx;
}

double first_return(const PiecewiseSystem& s, double x, const FlowOptions& opt) {
  if (!(x > 0)) throw Error(ErrorCode::InvalidInput, "first return needs x > 0");
  if (s.counterclockwise) return semi_monodromy(s, Half::Lower, semi_monodromy(s, Half::Upper, x, opt), opt);
  return semi_monodromy(s, Half::Upper, semi_monodromy(s, Half::Lower, x, opt), opt);
}

double first_return(const PiecewiseSystem& s, double x) { return first_return(s, x, s.flow_options()); }

std::string to_string(HalfKind k) {
  switch (k) {
    case HalfKind::NondegenerateFocus: return "nondegenerate-focus";
    case HalfKind::ParabolicContact: return "parabolic-contact";
    case HalfKind::Invalid: return "invalid";
  }
  return "?";
}

std::string to_string(PseudoFocusType t) {
  switch (t) {
    case PseudoFocusType::FF: return "FF";
    case PseudoFocusType::PP: return "PP";
    case PseudoFocusType::FP: return "FP";
    case PseudoFocusType::PF: return "PF";
  }
  return "?";
}

namespace {

HalfReport classify_half(const PolyField& f, Half half) {
  const double m00 = f.M.coeff(0, 0), n00 = f.N.coeff(0, 0);
  if (m00 == 0.0 && n00 == 0.0) {
    const double a = f.M.coeff(1, 0), b = f.M.coeff(0, 1), c = f.N.coeff(1, 0), d = f.N.coeff(0, 1);
    const double disc = (a - d) * (a - d) + 4 * b * c;
    if (disc < 0) return {HalfKind::NondegenerateFocus, ""};
    return {HalfKind::Invalid, "linearization at the origin has real eigenvalues (discriminant " + fmt(disc) + ")"};
  }
  if (n00 != 0.0) return {HalfKind::Invalid, "N(0,0) = " + fmt(n00) + " is nonzero"};
  const double p = m00 * f.N.coeff(1, 0);
  if (p == 0.0) return {HalfKind::Invalid, "M(0,0)*dN/dx(0,0) = 0: contact is not parabolic"};
  // p > 0 puts the tangent arcs below the axis, p < 0 above
  if (half == Half::Lower && p < 0) {
    return {HalfKind::Invalid, "M(0,0)*dN/dx(0,0) = " + fmt(p) + " < 0: contact arcs lie in the upper half-plane"};
  }
  if (half == Half::Upper && p > 0) {
    return {HalfKind::Invalid, "M(0,0)*dN/dx(0,0) = " + fmt(p) + " > 0: contact arcs lie in the lower half-plane"};
  }
  return {HalfKind::ParabolicContact, ""};
}

}  // namespace

ContactClass classify(const PiecewiseSystem& s, std::optional<std::uint64_t> seed) {
  ContactClass out;
  out.radius = s.radius;
  out.upper = classify_half(s.upper, Half::Upper);
  out.lower = classify_half(s.lower, Half::Lower);
  if (out.upper.kind == HalfKind::Invalid) out.violations.push_back("upper: " + out.upper.reason);
  if (out.lower.kind == HalfKind::Invalid) out.violations.push_back("lower: " + out.lower.reason);

  constexpr int kMagnitudes = 500;
  const double lo = std::log(1e-6 * s.radius), hi = std::log(s.radius);
  const double step = (hi - lo) / kMagnitudes;
  std::mt19937_64 rng(seed.value_or(0));
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  bool crossing_ok = true, orientation_ok = true;
  for (int i = 0; i < kMagnitudes; ++i) {
    // midpoints by default; a seed draws a random point in each log cell
    const double u = seed ? jitter(rng) : 0.5;
    const double r = std::exp(lo + (i + u) * step);
    for (double x : {r, -r}) {
      ++out.samples;
      const double np = s.upper.N(x, 0.0), nm = s.lower.N(x, 0.0);
      if (crossing_ok && !(np * nm > 0)) {
        crossing_ok = false;
        out.violations.push_back("crossing condition fails at x=" + fmt(x));
      }
      const int want = s.counterclockwise ? sign(x) : -sign(x);
      if (orientation_ok && (sign(np) != want || sign(nm) != want)) {
        orientation_ok = false;
        out.violations.push_back("orientation condition fails at x=" + fmt(x));
      }
    }
  }
  if (out.violations.empty()) {
    const bool uf = out.upper.kind == HalfKind::NondegenerateFocus;
    const bool lf = out.lower.kind == HalfKind::NondegenerateFocus;
    out.type = uf ? (lf ? PseudoFocusType::FF : PseudoFocusType::FP) : (lf ? PseudoFocusType::PF : PseudoFocusType::PP);
  }
  return out;
}

nlohmann::json to_json(const ContactClass& c) {
  nlohmann::json j;
  j["upper"] = {{"kind", to_string(c.upper.kind)}};
  if (!c.upper.reason.empty()) j["upper"]["reason"] = c.upper.reason;
  j["lower"] = {{"kind", to_string(c.lower.kind)}};
  if (!c.lower.reason.empty()) j["lower"]["reason"] = c.lower.reason;
  j["type"] = c.type ? nlohmann::json(to_string(*c.type)) : nlohmann::json("invalid");
  j["violations"] = c.violations;
  j["neighborhood_radius"] = c.radius;
  j["samples"] = c.samples;
  return j;
}

double validated_radius(const PiecewiseSystem& s, double max_radius) {
  constexpr int kSamples = 4000;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = max_radius * std::pow(1e-6, 1.0 - static_cast<double>(i) / kSamples);
    for (double x : {r, -r}) {
      const double np = s.upper.N(x, 0.0), nm = s.lower.N(x, 0.0);
      const int want = s.counterclockwise ? sign(x) : -sign(x);
      if (!(np * nm > 0) || sign(np) != want || sign(nm) != want) return 0.5 * r;
    }
  }
  return max_radius;
}

std::vector<double> log_samples(double lo, double hi, int n) {
  if (!(lo > 0) || !(hi > lo) || n < 2) throw Error(ErrorCode::InvalidInput, "log_samples needs 0 < lo < hi and n >= 2");
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return xs;
}

OrderEstimate estimate_order(const PiecewiseSystem& s, const std::vector<double>& xs, const FlowOptions& opt) {
  if (xs.size() < 12) throw Error(ErrorCode::InvalidInput, "estimate_order needs at least 12 samples");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (!(*mn > 0) || *mx >= s.radius) throw Error(ErrorCode::InvalidInput, "samples must lie in (0, radius)");
  if (std::log10(*mx / *mn) < 1.5) throw Error(ErrorCode::InvalidInput, "samples must span at least 1.5 decades");

  FlowOptions loose = opt;
  loose.rtol *= 100;
  loose.atol *= 100;
  OrderEstimate e;
  std::vector<double> lx, ly;
  int positive = 0, negative = 0;
  for (double x : xs) {
    const double p = first_return(s, x, opt);
    const double q = first_return(s, x, loose);
    const double delta = p - x;
    const double err = std::max(std::abs(p - q), 4e-16 * x);
    e.xs.push_back(x);
    e.displacements.push_back(delta);
    e.errors.push_back(err);
    if (std::abs(delta) > 10 * err) {
      lx.push_back(std::log(x));
      ly.push_back(std::log(std::abs(delta)));
      (delta > 0 ? positive : negative)++;
    }
  }
  e.resolved = static_cast<int>(lx.size());
  if (e.resolved == 0) {
    e.center_like = true;
    return e;
  }
  const double span = (*std::max_element(lx.begin(), lx.end()) - *std::min_element(lx.begin(), lx.end())) / std::log(10.0);
  if (e.resolved < 8 || span < 1.0) {
    throw Error(ErrorCode::NotResolved, std::to_string(e.resolved) + " of " + std::to_string(xs.size()) +
                                            " samples resolved above the integration error");
  }
  if (positive && negative) throw Error(ErrorCode::NotResolved, "displacement changes sign across the samples");
  const LinearFit fit = least_squares(lx, ly);
  e.slope = fit.slope;
  e.intercept = fit.intercept;
  e.rms_residual = fit.rms_residual;
  e.k = static_cast<int>(std::lround(fit.slope));
  if (std::abs(fit.slope - e.k) > 0.15) {
    throw Error(ErrorCode::NonIntegerSlope, "fitted slope " + fmt(fit.slope) + " is not near an integer");
  }
  e.c = (negative ? 1.0 : -1.0) * std::exp(fit.intercept);
  return e;
}

OrderEstimate estimate_order(const PiecewiseSystem& s, const std::vector<double>& xs) {
  return estimate_order(s, xs, s.flow_options());
}

nlohmann::json to_json(const OrderEstimate& e) {
  nlohmann::json j;
  j["center_like"] = e.center_like;
  if (!e.center_like) {
    j["k"] = e.k;
    j["c"] = e.c;
    j["slope"] = e.slope;
    j["intercept"] = e.intercept;
    j["rms_residual"] = e.rms_residual;
  }
  j["resolved"] = e.resolved;
  j["samples"] = nlohmann::json::array();
  for (std::size_t i = 0; i < e.xs.size(); ++i) {
    j["samples"].push_back({{"x", e.xs[i]}, {"displacement", e.displacements[i]}, {"error", e.errors[i]}});
  }
  return j;
}

SpiralTrace trace_spiral(const PiecewiseSystem& s, double x0, int n_turns, double max_spacing, const FlowOptions& opt) {
  if (n_turns < 1) throw Error(ErrorCode::InvalidInput, "need at least one turn");
  if (!(max_spacing > 0)) throw Error(ErrorCode::InvalidInput, "vertex spacing must be positive");
  SpiralTrace out;
  std::vector<Point> path;
  double x = x0;
  out.returns.push_back(x);
  // first half is the one the field enters from (x0, 0)
  const double side0 = s.upper.N(x0, 0.0) > 0 ? 1.0 : -1.0;
  const Half first = side0 > 0 ? Half::Upper : Half::Lower;
  const Half second = first == Half::Upper ? Half::Lower : Half::Upper;
  for (int turn = 0; turn < n_turns; ++turn) {
    for (Half h : {first, second}) {
      std::vector<Point> piece;
      const Crossing c = flow_to_section(s.field(h), x, h, opt, TimeDirection::Forward, &piece, max_spacing);
      if (!(c.x * x < 0)) {
        throw Error(ErrorCode::OrientationViolated, "half-turn from x=" + fmt(x) + " landed at x=" + fmt(c.x));
      }
      path.insert(path.end(), path.empty() ? piece.begin() : piece.begin() + 1, piece.end());
      x = c.x;
    }
    out.returns.push_back(x);
  }
  out.set.add_polyline(std::move(path));
  return out;
}

SpiralTrace trace_spiral(const PiecewiseSystem& s, double x0, int n_turns, double max_spacing) {
  return trace_spiral(s, x0, n_turns, max_spacing, s.flow_options());
}

Point straighten(const PolyField& f, Point p, const FlowOptions& opt) {
  if (p.x == 0.0) return p;
  const Rhs rhs = [&f](const Vec2& q) -> Vec2 {
    const double m = f.M(q[0], q[1]);
    if (m == 0.0) throw Error(ErrorCode::DomainError, "M vanishes; time rescaling undefined");
    return {1.0, f.N(q[0], q[1]) / m};
  };
  OdeOptions oo;
  oo.rtol = opt.rtol;
  oo.atol = opt.atol;
  oo.max_steps = opt.max_steps;
  const Vec2 end = integrate(rhs, {p.x, p.y}, -p.x, oo);
  return {p.x, end[1]};
}

}  // namespace pfocus
