#include "pfocus/fracdim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "pfocus/errors.hpp"

namespace pfocus {

PlanarSet::PlanarSet(std::vector<std::vector<Point>> polylines) {
  for (auto& p : polylines) add_polyline(std::move(p));
}

PlanarSet PlanarSet::simplified(double spacing) const {
  PlanarSet out;
  for (const auto& chain : polylines_) {
    std::vector<Point> kept;
    kept.push_back(chain.front());
    for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
      const Point& last = kept.back();
      if (std::hypot(chain[i + 1].x - last.x, chain[i + 1].y - last.y) > spacing) kept.push_back(chain[i]);
    }
    if (chain.size() > 1) kept.push_back(chain.back());
    out.add_polyline(std::move(kept));
  }
  return out;
}

void PlanarSet::add_polyline(std::vector<Point> chain) {
  std::vector<Point> clean;
  clean.reserve(chain.size());
  for (const Point& p : chain) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::InvalidInput, "non-finite vertex");
    if (!clean.empty() && clean.back().x == p.x && clean.back().y == p.y) continue;
    clean.push_back(p);
  }
  if (clean.empty()) return;
  if (vertices_ == 0) box_ = {clean[0].x, clean[0].x, clean[0].y, clean[0].y};
  for (const Point& p : clean) {
    box_.xmin = std::min(box_.xmin, p.x);
    box_.xmax = std::max(box_.xmax, p.x);
    box_.ymin = std::min(box_.ymin, p.y);
    box_.ymax = std::max(box_.ymax, p.y);
  }
  vertices_ += clean.size();
  polylines_.push_back(std::move(clean));
}

namespace {

struct Segment {
  double ax, ay, dx, dy, len2, len;
  double ylo, yhi;  // y-range of the capsule
};

struct Interval {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void hull(double a, double b) {
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  bool empty() const { return !(lo < hi); }
};

void disk_row(double cx, double dy, double delta, Interval& out) {
  const double r2 = delta * delta - dy * dy;
  if (r2 <= 0) return;
  const double half = std::sqrt(r2);
  out.hull(cx - half, cx + half);
}

// {x : dist((x, y), segment) < delta} is an interval because capsules are convex
Interval capsule_row(const Segment& s, double y, double delta) {
  Interval out;
  const double dy = y - s.ay;
  disk_row(s.ax, dy, delta, out);
  if (s.len2 == 0) return out;
  disk_row(s.ax + s.dx, dy - s.dy, delta, out);

  // strip: 0 <= t <= 1 and |perp| < delta, both linear in u = x - ax
  double ulo = -std::numeric_limits<double>::infinity(), uhi = std::numeric_limits<double>::infinity();
  const double cross0 = s.dx * dy;
  if (s.dy != 0) {
    double a = (cross0 - delta * s.len) / s.dy, b = (cross0 + delta * s.len) / s.dy;
    if (a > b) std::swap(a, b);
    ulo = std::max(ulo, a);
    uhi = std::min(uhi, b);
  } else if (!(std::abs(cross0) < delta * s.len)) {
    return out;
  }
  if (s.dx != 0) {
    double a = (-dy * s.dy) / s.dx, b = (s.len2 - dy * s.dy) / s.dx;
    if (a > b) std::swap(a, b);
    ulo = std::max(ulo, a);
    uhi = std::min(uhi, b);
  } else {
    const double t = dy * s.dy / s.len2;
    if (t < 0 || t > 1) return out;
  }
  if (ulo < uhi) out.hull(s.ax + ulo, s.ax + uhi);
  return out;
}

std::vector<Segment> build_segments(const PlanarSet& set, double delta) {
  std::vector<Segment> segs;
  segs.reserve(set.vertex_count());
  for (const auto& chain : set.polylines()) {
    if (chain.size() == 1) {
      segs.push_back({chain[0].x, chain[0].y, 0, 0, 0, 0, chain[0].y - delta, chain[0].y + delta});
      continue;
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const Point a = chain[i], b = chain[i + 1];
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double len2 = dx * dx + dy * dy;
      segs.push_back({a.x, a.y, dx, dy, len2, std::sqrt(len2), std::min(a.y, b.y) - delta, std::max(a.y, b.y) + delta});
    }
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.ylo < b.ylo; });
  return segs;
}

}  // namespace

AreaRung neighborhood_area(const PlanarSet& set, double delta, const RasterOptions& opt) {
  if (!(delta > 0)) throw Error(ErrorCode::InvalidInput, "delta must be positive");
  if (set.empty()) throw Error(ErrorCode::InvalidInput, "empty planar set");
  if (opt.cells_per_delta < 4) throw Error(ErrorCode::InvalidInput, "cell size must be at most delta/4");

  const double h = delta / opt.cells_per_delta;
  const BoundingBox& b = set.bounding_box();
  const double x0 = b.xmin - delta - h, y0 = b.ymin - delta - h;
  const double cols = std::ceil((b.xmax - b.xmin + 2 * delta + 2 * h) / h);
  const double rows = std::ceil((b.ymax - b.ymin + 2 * delta + 2 * h) / h);
  if (cols * rows > opt.cell_budget) {
    std::ostringstream os;
    os << "grid of " << cols << " x " << rows << " cells exceeds the budget of " << opt.cell_budget;
    throw Error(ErrorCode::GridTooLarge, os.str());
  }

  const std::vector<Segment> segs = build_segments(set, delta);
  std::vector<const Segment*> active;
  std::vector<std::pair<std::int64_t, std::int64_t>> spans;
  std::size_t next = 0;
  std::uint64_t count = 0;
  const auto nrows = static_cast<std::int64_t>(rows);

  for (std::int64_t r = 0; r < nrows; ++r) {
    const double yc = y0 + (static_cast<double>(r) + 0.5) * h;
    while (next < segs.size() && segs[next].ylo < yc) active.push_back(&segs[next++]);
    std::erase_if(active, [yc](const Segment* s) { return s->yhi <= yc; });
    if (active.empty()) continue;

    spans.clear();
    for (const Segment* s : active) {
      const Interval iv = capsule_row(*s, yc, delta);
      if (iv.empty()) continue;
      // cell i has centre x0 + (i + 0.5) h
      const auto first = static_cast<std::int64_t>(std::ceil((iv.lo - x0) / h - 0.5));
      const auto last = static_cast<std::int64_t>(std::floor((iv.hi - x0) / h - 0.5));
      if (first <= last) spans.emplace_back(first, last);
    }
    std::sort(spans.begin(), spans.end());
    std::int64_t cur_lo = 0, cur_hi = -1;
    bool open = false;
    for (const auto& [lo, hi] : spans) {
      if (!open || lo > cur_hi + 1) {
        if (open) count += static_cast<std::uint64_t>(cur_hi - cur_lo + 1);
        cur_lo = lo;
        cur_hi = hi;
        open = true;
      } else {
        cur_hi = std::max(cur_hi, hi);
      }
    }
    if (open) count += static_cast<std::uint64_t>(cur_hi - cur_lo + 1);
  }
  return {delta, static_cast<double>(count) * h * h, h, count};
}

AreaLadder area_ladder(const PlanarSet& s, const std::vector<double>& ladder, const RasterOptions& opt) {
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (!(ladder[i] < ladder[i - 1])) throw Error(ErrorCode::InvalidInput, "ladder must be strictly decreasing");
  }
  AreaLadder out;
  for (double d : ladder) out.rungs.push_back(neighborhood_area(s, d, opt));
  return out;
}

DimensionEstimate minkowski_fit(const AreaLadder& l, int discard) {
  if (l.rungs.size() < 8) throw Error(ErrorCode::InvalidInput, "minkowski_fit needs at least 8 rungs");
  std::vector<double> deltas, areas;
  for (const auto& r : l.rungs) {
    deltas.push_back(r.delta);
    areas.push_back(r.area);
  }
  return fit_dimension(std::move(deltas), std::move(areas), 2, discard);
}

SpiralPrediction predicted_spiral_dimension(FocusKind kind, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidOrder, "order must be nonnegative");
  switch (kind) {
    case FocusKind::AnalyticWeakFocus:
      if (k == 0) return {1.0, false};
      return {4.0 * k / (2.0 * k + 1), false};
    case FocusKind::FF:
      if (k < 1) throw Error(ErrorCode::InvalidOrder, "pseudo-focus order must be at least 1");
      return {k == 1 ? 1.0 : 2.0 - 2.0 / k, k == 2};
    case FocusKind::PP:
      if (k < 2 || k % 2 != 0) throw Error(ErrorCode::InvalidOrder, "PP pseudo-foci have even order, got " + std::to_string(k));
      return {2.0 - 3.0 / (k + 1), k == 2};
  }
  throw Error(ErrorCode::InvalidInput, "unknown focus kind");
}

void write_planar_csv(std::ostream& os, const PlanarSet& s) {
  os << "polyline,x,y\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.polylines().size(); ++i)
    for (const Point& p : s.polylines()[i]) os << i << ',' << p.x << ',' << p.y << '\n';
}

PlanarSet read_planar_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "empty CSV");
  std::vector<std::vector<Point>> chains;
  long current = -1;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long id;
    char c1, c2;
    Point p;
    if (!(ls >> id >> c1 >> p.x >> c2 >> p.y) || c1 != ',' || c2 != ',') {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected polyline,x,y");
    }
    if (id != current) {
      chains.emplace_back();
      current = id;
    }
    chains.back().push_back(p);
  }
  return PlanarSet(std::move(chains));
}

nlohmann::json to_json(const AreaLadder& l) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : l.rungs) out.push_back({{"delta", r.delta}, {"area", r.area}, {"cell", r.cell}, {"cells", r.cells_counted}});
  return out;
}

void write_svg(std::ostream& os, const PlanarSet& s, std::optional<double> delta, int pixels) {
  const BoundingBox& b = s.bounding_box();
  const double pad = delta.value_or(0.0) * 1.5 + 1e-12;
  const double w = b.xmax - b.xmin + 2 * pad, h = b.ymax - b.ymin + 2 * pad;
  const double scale = pixels / std::max(w, h);
  os << std::setprecision(7);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << std::ceil(w * scale) << "\" height=\""
     << std::ceil(h * scale) << "\">\n";
  // flip y so the plane reads mathematically
  os << "<g transform=\"scale(" << scale << "," << -scale << ") translate(" << -(b.xmin - pad) << "," << -(b.ymax + pad)
     << ")\" fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
  auto path = [&](const std::vector<Point>& chain) {
    os << "M" << chain[0].x << ' ' << chain[0].y;
    for (std::size_t i = 1; i < chain.size(); ++i) os << "L" << chain[i].x << ' ' << chain[i].y;
    if (chain.size() == 1) os << "l0 0";
  };
  if (delta) {
    os << "<path stroke=\"#9ecae1\" stroke-width=\"" << 2 * *delta << "\" d=\"";
    for (const auto& c : s.polylines()) path(c);
    os << "\"/>\n";
  }
  os << "<path stroke=\"#08306b\" stroke-width=\"" << 1.0 / scale << "\" d=\"";
  for (const auto& c : s.polylines()) path(c);
  os << "\"/>\n</g>\n</svg>\n";
}

}  // namespace pfocus
