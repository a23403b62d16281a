#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pfocus/fit.hpp"

namespace pfocus {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BoundingBox {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

/// Union of polylines in the plane; a single-vertex polyline is a point.
class PlanarSet {
 public:
  PlanarSet() = default;
  explicit PlanarSet(std::vector<std::vector<Point>> polylines);

  /// Appends a chain, dropping consecutive duplicate vertices.
  void add_polyline(std::vector<Point> chain);
  void add_point(Point p) { add_polyline({p}); }

  const std::vector<std::vector<Point>>& polylines() const noexcept { return polylines_; }
  const BoundingBox& bounding_box() const noexcept { return box_; }
  std::size_t vertex_count() const noexcept { return vertices_; }
  bool empty() const noexcept { return vertices_ == 0; }

  /// Drops vertices while consecutive kept vertices stay within `spacing`;
  /// endpoints are kept. Chains already coarser than `spacing` are unchanged.
  PlanarSet simplified(double spacing) const;

 private:
  std::vector<std::vector<Point>> polylines_;
  BoundingBox box_;
  std::size_t vertices_ = 0;
};

struct RasterOptions {
  /// cells per delta along each axis; at least 4
  int cells_per_delta = 5;
  double cell_budget = 2e9;
};

struct AreaRung {
  double delta = 0.0;
  double area = 0.0;
  double cell = 0.0;
  std::uint64_t cells_counted = 0;
};

struct AreaLadder {
  std::vector<AreaRung> rungs;
};

/// Area of {p : dist(p, S) < delta} on a uniform grid: a cell counts when its
/// centre is within delta of some segment. GridTooLarge past the cell budget.
AreaRung neighborhood_area(const PlanarSet& s, double delta, const RasterOptions& opt = {});

AreaLadder area_ladder(const PlanarSet& s, const std::vector<double>& ladder, const RasterOptions& opt = {});

/// 2 - slope of ln|G_delta| against ln delta. Needs at least 8 rungs.
DimensionEstimate minkowski_fit(const AreaLadder& ladder, int discard = kDefaultDiscard);

enum class FocusKind { AnalyticWeakFocus, FF, PP };

struct SpiralPrediction {
  double value = 0.0;
  /// true where the dimension is attained with a logarithmic correction
  bool degenerate = false;
};

/// Weak focus of order k: 4k/(2k+1) (k = 0 gives 1). FF and mixed: 2 - 2/k, 1 for k = 1.
/// PP (k even): 2 - 3/(k+1). k = 2 is flagged degenerate for FF/mixed and PP.
SpiralPrediction predicted_spiral_dimension(FocusKind kind, int k);

void write_planar_csv(std::ostream& os, const PlanarSet& s);
PlanarSet read_planar_csv(std::istream& is);
nlohmann::json to_json(const AreaLadder& l);
/// Polylines plus the delta-neighbourhood drawn as a round-capped stroke of width 2 delta.
void write_svg(std::ostream& os, const PlanarSet& s, std::optional<double> delta, int pixels = 800);

}  // namespace pfocus
