#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfocus/fracdim.hpp"
#include "pfocus/ode.hpp"
#include "pfocus/poly.hpp"

namespace pfocus {

enum class Half { Upper, Lower };
enum class TimeDirection { Forward, Backward };

struct FlowOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  /// trajectories leaving the disk of this radius raise EscapedNeighborhood
  double radius = 1.0;
  long max_steps = 200000;
};

struct Crossing {
  double x = 0.0;
  double time = 0.0;
  long steps = 0;
};

/// Flows (x, 0) through the requested half-plane until it meets the axis again.
/// The time direction must make the field enter that half-plane at the start.
/// When `path` is given, the dense trajectory is appended with vertex spacing
/// at most `max_spacing`, ending exactly on the axis.
Crossing flow_to_section(const PolyField& f, double x, Half half, const FlowOptions& opt = {},
                         TimeDirection dir = TimeDirection::Forward, std::vector<Point>* path = nullptr,
                         double max_spacing = 0.0);

struct PiecewiseSystem {
  PolyField upper;
  PolyField lower;
  bool counterclockwise = true;
  double radius = 1.0;
  nlohmann::json metadata = nlohmann::json::object();

  FlowOptions flow_options(double rtol = 1e-12, double atol = 1e-12) const;
  const PolyField& field(Half h) const { return h == Half::Upper ? upper : lower; }
};

nlohmann::json to_json(const PiecewiseSystem& s);
PiecewiseSystem system_from_json(const nlohmann::json& j);
PiecewiseSystem load_system(const std::string& path);

/// Half-turn map of one half-field; h(x) has the opposite sign to x.
double semi_monodromy(const PiecewiseSystem& s, Half half, double x, const FlowOptions& opt);
double semi_monodromy(const PiecewiseSystem& s, Half half, double x);

/// Second axis intersection of the trajectory through (x, 0) for a field with
/// parabolic contact at the origin; the sweep direction is chosen automatically.
double transition_map(const PolyField& f, double x, const FlowOptions& opt = {});

/// P(x) = h-(h+(x)) for x > 0 (counterclockwise), h+(h-(x)) otherwise.
double first_return(const PiecewiseSystem& s, double x, const FlowOptions& opt);
double first_return(const PiecewiseSystem& s, double x);

enum class HalfKind { NondegenerateFocus, ParabolicContact, Invalid };
enum class PseudoFocusType { FF, PP, FP, PF };

std::string to_string(HalfKind k);
std::string to_string(PseudoFocusType t);

struct HalfReport {
  HalfKind kind = HalfKind::Invalid;
  std::string reason;
};

struct ContactClass {
  HalfReport upper;
  HalfReport lower;
  std::optional<PseudoFocusType> type;
  /// first violated condition, empty when valid
  std::vector<std::string> violations;
  double radius = 0.0;
  int samples = 0;

  bool valid() const { return type.has_value(); }
};

/// Exact algebraic tests on the coefficients plus a sampled check of the
/// crossing and orientation conditions on 10^3 points in the punctured
/// neighbourhood. A seed jitters the sample grid.
ContactClass classify(const PiecewiseSystem& s, std::optional<std::uint64_t> seed = std::nullopt);

nlohmann::json to_json(const ContactClass& c);

/// Half of the smallest |x| in (0, max_radius] where the sampled crossing or
/// orientation condition fails; max_radius when none does.
double validated_radius(const PiecewiseSystem& s, double max_radius = 1.0);

struct OrderEstimate {
  bool center_like = false;
  int k = 0;
  double c = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::vector<double> xs;
  std::vector<double> displacements;
  std::vector<double> errors;
  int resolved = 0;
};

/// Fits ln|P(x) - x| against ln x. Integration error is estimated from a second
/// run at 100x looser tolerances; a sample counts when |P(x) - x| exceeds ten
/// times that error.
OrderEstimate estimate_order(const PiecewiseSystem& s, const std::vector<double>& xs, const FlowOptions& opt);
OrderEstimate estimate_order(const PiecewiseSystem& s, const std::vector<double>& xs);

nlohmann::json to_json(const OrderEstimate& e);

/// n log-spaced sample abscissae in [lo, hi].
std::vector<double> log_samples(double lo, double hi, int n);

struct SpiralTrace {
  PlanarSet set;
  /// axis crossings on the starting side, returns[0] = x0
  std::vector<double> returns;
};

SpiralTrace trace_spiral(const PiecewiseSystem& s, double x0, int n_turns, double max_spacing,
                         const FlowOptions& opt);
SpiralTrace trace_spiral(const PiecewiseSystem& s, double x0, int n_turns, double max_spacing);

/// (x, Y(-x, x, y)) for the time-rescaled field (1, N/M).
Point straighten(const PolyField& f, Point p, const FlowOptions& opt = {});

}  // namespace pfocus
