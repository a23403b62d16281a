#pragma once

#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "pfocus/jets.hpp"
#include "pfocus/poly.hpp"
#include "pfocus/pwflow.hpp"

namespace pfocus {

/// Linear focus x' = lambda x - pi y, y' = pi x + lambda y; h(t) = -exp(lambda) t.
PolyField hyperbolic_focus_field(double lambda);

/// x' = -pi y - x q, y' = pi x - y q with q = alpha r^2k + gamma r^4k and
/// gamma = beta + (2k+1) alpha^2 / 2, so h(t) = -t + alpha t^(2k+1) + beta t^(4k+1) + ...
PolyField weak_focus_field(int k, double alpha, double beta);

Rational weak_focus_gamma(int k, const Rational& alpha, const Rational& beta);

/// Exact half-turn germ -R(1, t) of r' = -(alpha r^(2k+1) + gamma r^(4k+1)).
Jet weak_focus_semimonodromy(int k, const Rational& alpha, const Rational& gamma, int order);

struct RealizedField {
  PolyField field;
  /// semi-monodromy or transition jet the field realizes
  Jet expected = Jet::identity(1);
  /// agreement with `expected` is guaranteed through this order
  int valid_through = 0;
  /// the jet the realized map actually has as a germ, to the working order
  Jet realized = Jet::identity(1);
  std::string base;
  int total_degree = 0;
};

/// Field whose upper (and lower) half-turn map agrees with h through order N.
RealizedField prescribed_semimonodromy_field(const Jet& h, int N);

/// x' = 1, y' = trunc_N(h(x) + x h'(x)). Its tangent arcs lie above the axis
/// and are swept left to right.
RealizedField hamiltonian_parabolic_field(const Jet& h, int N);

/// Turns a left-to-right upper parabolic piece into a counterclockwise upper
/// half (time reversal) or a counterclockwise lower half (mirror in the axis).
PolyField counterclockwise_upper(const PolyField& f);
PolyField counterclockwise_lower(const PolyField& f);

struct Infeasible {
  std::string branch;
  std::string reason;
};

struct Feasibility {
  bool feasible = false;
  std::string branch;
};

/// Pseudo focus of order k from foci whose semi-monodromies have orders k1, k2
/// (order 0 = hyperbolic).
Feasibility ff_feasibility(int k1, int k2, int k);
/// Focus of order k glued to a parabolic half, target order n.
Feasibility mixed_feasibility(int k, int n);
/// Two parabolic halves, target order n.
Feasibility pp_feasibility(int n);

using Realization = std::variant<PiecewiseSystem, Infeasible>;

Realization realize_ff(int k1, int k2, int k);
Realization realize_mixed(int k, int n);
Realization realize_pp(int n);

nlohmann::json to_json(const Infeasible& i);

}  // namespace pfocus
