#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pfocus/errors.hpp"
#include "pfocus/pwflow.hpp"

using namespace pfocus;

namespace {

constexpr double pi = std::numbers::pi;

PolyField focus(double lambda) {
  return {Poly2({{1, 0, lambda}, {0, 1, -pi}}), Poly2({{1, 0, pi}, {0, 1, lambda}})};
}

PiecewiseSystem glue(PolyField upper, PolyField lower) {
  PiecewiseSystem s;
  s.upper = std::move(upper);
  s.lower = std::move(lower);
  return s;
}

}  // namespace

TEST_CASE("half-turn closed forms") {
  for (double t : {1e-3, 1e-2, 0.1}) {
    CHECK(std::abs(flow_to_section(focus(0), t, Half::Upper).x + t) <= 1e-9);
    const double two = flow_to_section(focus(std::log(2.0)), t, Half::Upper).x;
    CHECK(std::abs(two + 2 * t) <= 1e-8 * t);
  }
  // x' = 1, y' = -2x from (-a, 0) through the upper half
  const PolyField ham{Poly2::constant(1.0), Poly2({{1, 0, -2.0}})};
  for (double a : {1e-3, 0.05, 0.2}) CHECK(std::abs(flow_to_section(ham, -a, Half::Upper).x - a) <= 1e-9);
}

TEST_CASE("flow_to_section guards") {
  CHECK_THROWS_AS(flow_to_section(focus(0), 0.0, Half::Upper), Error);
  // wrong side for the upper half
  CHECK_THROWS_AS(flow_to_section(focus(0), -0.1, Half::Upper), Error);
  FlowOptions small;
  small.radius = 0.05;
  try {
    flow_to_section(focus(std::log(4.0)), 0.04, Half::Upper, small);
    FAIL("expected escape");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EscapedNeighborhood);
  }
}

TEST_CASE("first return closed forms") {
  CHECK(std::abs(first_return(glue(focus(0), focus(0)), 0.1) - 0.1) <= 1e-9);
  const auto s = glue(focus(std::log(2.0)), focus(-std::log(2.0)));
  CHECK(std::abs(first_return(s, 0.1) - 0.1) <= 1e-8);
  // composability: same code path
  const double h = semi_monodromy(s, Half::Lower, semi_monodromy(s, Half::Upper, 0.07));
  CHECK(first_return(s, 0.07) == h);
}

TEST_CASE("classification") {
  const double l = 0.3;
  auto ff = classify(glue(focus(l), focus(l)));
  REQUIRE(ff.type);
  CHECK(*ff.type == PseudoFocusType::FF);
  CHECK(ff.samples == 1000);

  const PolyField lower_par{Poly2::constant(1.0), Poly2({{1, 0, 2.0}})};
  auto fp = classify(glue(focus(l), lower_par));
  REQUIRE(fp.type);
  CHECK(*fp.type == PseudoFocusType::FP);
  const PolyField upper_par{Poly2::constant(-1.0), Poly2({{1, 0, 2.0}})};
  auto pf = classify(glue(upper_par, focus(l)));
  REQUIRE(pf.type);
  CHECK(*pf.type == PseudoFocusType::PF);

  // x' = 1, y' = 2x + y has its tangent arcs below the axis: fine as a lower
  // half, not as an upper one
  const PolyField par{Poly2::constant(1.0), Poly2({{1, 0, 2.0}, {0, 1, 1.0}})};
  // the point reflection of par serves as the upper half
  const PolyField upper_pp{Poly2::constant(-1.0), Poly2({{1, 0, 2.0}, {0, 1, 1.0}})};
  auto pp = classify(glue(upper_pp, par));
  REQUIRE(pp.type);
  CHECK(*pp.type == PseudoFocusType::PP);
  auto literal = classify(glue(par, par));
  CHECK_FALSE(literal.valid());
  CHECK(literal.upper.kind == HalfKind::Invalid);
  CHECK(literal.lower.kind == HalfKind::ParabolicContact);

  // clockwise lower focus breaks the crossing condition
  auto bad = classify(glue(focus(l), focus(l).reversed()));
  CHECK_FALSE(bad.valid());
  REQUIRE_FALSE(bad.violations.empty());
  CHECK(bad.violations.front().find("crossing condition fails at x=") == 0);

  const PolyField node{Poly2({{1, 0, 1.0}}), Poly2({{0, 1, 2.0}})};
  CHECK(classify(glue(node, focus(l))).upper.kind == HalfKind::Invalid);
  // the seeded grid is reproducible
  CHECK(to_json(classify(glue(focus(l), focus(l)), 7)) == to_json(classify(glue(focus(l), focus(l)), 7)));
}

TEST_CASE("order estimation") {
  const auto xs = log_samples(1e-3, 1e-1, 12);
  const auto centre = estimate_order(glue(focus(0), focus(0)), xs);
  CHECK(centre.center_like);
  const auto s = estimate_order(glue(focus(std::log(2.0)), focus(-std::log(4.0))), xs);
  CHECK_FALSE(s.center_like);
  CHECK(s.k == 1);
  CHECK(s.c == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(estimate_order(glue(focus(0), focus(0)), log_samples(1e-2, 1e-1, 12)), Error);
}

TEST_CASE("parabolic transition is an involution") {
  const PolyField ham{Poly2::constant(1.0), Poly2({{1, 0, -2.0}})};
  for (double x : {1e-3, 1e-2, -0.05, 0.1}) {
    const double hx = transition_map(ham, x);
    CHECK(std::abs(hx + x) <= 1e-9);
    CHECK(std::abs(transition_map(ham, hx) - x) <= 1e-8);
  }
  // h = -x + 2x^4 - 8x^7: energy y - x h(x) is conserved along arcs
  auto h = [](double x) { return -x + 2 * std::pow(x, 4) - 8 * std::pow(x, 7); };
  const PolyField f{Poly2::constant(1.0), Poly2({{1, 0, -2.0}, {4, 0, 10.0}, {7, 0, -64.0}})};
  std::vector<Point> path;
  flow_to_section(f, -0.08, Half::Upper, {}, TimeDirection::Forward, &path, 1e-3);
  const double e0 = path.front().y - path.front().x * h(path.front().x);
  double worst = 0;
  for (const Point& p : path) worst = std::max(worst, std::abs(p.y - p.x * h(p.x) - e0));
  CHECK(worst <= 1e-8);
  for (std::size_t i = 1; i < path.size(); ++i) {
    CHECK(std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y) <= 1e-3);
  }
  CHECK(path.back().y == 0.0);
}

TEST_CASE("spiral tracing") {
  const auto trace = trace_spiral(glue(focus(0), focus(0)), 0.1, 3, 1e-3);
  REQUIRE(trace.returns.size() == 4);
  double dev = 0;
  const auto& poly = trace.set.polylines().front();
  for (const Point& p : poly) dev = std::max(dev, std::abs(std::hypot(p.x, p.y) - 0.1));
  CHECK(dev <= 1e-8);
  for (std::size_t i = 1; i < poly.size(); ++i) CHECK(std::hypot(poly[i].x - poly[i - 1].x, poly[i].y - poly[i - 1].y) <= 1e-3);
  // roughly three circumferences of vertices
  CHECK(poly.size() >= static_cast<std::size_t>(3 * 2 * pi * 0.1 / 1e-3));

  const auto decay = trace_spiral(glue(focus(-0.1), focus(-0.1)), 0.1, 4, 1e-2);
  for (std::size_t i = 1; i < decay.returns.size(); ++i) {
    CHECK(decay.returns[i] == doctest::Approx(decay.returns[i - 1] * std::exp(-0.2)).epsilon(1e-9));
  }
}

TEST_CASE("straightening") {
  const PolyField f{Poly2::constant(1.0), Poly2({{1, 0, 2.0}})};
  for (double a : {0.01, 0.1, -0.2}) {
    const Point p = straighten(f, {a, a * a});
    CHECK(p.x == a);
    CHECK(std::abs(p.y) <= 1e-10);
    CHECK(std::abs(straighten(f, {a, 0.0}).y + a * a) <= 1e-10);
  }
  const Point o = straighten(f, {0.0, 0.4});
  CHECK(o.y == 0.4);
  // constant along one trajectory of a non-normalized field
  const PolyField g{Poly2({{0, 0, 2.0}, {0, 1, 0.5}}), Poly2({{1, 0, 1.0}, {2, 0, 3.0}})};
  std::vector<Point> path;
  flow_to_section(g, -0.1, Half::Lower, {}, TimeDirection::Forward, &path, 5e-3);
  const double y0 = straighten(g, path.front()).y;
  for (const Point& p : path) CHECK(std::abs(straighten(g, p).y - y0) <= 1e-9);
}

TEST_CASE("system spec JSON") {
  auto s = glue(focus(0.2), focus(-0.1));
  s.radius = 0.5;
  s.metadata = {{"note", "x"}};
  const auto t = system_from_json(to_json(s));
  CHECK(t.upper.M == s.upper.M);
  CHECK(t.lower.N == s.lower.N);
  CHECK(t.radius == 0.5);
  CHECK(t.metadata == s.metadata);
  CHECK_THROWS_AS(system_from_json(nlohmann::json::parse("{\"upper\": {}}")), Error);
  CHECK_THROWS_AS(system_from_json(nlohmann::json::parse(
                      R"({"upper": {"M": [], "N": []}, "lower": {"M": [], "N": []}, "orientation": "sideways"})")),
                  Error);
}
