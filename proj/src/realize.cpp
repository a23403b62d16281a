#include "pfocus/realize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "pfocus/errors.hpp"
#include "pfocus/jet_io.hpp"

namespace pfocus {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> degree_indexed(const Jet& f, int max_degree) {
  std::vector<double> out(static_cast<std::size_t>(max_degree) + 1, 0.0);
  for (int d = 1; d <= std::min(max_degree, f.order()); ++d) out[static_cast<std::size_t>(d)] = f[d].get_d();
  return out;
}

// t^d as a jet of the given order
Jet power(int d, const Rational& c, int order) { return Jet::from_terms({{d, c}}, order); }

}  // namespace

PolyField hyperbolic_focus_field(double lambda) {
  return {Poly2({{1, 0, lambda}, {0, 1, -pi}}), Poly2({{1, 0, pi}, {0, 1, lambda}})};
}

Rational weak_focus_gamma(int k, const Rational& alpha, const Rational& beta) {
  return beta + Rational(2 * k + 1, 2) * alpha * alpha;
}

PolyField weak_focus_field(int k, double alpha, double beta) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "weak focus needs k >= 1");
  if (alpha == 0.0) throw Error(ErrorCode::InvalidInput, "weak focus needs alpha != 0");
  const double gamma = beta + (2 * k + 1) * alpha * alpha / 2;
  const Poly2 r2 = Poly2::x() * Poly2::x() + Poly2::y() * Poly2::y();
  const Poly2 q = alpha * r2.pow(k, 2 * k) + gamma * r2.pow(2 * k, 4 * k);
  return {Poly2({{0, 1, -pi}}) - Poly2::x() * q, Poly2({{1, 0, pi}}) - Poly2::y() * q};
}

Jet weak_focus_semimonodromy(int k, const Rational& alpha, const Rational& gamma, int order) {
  // time-one map of X d/dr with X = -(alpha r^(2k+1) + gamma r^(4k+1)) as the
  // Lie series sum D^n(r)/n!, D f = X f'; each application raises the order by 2k
  const auto n = static_cast<std::size_t>(order);
  std::vector<Rational> X(n + 1, Rational(0));
  if (2 * k + 1 <= order) X[2 * k + 1] = -alpha;
  if (4 * k + 1 <= order) X[4 * k + 1] = -gamma;
  std::vector<Rational> term(n + 1, Rational(0)), sum(n + 1, Rational(0));
  term[1] = 1;
  sum[1] = 1;
  for (int m = 1;; ++m) {
    std::vector<Rational> deriv(n + 1, Rational(0)), next(n + 1, Rational(0));
    for (std::size_t d = 1; d <= n; ++d) deriv[d - 1] = term[d] * static_cast<long>(d);
    bool any = false;
    for (std::size_t i = 1; i <= n; ++i) {
      if (sgn(X[i]) == 0) continue;
      for (std::size_t j = 0; i + j <= n; ++j) {
        if (sgn(deriv[j]) == 0) continue;
        next[i + j] += X[i] * deriv[j];
      }
    }
    for (std::size_t d = 1; d <= n; ++d) {
      next[d] /= m;
      if (sgn(next[d]) != 0) any = true;
      sum[d] += next[d];
    }
    if (!any) break;
    term = std::move(next);
  }
  std::vector<Rational> h(n);
  for (std::size_t d = 1; d <= n; ++d) h[d - 1] = -sum[d];
  return Jet(std::move(h));
}

RealizedField prescribed_semimonodromy_field(const Jet& h, int N) {
  if (N < 1 || N > h.order()) throw Error(ErrorCode::InvalidInput, "match order must lie in [1, order of h]");
  if (sgn(h[1]) >= 0) throw Error(ErrorCode::UnsupportedJet, "semi-monodromy must reverse orientation: " + h.to_string());
  const Rational lambda = -h[1];
  const Jet target = h.truncated(N);

  RealizedField out;
  out.expected = target;
  out.valid_through = N;
  Jet g = Jet::identity(1);
  int k = 0;
  if (lambda != 1) {
    const int W = N + 2;
    const double l = std::log(lambda.get_d());
    out.field = hyperbolic_focus_field(l);
    out.base = "hyperbolic focus, lambda = " + std::to_string(l);
    g = Jet::linear(-lambda, W);
    out.total_degree = N + 2;
    const Jet psi = formal_conjugator(g, target.extended(W));
    out.realized = jet_conjugate(g, psi);
    out.field = pushforward_x(out.field, degree_indexed(psi, out.total_degree),
                              degree_indexed(jet_inverse(psi), out.total_degree), out.total_degree);
    return out;
  }
  // pad to a working order where the normal form is fully determined
  int W = 4 * N + 5;
  const FormalClassReport rep = normal_form(target.extended(W));
  if (rep.kind == FormalKind::ReversingInvolution) {
    out.field = hyperbolic_focus_field(0.0);
    out.base = "center";
    g = Jet::linear(Rational(-1), W);
  } else if (rep.kind == FormalKind::ReversingNonInvolution) {
    k = rep.k;
    W = std::max(W, 4 * k + 5);
    out.field = weak_focus_field(k, rep.rev_low.get_d(), rep.rev_high.get_d());
    out.base = "weak focus, k = " + std::to_string(k) + ", alpha = " + rep.rev_low.get_str() +
               ", beta = " + rep.rev_high.get_str();
    g = weak_focus_semimonodromy(k, rep.rev_low, weak_focus_gamma(k, rep.rev_low, rep.rev_high), W);
  } else {
    throw Error(ErrorCode::UnsupportedJet, "no focus realizes " + h.to_string());
  }
  out.total_degree = std::max(N + 2, 4 * k + 5);
  const Jet psi = formal_conjugator(g, target.extended(W));
  out.realized = jet_conjugate(g, psi);
  if (!(out.realized.truncated(N) == target)) throw std::logic_error("conjugated germ misses the target jet");
  out.field = pushforward_x(out.field, degree_indexed(psi, out.total_degree),
                            degree_indexed(jet_inverse(psi), out.total_degree), out.total_degree);
  return out;
}

RealizedField hamiltonian_parabolic_field(const Jet& h, int N) {
  if (N < 1 || N > h.order()) throw Error(ErrorCode::InvalidInput, "match order must lie in [1, order of h]");
  const Jet t = h.truncated(N);
  if (t[1] != -1) throw Error(ErrorCode::NotInvolutionToOrder, "linear coefficient must be -1: " + h.to_string());
  const Jet sq = jet_compose(t, t);
  if (!sq.is_identity()) {
    throw Error(ErrorCode::NotInvolutionToOrder,
                "h(h(t)) = " + sq.to_string() + " is not the identity through order " + std::to_string(N));
  }
  RealizedField out;
  std::vector<std::tuple<int, int, double>> terms;
  for (int i = 1; i <= N; ++i) {
    if (sgn(t[i]) != 0) terms.emplace_back(i, 0, Rational(Rational(i + 1) * t[i]).get_d());
  }
  out.field = {Poly2::constant(1.0), Poly2(terms)};
  out.expected = t;
  out.realized = t;
  out.valid_through = N;
  out.base = "hamiltonian parabolic contact";
  out.total_degree = N;
  return out;
}

PolyField counterclockwise_upper(const PolyField& f) { return f.reversed(); }
PolyField counterclockwise_lower(const PolyField& f) { return f.mirrored_y(); }

nlohmann::json to_json(const Infeasible& i) { return {{"feasible", false}, {"branch", i.branch}, {"reason", i.reason}}; }

namespace {

struct Piece {
  std::string role;  // focus or parabolic
  Jet target = Jet::identity(1);
  int order = 0;  // focus order, or -1 for parabolic
};

nlohmann::json piece_json(const Piece& p, const RealizedField& r, int order) {
  nlohmann::json j;
  j["role"] = p.role;
  if (p.role == "focus") j["focus_order"] = order;
  j["base"] = r.base;
  j["expected_jet"] = jet_to_json(r.expected);
  j["expected_jet_text"] = r.expected.to_string();
  j["valid_through_order"] = r.valid_through;
  j["total_degree"] = r.total_degree;
  return j;
}

int focus_order(const Jet& m) {
  if (m[1] != -1) return 0;
  const auto rep = normal_form(m);
  if (rep.kind != FormalKind::ReversingNonInvolution) return -1;
  return rep.k;
}

// P = lower∘upper as jets; (order, c) with P = x - c x^order + ...
std::pair<int, Rational> return_order(const Jet& p) {
  if (p[1] != 1) return {1, Rational(1) - p[1]};
  const auto d = displacement_order(p);
  if (!d) return {0, Rational(0)};
  return {d->k, -d->c};
}

PiecewiseSystem assemble(const std::string& construction, const std::string& type, const Piece& up,
                         const Piece& low, int k, int N, nlohmann::json orders) {
  const int W = up.target.order();
  const Jet p = jet_compose(low.target, up.target).truncated(W);
  const auto [order, c] = return_order(p);
  if (order != k || sgn(c) <= 0) {
    throw std::logic_error(construction + ": composite jet " + p.to_string() + " does not have attracting order " +
                           std::to_string(k));
  }
  PiecewiseSystem s;
  nlohmann::json meta;
  meta["construction"] = construction;
  meta["expected_type"] = type;
  meta["orders"] = std::move(orders);
  meta["expected_order"] = k;
  meta["expected_coefficient"] = c.get_d();
  meta["expected_return_jet"] = jet_to_json(p.truncated(std::max(k, 1)));
  meta["return_jet_text"] = p.truncated(std::max(k, 1)).to_string();
  for (const auto& [piece, half] : {std::pair{&up, "upper"}, std::pair{&low, "lower"}}) {
    RealizedField r = piece->role == "focus" ? prescribed_semimonodromy_field(piece->target, N)
                                             : hamiltonian_parabolic_field(piece->target, N);
    PolyField f = r.field;
    if (piece->role == "parabolic") {
      f = std::string(half) == "upper" ? counterclockwise_upper(f) : counterclockwise_lower(f);
      meta[half]["orientation_fix"] =
          std::string(half) == "upper" ? "time reversal of the left-to-right piece" : "mirror in the x-axis";
    }
    (std::string(half) == "upper" ? s.upper : s.lower) = f;
    const int ord = piece->role == "focus" ? focus_order(piece->target) : -1;
    meta[half].update(piece_json(*piece, r, ord));
  }
  s.counterclockwise = true;
  s.radius = validated_radius(s);
  meta["radius_rule"] = "half the smallest sampled |x| violating the crossing or orientation condition";
  s.metadata = std::move(meta);
  return s;
}

Jet reversing_power(int kappa, const Rational& c, int W) {
  if (kappa == 0) return Jet::linear(Rational(-1, 2), W);
  return Jet::linear(Rational(-1), W) + power(2 * kappa + 1, c, W);
}

}  // namespace

Realization realize_ff(int k1, int k2, int k) {
  if (k1 < 0 || k2 < 0 || k < 1) throw Error(ErrorCode::InvalidInput, "need k1, k2 >= 0 and k >= 1");
  const Feasibility f = ff_feasibility(k1, k2, k);
  if (!f.feasible) return Infeasible{f.branch, "no FF pseudo focus of order " + std::to_string(k) +
                                                   " from foci of orders " + std::to_string(k1) + " and " +
                                                   std::to_string(k2)};
  const int big = std::max(k1, k2), small = std::min(k1, k2);
  const int N = std::max(k, 2 * big + 1) + 1;
  const int W = 4 * std::max(N, 2 * big + 1) + 5;
  const Jet x = Jet::identity(W);
  // sigma picks the sign of the conjugating term so that P attracts
  auto build = [&](int sigma) {
    Jet m1 = Jet::identity(1), m2 = Jet::identity(1);
    const Jet phi = x + power(k, Rational(sigma), W);
    if (k1 == k2) {
      const int kappa = k1;
      if (kappa == 0) {
        m1 = Jet::linear(Rational(-2), W);
        m2 = jet_inverse(Jet::linear(Rational(-2), W) - power(k, Rational(1), W));
      } else if (k >= 2 * kappa + 1) {
        m1 = reversing_power(kappa, Rational(2), W);
        m2 = jet_inverse(m1 - power(k, Rational(1), W));
      } else {
        // even k below 2 kappa + 1: the same germ, conjugated
        m1 = reversing_power(kappa, Rational(1), W);
        m2 = jet_conjugate(m1, phi);
      }
    } else {
      Jet mb = reversing_power(big, Rational(1), W);
      const Jet ms = reversing_power(small, Rational(1), W);
      if (k % 2 == 0) mb = jet_conjugate(mb, phi);
      (k1 > k2 ? m1 : m2) = mb;
      (k1 > k2 ? m2 : m1) = ms;
    }
    return std::pair{m1, m2};
  };
  auto [m1, m2] = build(1);
  if (sgn(return_order(jet_compose(m2, m1)).second) < 0) std::tie(m1, m2) = build(-1);
  if (focus_order(m1) != k1 || focus_order(m2) != k2) throw std::logic_error("realize_ff: focus orders drifted");
  return assemble("ff", "FF", {"focus", m1, k1}, {"focus", m2, k2}, k, N, {{"k1", k1}, {"k2", k2}, {"k", k}});
}

Realization realize_mixed(int k, int n) {
  if (k < 0 || n < 1) throw Error(ErrorCode::InvalidInput, "need k >= 0 and n >= 1");
  const Feasibility f = mixed_feasibility(k, n);
  if (!f.feasible) {
    return Infeasible{f.branch, "no mixed pseudo focus of order " + std::to_string(n) + " from a focus of order " +
                                    std::to_string(k)};
  }
  const int N = std::max(n, 2 * k + 1) + 1;
  const int W = 4 * std::max(N, 2 * k + 1) + 5;
  const Jet x = Jet::identity(W);
  const Jet m = reversing_power(k, Rational(1), W);
  Jet h = Jet::linear(Rational(-1), W);
  if (n != 2 * k + 1) {
    for (int sigma : {1, -1}) {
      const Jet phi = x + power(n, Rational(sigma), W);
      h = jet_compose(jet_inverse(phi), Rational(-1) * phi);
      if (sgn(return_order(jet_compose(h, m)).second) > 0) break;
    }
  }
  return assemble("mixed", "FP", {"focus", m, k}, {"parabolic", h, -1}, n, N, {{"k", k}, {"n", n}});
}

Realization realize_pp(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "need n >= 1");
  const Feasibility f = pp_feasibility(n);
  if (!f.feasible) return Infeasible{f.branch, "no PP pseudo focus of order " + std::to_string(n)};
  const int N = 2 * n + 1;
  const int W = N;
  const Jet x = Jet::identity(W);
  const Jet phi = x + power(n, Rational(1), W);
  const Jet hl = jet_compose(jet_inverse(phi), Rational(-1) * phi);
  return assemble("pp", "PP", {"parabolic", Jet::linear(Rational(-1), W), -1}, {"parabolic", hl, -1}, n, N,
                  {{"n", n}});
}

}  // namespace pfocus
