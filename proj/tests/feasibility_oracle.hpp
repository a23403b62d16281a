#pragma once

// Exhaustive search over truncated jets with small coefficients. Used as an
// independent check on the realization feasibility rules.

#include <functional>
#include <vector>

namespace oracle {

// index = degree, [0] unused; all values are small dyadic rationals, so double
// arithmetic is exact here
using Series = std::vector<double>;

inline Series mul(const Series& a, const Series& b, int W) {
  Series c(W + 1, 0.0);
  for (int i = 1; i <= W; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 1; i + j <= W; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

inline std::vector<Series> powers(const Series& g, int W) {
  std::vector<Series> p(W + 1);
  p[1] = g;
  for (int j = 2; j <= W; ++j) p[j] = mul(p[j - 1], g, W);
  return p;
}

inline Series compose(const Series& f, const std::vector<Series>& gp, int W) {
  Series c(W + 1, 0.0);
  for (int j = 1; j <= W; ++j) {
    if (f[j] == 0.0) continue;
    for (int d = j; d <= W; ++d) c[d] += f[j] * gp[j][d];
  }
  return c;
}

inline Series inverse(const Series& g, int W) {
  Series h(W + 1, 0.0);
  h[1] = 1.0 / g[1];
  for (int n = 2; n <= W; ++n) {
    const Series c = compose(g, powers(h, n), n);
    h[n] = -c[n] / g[1];
  }
  return h;
}

// 0 hyperbolic, k >= 1 weak focus of order k, -1 involution through W, -2 not reversing
inline int focus_order(const Series& m, int W) {
  if (!(m[1] < 0)) return -2;
  if (m[1] != -1.0) return 0;
  const Series s = compose(m, powers(m, W), W);
  for (int j = 2; j <= W; ++j) {
    if (s[j] != 0.0) return j % 2 == 1 ? (j - 1) / 2 : -2;
  }
  return -1;
}

inline bool is_involution(const Series& h, int W) {
  if (h[1] != -1.0) return false;
  const Series s = compose(h, powers(h, W), W);
  for (int j = 2; j <= W; ++j) {
    if (s[j] != 0.0) return false;
  }
  return true;
}

// visits every series with the given linear coefficient and entries in
// {-1, 0, 1} at degrees lo..W; stops when visit returns true
inline bool enumerate(double linear, int lo, int W, const std::function<bool(const Series&)>& visit) {
  Series s(W + 1, 0.0);
  s[1] = linear;
  std::function<bool(int)> rec = [&](int d) -> bool {
    if (d > W) return visit(s);
    for (double c : {0.0, 1.0, -1.0}) {
      s[d] = c;
      if (rec(d + 1)) return true;
    }
    s[d] = 0.0;
    return false;
  };
  return rec(lo);
}

// candidate return maps P of order exactly k
inline bool enumerate_returns(int k, int W, const std::function<bool(const Series&)>& visit) {
  if (k == 1) {
    for (double rho : {0.5, 2.0}) {
      if (enumerate(rho, 2, W, visit)) return true;
    }
    return false;
  }
  for (double c : {1.0, -1.0}) {
    const bool hit = enumerate(1.0, k + 1, W, [&](const Series& tail) {
      Series p = tail;
      for (int j = 2; j < k; ++j) p[j] = 0.0;
      p[k] = c;
      return visit(p);
    });
    if (hit) return true;
  }
  return false;
}

inline std::vector<double> linear_parts(int order) {
  if (order == 0) return {-2.0, -0.5};
  return {-1.0};
}

// m2∘m1 = P of order k with m1, m2 foci of orders k1, k2
inline bool ff_solvable(int k1, int k2, int k) {
  const int W = std::max({k, 2 * k1 + 1, 2 * k2 + 1});
  for (double l1 : linear_parts(k1)) {
    const bool hit = enumerate(l1, 2, W, [&](const Series& m1) {
      if (focus_order(m1, W) != k1) return false;
      const auto ip = powers(inverse(m1, W), W);
      return enumerate_returns(k, W, [&](const Series& p) { return focus_order(compose(p, ip, W), W) == k2; });
    });
    if (hit) return true;
  }
  return false;
}

// h∘m = P of order n with m a focus of order k and h an involution
inline bool mixed_solvable(int k, int n) {
  const int W = std::max(n, 2 * k + 1);
  for (double l : linear_parts(k)) {
    const bool hit = enumerate(l, 2, W, [&](const Series& m) {
      if (focus_order(m, W) != k) return false;
      const auto ip = powers(inverse(m, W), W);
      return enumerate_returns(n, W, [&](const Series& p) { return is_involution(compose(p, ip, W), W); });
    });
    if (hit) return true;
  }
  return false;
}

}  // namespace oracle
