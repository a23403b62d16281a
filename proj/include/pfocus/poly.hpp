#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pfocus {

/// Bivariate polynomial sum c_ij x^i y^j with real coefficients.
class Poly2 {
 public:
  Poly2() = default;
  /// (i, j, c) triples; repeated monomials are summed.
  explicit Poly2(const std::vector<std::tuple<int, int, double>>& terms);

  static Poly2 constant(double c);
  static Poly2 monomial(int i, int j, double c = 1.0);
  static Poly2 x() { return monomial(1, 0); }
  static Poly2 y() { return monomial(0, 1); }

  double coeff(int i, int j) const;
  const std::map<std::pair<int, int>, double>& terms() const noexcept { return terms_; }
  int degree() const noexcept;  // total degree, -1 for the zero polynomial
  bool is_zero() const noexcept { return terms_.empty(); }

  double operator()(double x, double y) const;

  Poly2 dx() const;
  Poly2 dy() const;
  Poly2 truncated(int total_degree) const;
  /// p(u(x, y), v(x, y)) truncated at total_degree
  Poly2 substitute(const Poly2& u, const Poly2& v, int total_degree) const;
  /// p(x, -y)
  Poly2 mirrored_y() const;
  Poly2 pow(int e, int total_degree) const;

  friend Poly2 operator+(const Poly2& a, const Poly2& b);
  friend Poly2 operator-(const Poly2& a, const Poly2& b);
  friend Poly2 operator*(const Poly2& a, const Poly2& b);
  friend Poly2 operator*(double s, const Poly2& a);
  friend bool operator==(const Poly2& a, const Poly2& b) { return a.terms_ == b.terms_; }

  nlohmann::json to_json() const;
  static Poly2 from_json(const nlohmann::json& j);
  std::string to_string() const;

 private:
  void add(int i, int j, double c);
  void rebuild();

  std::map<std::pair<int, int>, double> terms_;
  // rows_[j] holds the dense x-coefficients of y^j for Horner evaluation
  std::vector<std::vector<double>> rows_;
};

/// Planar vector field x' = M(x, y), y' = N(x, y).
struct PolyField {
  Poly2 M;
  Poly2 N;

  std::pair<double, double> operator()(double x, double y) const { return {M(x, y), N(x, y)}; }
  /// time reversal (-M, -N)
  PolyField reversed() const;
  /// image under (x, y) -> (x, -y)
  PolyField mirrored_y() const;

  nlohmann::json to_json() const;
  static PolyField from_json(const nlohmann::json& j);
};

/// Pushforward of V by (x, y) -> (psi(x), y) where phi = psi^-1; both univariate
/// maps are given by coefficient vectors (index = degree). Result truncated at
/// total_degree: (psi'(phi(u)) M(phi(u), v), N(phi(u), v)).
PolyField pushforward_x(const PolyField& v, const std::vector<double>& psi, const std::vector<double>& phi,
                        int total_degree);

}  // namespace pfocus
