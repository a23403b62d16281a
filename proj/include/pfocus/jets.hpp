#pragma once

#include <gmpxx.h>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pfocus {

using Rational = mpq_class;

/// Truncated Taylor expansion c_1 t + ... + c_N t^N of a germ fixing 0.
///
/// The constant term is absent by construction. Binary operations on jets of
/// orders N1 and N2 produce a jet of order min(N1, N2); nothing beyond the order
/// is ever reported.
class Jet {
 public:
  /// coeffs[i] is the coefficient of t^(i+1); the order is coeffs.size().
  explicit Jet(std::vector<Rational> coeffs);

  /// Builds a jet from (degree, coefficient) pairs. Degree 0 with a nonzero
  /// coefficient is rejected with ErrorCode::ConstantTerm.
  static Jet from_terms(std::span<const std::pair<int, Rational>> terms, int order);
  static Jet from_terms(std::initializer_list<std::pair<int, Rational>> terms, int order);
  static Jet identity(int order);
  static Jet linear(Rational c, int order);

  int order() const noexcept { return static_cast<int>(coeffs_.size()); }

  /// Coefficient of t^degree, 1 <= degree <= order().
  const Rational& operator[](int degree) const { return coeffs_.at(static_cast<std::size_t>(degree - 1)); }
  const Rational& linear_coefficient() const { return coeffs_.front(); }
  const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }

  Jet truncated(int order) const;
  /// Zero-padded extension; the new coefficients are exact zeros.
  Jet extended(int order) const;
  bool is_identity() const;

  double evaluate(double t) const;
  std::vector<double> to_doubles() const;

  /// Human-readable form such as "-t + 2*t^4 - 1/3*t^7".
  std::string to_string() const;

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.coeffs_ == b.coeffs_;
  }
  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Rational& s, const Jet& a);

 private:
  std::vector<Rational> coeffs_;
};

Jet jet_mul(const Jet& f, const Jet& g);
/// Taylor coefficients of f∘g.
Jet jet_compose(const Jet& f, const Jet& g);
/// Compositional inverse; ErrorCode::ZeroLinearPart when c_1 = 0.
Jet jet_inverse(const Jet& f);
/// phi∘f∘phi⁻¹. phi must be tangent to the identity unless
/// allow_general_linear is set.
Jet jet_conjugate(const Jet& f, const Jet& phi, bool allow_general_linear = false);

enum class FormalKind {
  Hyperbolic,
  ParabolicPreserving,
  ReversingInvolution,
  ReversingNonInvolution,
};

std::string to_string(FormalKind kind);

struct FormalClassReport {
  FormalKind kind = FormalKind::Hyperbolic;
  Rational lambda;  // linear coefficient

  // parabolic-preserving: f ~ t + alpha_k t^k + beta t^(2k-1)
  // reversing-noninvolution: f∘f ~ t + a_{2k+1} t^(2k+1) + a_{4k+1} t^(4k+1)
  int k = 0;
  Rational alpha_k;
  Rational beta;
  Rational a_low;   // a_{2k+1}
  Rational a_high;  // a_{4k+1}
  // f ~ -t + rev_low t^(2k+1) + rev_high t^(4k+1)
  Rational rev_low;
  Rational rev_high;

  /// Reduced representative of the class, truncated at the working order.
  Jet normal_form = Jet::identity(1);
  /// Tangent-to-identity phi with phi∘f∘phi⁻¹ = normal_form.
  Jet conjugator = Jet::identity(1);
  /// Order the computation was carried out at.
  int working_order = 0;
};

/// Formal classification under tangent-to-identity conjugacy.
FormalClassReport normal_form(const Jet& f);

/// Tangent-to-identity psi with psi∘g∘psi⁻¹ = h up to the common order.
/// Throws ErrorCode::UnsupportedJet when g and h are not formally equivalent.
Jet formal_conjugator(const Jet& g, const Jet& h);

struct SquaresDifference {
  int k = 0;
  Rational coefficient;  // [t^k](f∘f - g∘g)
  Rational predicted;    // ((-1)^k - 1)(a_k - b_k)
  std::optional<std::pair<int, Rational>> first_nonzero;
};

/// Leading behaviour of f∘f - g∘g for two orientation-reversing jets.
SquaresDifference leading_difference_of_squares(const Jet& f, const Jet& g);

struct Displacement {
  int k = 0;
  Rational c;
};

/// First nonlinear term of P - id; std::nullopt when P is the identity jet.
std::optional<Displacement> displacement_order(const Jet& p);

}  // namespace pfocus
