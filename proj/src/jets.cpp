#include "pfocus/jets.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "pfocus/errors.hpp"

namespace pfocus {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConstantTerm: return "ConstantTerm";
    case ErrorCode::ZeroLinearPart: return "ZeroLinearPart";
    case ErrorCode::InsufficientOrder: return "InsufficientOrder";
    case ErrorCode::UnsupportedLinearPart: return "UnsupportedLinearPart";
    case ErrorCode::IdenticalJets: return "IdenticalJets";
    case ErrorCode::NotContracting: return "NotContracting";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::GapsNotEventuallyMonotone: return "GapsNotEventuallyMonotone";
    case ErrorCode::Underflow: return "Underflow";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::EscapedNeighborhood: return "EscapedNeighborhood";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::TangentialAmbiguity: return "TangentialAmbiguity";
    case ErrorCode::OrientationViolated: return "OrientationViolated";
    case ErrorCode::NotResolved: return "NotResolved";
    case ErrorCode::NonIntegerSlope: return "NonIntegerSlope";
    case ErrorCode::NotInvolutionToOrder: return "NotInvolutionToOrder";
    case ErrorCode::UnsupportedJet: return "UnsupportedJet";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

// Dense power series a_0 + a_1 t + ... + a_n t^n (index = degree).
using Series = std::vector<Rational>;

Series series_mul(const Series& a, const Series& b, std::size_t n) {
  Series out(n + 1, Rational(0));
  for (std::size_t i = 0; i < a.size() && i <= n; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= n; ++j) {
      if (sgn(b[j]) == 0) continue;
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

Series series_reciprocal(const Series& a, std::size_t n) {
  if (a.empty() || sgn(a[0]) == 0) throw Error(ErrorCode::ZeroLinearPart, "series reciprocal of a series without unit term");
  Series out(n + 1, Rational(0));
  out[0] = 1 / a[0];
  for (std::size_t k = 1; k <= n; ++k) {
    Rational acc = 0;
    for (std::size_t i = 1; i <= k && i < a.size(); ++i) acc += a[i] * out[k - i];
    out[k] = -acc / a[0];
  }
  return out;
}

Series to_series(const Jet& f) {
  Series s(static_cast<std::size_t>(f.order()) + 1, Rational(0));
  for (int i = 1; i <= f.order(); ++i) s[static_cast<std::size_t>(i)] = f[i];
  return s;
}

Jet from_series(const Series& s, int order) {
  std::vector<Rational> c(static_cast<std::size_t>(order), Rational(0));
  for (int i = 1; i <= order && static_cast<std::size_t>(i) < s.size(); ++i) c[static_cast<std::size_t>(i - 1)] = s[static_cast<std::size_t>(i)];
  return Jet(std::move(c));
}

int first_nonlinear(const Jet& f) {
  for (int j = 2; j <= f.order(); ++j)
    if (sgn(f[j]) != 0) return j;
  return 0;
}

Jet tangent_monomial(int m, const Rational& s, int order) {
  std::vector<Rational> c(static_cast<std::size_t>(order), Rational(0));
  c[0] = 1;
  if (m <= order) c[static_cast<std::size_t>(m - 1)] = s;
  return Jet(std::move(c));
}

struct Reduction {
  Jet reduced;
  Jet conjugator;
};

// Successive elimination of every coefficient outside `keep` by conjugations
// t + s t^m. `hint(j)` proposes the exponent m whose first-order effect lands
// on degree j; other exponents are tried only if the hint fails.
template <class Hint>
Reduction reduce(const Jet& f, const std::vector<int>& keep, Hint hint) {
  const int n = f.order();
  Jet cur = f;
  Jet phi = Jet::identity(n);
  for (int j = 2; j <= n; ++j) {
    if (std::find(keep.begin(), keep.end(), j) != keep.end()) continue;
    if (sgn(cur[j]) == 0) continue;

    std::vector<int> candidates;
    if (int m = hint(j, cur); m >= 2 && m <= j) candidates.push_back(m);
    for (int m = 2; m <= j; ++m)
      if (candidates.empty() || m != candidates.front()) candidates.push_back(m);

    bool eliminated = false;
    for (int m : candidates) {
      const Jet trial = jet_conjugate(cur, tangent_monomial(m, Rational(1), n));
      bool lower_intact = true;
      for (int i = 1; i < j && lower_intact; ++i) lower_intact = trial[i] == cur[i];
      if (!lower_intact) continue;
      const Rational d = trial[j] - cur[j];
      if (sgn(d) == 0) continue;
      const Jet psi = tangent_monomial(m, Rational(-cur[j] / d), n);
      Jet next = jet_conjugate(cur, psi);
      lower_intact = true;
      for (int i = 1; i < j && lower_intact; ++i) lower_intact = next[i] == cur[i];
      if (!lower_intact || sgn(next[j]) != 0) continue;
      cur = std::move(next);
      phi = jet_compose(psi, phi);
      eliminated = true;
      break;
    }
    if (!eliminated) {
      throw Error(ErrorCode::UnsupportedJet,
                  "cannot eliminate degree " + std::to_string(j) + " of " + f.to_string());
    }
  }
  return {std::move(cur), std::move(phi)};
}

}  // namespace

Jet::Jet(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorCode::InvalidInput, "jet order must be positive");
  for (auto& c : coeffs_) c.canonicalize();
}

Jet Jet::from_terms(std::span<const std::pair<int, Rational>> terms, int order) {
  if (order < 1) throw Error(ErrorCode::InvalidInput, "jet order must be positive");
  std::vector<Rational> c(static_cast<std::size_t>(order), Rational(0));
  for (const auto& [deg, value] : terms) {
    if (deg == 0) {
      if (sgn(value) != 0) throw Error(ErrorCode::ConstantTerm, "germs must fix 0");
      continue;
    }
    if (deg < 0) throw Error(ErrorCode::InvalidInput, "negative degree");
    if (deg <= order) c[static_cast<std::size_t>(deg - 1)] += value;
  }
  return Jet(std::move(c));
}

Jet Jet::from_terms(std::initializer_list<std::pair<int, Rational>> terms, int order) {
  return from_terms(std::span<const std::pair<int, Rational>>(terms.begin(), terms.size()), order);
}

Jet Jet::identity(int order) { return linear(Rational(1), order); }

Jet Jet::linear(Rational c, int order) {
  if (order < 1) throw Error(ErrorCode::InvalidInput, "jet order must be positive");
  std::vector<Rational> v(static_cast<std::size_t>(order), Rational(0));
  v[0] = std::move(c);
  return Jet(std::move(v));
}

Jet Jet::truncated(int order) const {
  if (order < 1) throw Error(ErrorCode::InvalidInput, "jet order must be positive");
  if (order > this->order()) {
    throw Error(ErrorCode::InsufficientOrder, "cannot truncate an order-" + std::to_string(this->order()) +
                                                  " jet to order " + std::to_string(order));
  }
  return Jet(std::vector<Rational>(coeffs_.begin(), coeffs_.begin() + order));
}

Jet Jet::extended(int order) const {
  std::vector<Rational> c = coeffs_;
  if (order > this->order()) c.resize(static_cast<std::size_t>(order), Rational(0));
  return Jet(std::move(c));
}

bool Jet::is_identity() const {
  if (coeffs_[0] != 1) return false;
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const Rational& c) { return sgn(c) == 0; });
}

double Jet::evaluate(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = (acc + it->get_d()) * t;
  return acc;
}

std::vector<double> Jet::to_doubles() const {
  std::vector<double> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c.get_d());
  return out;
}

std::string Jet::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int i = 1; i <= order(); ++i) {
    const Rational& c = coeffs_[static_cast<std::size_t>(i - 1)];
    if (sgn(c) == 0) continue;
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) os << '-';
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    if (mag != 1) os << mag.get_str() << '*';
    os << 't';
    if (i > 1) os << '^' << i;
    first = false;
  }
  if (first) os << '0';
  return os.str();
}

Jet operator+(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  std::vector<Rational> c(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) c[static_cast<std::size_t>(i - 1)] = a[i] + b[i];
  return Jet(std::move(c));
}

Jet operator-(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  std::vector<Rational> c(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) c[static_cast<std::size_t>(i - 1)] = a[i] - b[i];
  return Jet(std::move(c));
}

Jet operator*(const Rational& s, const Jet& a) {
  std::vector<Rational> c = a.coefficients();
  for (auto& x : c) x *= s;
  return Jet(std::move(c));
}

Jet jet_mul(const Jet& f, const Jet& g) {
  const int n = std::min(f.order(), g.order());
  return from_series(series_mul(to_series(f), to_series(g), static_cast<std::size_t>(n)), n);
}

Jet jet_compose(const Jet& f, const Jet& g) {
  const int n = std::min(f.order(), g.order());
  const auto nn = static_cast<std::size_t>(n);
  const Series gs = to_series(g);
  Series acc(nn + 1, Rational(0));
  Series power = gs;
  power.resize(nn + 1, Rational(0));
  for (int i = 1; i <= n; ++i) {
    const Rational& c = f[i];
    if (sgn(c) != 0) {
      for (std::size_t d = static_cast<std::size_t>(i); d <= nn; ++d) acc[d] += c * power[d];
    }
    if (i < n) power = series_mul(power, gs, nn);
  }
  return from_series(acc, n);
}

Jet jet_inverse(const Jet& f) {
  if (sgn(f.linear_coefficient()) == 0) throw Error(ErrorCode::ZeroLinearPart, "inverse of " + f.to_string());
  const int n = f.order();
  const auto nn = static_cast<std::size_t>(n);
  // Lagrange inversion: [t^m] f⁻¹ = (1/m) [w^(m-1)] (w / f(w))^m.
  Series quotient(nn, Rational(0));
  for (int i = 1; i <= n; ++i) quotient[static_cast<std::size_t>(i - 1)] = f[i];
  const Series h = series_reciprocal(quotient, nn - 1);
  std::vector<Rational> out(nn, Rational(0));
  Series power = h;
  for (int m = 1; m <= n; ++m) {
    out[static_cast<std::size_t>(m - 1)] = power[static_cast<std::size_t>(m - 1)] / m;
    if (m < n) power = series_mul(power, h, nn - 1);
  }
  return Jet(std::move(out));
}

Jet jet_conjugate(const Jet& f, const Jet& phi, bool allow_general_linear) {
  if (sgn(phi.linear_coefficient()) == 0) throw Error(ErrorCode::ZeroLinearPart, "conjugating map " + phi.to_string());
  if (!allow_general_linear && phi.linear_coefficient() != 1) {
    throw Error(ErrorCode::InvalidInput, "conjugating map must be tangent to the identity: " + phi.to_string());
  }
  const int n = std::min(f.order(), phi.order());
  const Jet p = phi.truncated(n);
  return jet_compose(p, jet_compose(f.truncated(n), jet_inverse(p)));
}

std::string to_string(FormalKind kind) {
  switch (kind) {
    case FormalKind::Hyperbolic: return "hyperbolic";
    case FormalKind::ParabolicPreserving: return "parabolic-preserving";
    case FormalKind::ReversingInvolution: return "reversing-involution";
    case FormalKind::ReversingNonInvolution: return "reversing-noninvolution";
  }
  return "unknown";
}

FormalClassReport normal_form(const Jet& f) {
  const int n = f.order();
  const Rational& c1 = f.linear_coefficient();
  FormalClassReport report;
  report.lambda = c1;
  report.working_order = n;

  if (sgn(c1) == 0) throw Error(ErrorCode::UnsupportedLinearPart, "zero linear part in " + f.to_string());

  if (c1 != 1 && c1 != -1) {
    report.kind = FormalKind::Hyperbolic;
    auto red = reduce(f, {}, [](int j, const Jet&) { return j; });
    report.normal_form = std::move(red.reduced);
    report.conjugator = std::move(red.conjugator);
    return report;
  }

  if (c1 == 1) {
    const int k = first_nonlinear(f);
    if (k == 0) {
      throw Error(ErrorCode::InsufficientOrder,
                  "jet is the identity through order " + std::to_string(n) + "; class undetermined");
    }
    if (n < 2 * k - 1) {
      throw Error(ErrorCode::InsufficientOrder, "parabolic germ with k=" + std::to_string(k) + " needs order " +
                                                    std::to_string(2 * k - 1) + ", got " + std::to_string(n));
    }
    report.kind = FormalKind::ParabolicPreserving;
    report.k = k;
    auto red = reduce(f, {k, 2 * k - 1}, [k](int j, const Jet&) { return j - k + 1; });
    report.alpha_k = red.reduced[k];
    report.beta = red.reduced[2 * k - 1];
    report.normal_form = std::move(red.reduced);
    report.conjugator = std::move(red.conjugator);
    return report;
  }

  // orientation reversing
  const Jet square = jet_compose(f, f);
  if (square.is_identity()) {
    report.kind = FormalKind::ReversingInvolution;
    // phi = (t - f)/2 satisfies phi∘f = -phi up to the order.
    report.conjugator = Rational(1, 2) * (Jet::identity(n) - f);
    report.normal_form = Jet::linear(Rational(-1), n);
    return report;
  }
  const int m = first_nonlinear(square);
  if (m % 2 == 0) {
    throw std::logic_error("square of a reversing jet has even displacement degree: " + f.to_string());
  }
  const int k = (m - 1) / 2;
  if (n < 4 * k + 1) {
    throw Error(ErrorCode::InsufficientOrder, "reversing germ with k=" + std::to_string(k) + " needs order " +
                                                  std::to_string(4 * k + 1) + ", got " + std::to_string(n));
  }
  const FormalClassReport sq = normal_form(square);
  report.kind = FormalKind::ReversingNonInvolution;
  report.k = k;
  report.a_low = sq.alpha_k;
  report.a_high = sq.beta;
  report.rev_low = -sq.alpha_k / 2;
  report.rev_high = ((2 * k + 1) * sq.alpha_k * sq.alpha_k - 4 * sq.beta) / 8;

  // Even degrees go with t + s t^j; odd ones with t + s t^(j-2k) acting
  // through the t^(2k+1) term.
  auto red = reduce(f, {2 * k + 1, 4 * k + 1}, [k](int j, const Jet&) { return j % 2 == 0 ? j : j - 2 * k; });
  if (red.reduced[2 * k + 1] != report.rev_low || red.reduced[4 * k + 1] != report.rev_high) {
    throw std::logic_error("reversing normal form disagrees with the square's invariants for " + f.to_string());
  }
  report.normal_form = std::move(red.reduced);
  report.conjugator = std::move(red.conjugator);
  return report;
}

Jet formal_conjugator(const Jet& g, const Jet& h) {
  const int n = std::min(g.order(), h.order());
  const Jet gt = g.truncated(n);
  const Jet ht = h.truncated(n);
  if (gt.linear_coefficient() != ht.linear_coefficient()) {
    throw Error(ErrorCode::UnsupportedJet, "linear parts differ: " + gt.to_string() + " vs " + ht.to_string());
  }
  const FormalClassReport rg = normal_form(gt);
  const FormalClassReport rh = normal_form(ht);
  if (rg.kind != rh.kind || !(rg.normal_form == rh.normal_form)) {
    throw Error(ErrorCode::UnsupportedJet, "not formally equivalent: " + gt.to_string() + " vs " + ht.to_string());
  }
  Jet psi = jet_compose(jet_inverse(rh.conjugator), rg.conjugator);
  if (!(jet_conjugate(gt, psi) == ht)) {
    throw std::logic_error("formal conjugator failed to map " + gt.to_string() + " onto " + ht.to_string());
  }
  return psi;
}

SquaresDifference leading_difference_of_squares(const Jet& f, const Jet& g) {
  if (f.linear_coefficient() != -1 || g.linear_coefficient() != -1) {
    throw Error(ErrorCode::UnsupportedLinearPart, "both jets need linear coefficient -1");
  }
  const int n = std::min(f.order(), g.order());
  int k = 0;
  for (int j = 2; j <= n; ++j) {
    if (f[j] != g[j]) {
      k = j;
      break;
    }
  }
  if (k == 0) throw Error(ErrorCode::IdenticalJets, f.truncated(n).to_string());

  const Jet diff = jet_compose(f.truncated(n), f.truncated(n)) - jet_compose(g.truncated(n), g.truncated(n));
  SquaresDifference out;
  out.k = k;
  out.coefficient = diff[k];
  out.predicted = Rational(k % 2 == 0 ? 0 : -2) * (f[k] - g[k]);
  for (int j = 2; j <= n; ++j) {
    if (sgn(diff[j]) != 0) {
      out.first_nonzero = std::make_pair(j, diff[j]);
      break;
    }
  }
  return out;
}

std::optional<Displacement> displacement_order(const Jet& p) {
  if (p.linear_coefficient() != 1) {
    throw Error(ErrorCode::UnsupportedLinearPart, "displacement needs linear coefficient 1: " + p.to_string());
  }
  const int k = first_nonlinear(p);
  if (k == 0) return std::nullopt;
  return Displacement{k, p[k]};
}

}  // namespace pfocus
