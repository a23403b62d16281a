#include "pfocus/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfocus/errors.hpp"

namespace pfocus {

Poly2::Poly2(const std::vector<std::tuple<int, int, double>>& terms) {
  for (const auto& [i, j, c] : terms) {
    if (i < 0 || j < 0) throw Error(ErrorCode::InvalidInput, "negative exponent in polynomial term");
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidInput, "non-finite polynomial coefficient");
    add(i, j, c);
  }
  rebuild();
}

Poly2 Poly2::constant(double c) { return Poly2({{0, 0, c}}); }
Poly2 Poly2::monomial(int i, int j, double c) { return Poly2({{i, j, c}}); }

void Poly2::add(int i, int j, double c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace({i, j}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Poly2::rebuild() {
  rows_.clear();
  for (const auto& [ij, c] : terms_) {
    const auto [i, j] = ij;
    if (rows_.size() <= static_cast<std::size_t>(j)) rows_.resize(static_cast<std::size_t>(j) + 1);
    auto& row = rows_[static_cast<std::size_t>(j)];
    if (row.size() <= static_cast<std::size_t>(i)) row.resize(static_cast<std::size_t>(i) + 1, 0.0);
    row[static_cast<std::size_t>(i)] = c;
  }
}

double Poly2::coeff(int i, int j) const {
  auto it = terms_.find({i, j});
  return it == terms_.end() ? 0.0 : it->second;
}

int Poly2::degree() const noexcept {
  int d = -1;
  for (const auto& [ij, c] : terms_) d = std::max(d, ij.first + ij.second);
  return d;
}

double Poly2::operator()(double x, double y) const {
  double acc = 0.0;
  for (auto row = rows_.rbegin(); row != rows_.rend(); ++row) {
    double inner = 0.0;
    for (auto c = row->rbegin(); c != row->rend(); ++c) inner = inner * x + *c;
    acc = acc * y + inner;
  }
  return acc;
}

Poly2 Poly2::dx() const {
  Poly2 out;
  for (const auto& [ij, c] : terms_)
    if (ij.first > 0) out.add(ij.first - 1, ij.second, c * ij.first);
  out.rebuild();
  return out;
}

Poly2 Poly2::dy() const {
  Poly2 out;
  for (const auto& [ij, c] : terms_)
    if (ij.second > 0) out.add(ij.first, ij.second - 1, c * ij.second);
  out.rebuild();
  return out;
}

Poly2 Poly2::truncated(int total_degree) const {
  Poly2 out;
  for (const auto& [ij, c] : terms_)
    if (ij.first + ij.second <= total_degree) out.add(ij.first, ij.second, c);
  out.rebuild();
  return out;
}

Poly2 Poly2::mirrored_y() const {
  Poly2 out;
  for (const auto& [ij, c] : terms_) out.add(ij.first, ij.second, ij.second % 2 ? -c : c);
  out.rebuild();
  return out;
}

Poly2 operator+(const Poly2& a, const Poly2& b) {
  Poly2 out = a;
  for (const auto& [ij, c] : b.terms_) out.add(ij.first, ij.second, c);
  out.rebuild();
  return out;
}

Poly2 operator-(const Poly2& a, const Poly2& b) { return a + (-1.0) * b; }

Poly2 operator*(double s, const Poly2& a) {
  Poly2 out;
  for (const auto& [ij, c] : a.terms_) out.add(ij.first, ij.second, s * c);
  out.rebuild();
  return out;
}

Poly2 operator*(const Poly2& a, const Poly2& b) {
  Poly2 out;
  for (const auto& [ia, ca] : a.terms_)
    for (const auto& [ib, cb] : b.terms_) out.add(ia.first + ib.first, ia.second + ib.second, ca * cb);
  out.rebuild();
  return out;
}

Poly2 Poly2::pow(int e, int total_degree) const {
  Poly2 out = constant(1.0);
  for (int i = 0; i < e; ++i) out = (out * *this).truncated(total_degree);
  return out;
}

Poly2 Poly2::substitute(const Poly2& u, const Poly2& v, int total_degree) const {
  int max_i = 0, max_j = 0;
  for (const auto& [ij, c] : terms_) {
    max_i = std::max(max_i, ij.first);
    max_j = std::max(max_j, ij.second);
  }
  std::vector<Poly2> upow{constant(1.0)}, vpow{constant(1.0)};
  for (int i = 1; i <= max_i; ++i) upow.push_back((upow.back() * u).truncated(total_degree));
  for (int j = 1; j <= max_j; ++j) vpow.push_back((vpow.back() * v).truncated(total_degree));
  Poly2 out;
  for (const auto& [ij, c] : terms_) {
    const Poly2 term = (upow[static_cast<std::size_t>(ij.first)] * vpow[static_cast<std::size_t>(ij.second)]).truncated(total_degree);
    for (const auto& [kl, d] : term.terms_) out.add(kl.first, kl.second, c * d);
  }
  out.rebuild();
  return out;
}

nlohmann::json Poly2::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [ij, c] : terms_) out.push_back({ij.first, ij.second, c});
  return out;
}

Poly2 Poly2::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "polynomial must be a list of [i, j, c] triples");
  std::vector<std::tuple<int, int, double>> terms;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() || !t[2].is_number()) {
      throw Error(ErrorCode::ParseError, "bad polynomial term " + t.dump());
    }
    terms.emplace_back(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
  }
  return Poly2(terms);
}

std::string Poly2::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [ij, c] : terms_) {
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    std::vector<std::string> factors;
    const double mag = std::abs(c);
    if (mag != 1.0 || ij.first + ij.second == 0) {
      std::ostringstream m;
      m.precision(12);
      m << mag;
      factors.push_back(m.str());
    }
    if (ij.first) factors.push_back(ij.first > 1 ? "x^" + std::to_string(ij.first) : "x");
    if (ij.second) factors.push_back(ij.second > 1 ? "y^" + std::to_string(ij.second) : "y");
    for (std::size_t f = 0; f < factors.size(); ++f) os << (f ? "*" : "") << factors[f];
  }
  return os.str();
}

PolyField PolyField::reversed() const { return {(-1.0) * M, (-1.0) * N}; }

PolyField PolyField::mirrored_y() const { return {M.mirrored_y(), (-1.0) * N.mirrored_y()}; }

nlohmann::json PolyField::to_json() const { return {{"M", M.to_json()}, {"N", N.to_json()}}; }

PolyField PolyField::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("M") || !j.contains("N")) throw Error(ErrorCode::ParseError, "field needs M and N");
  return {Poly2::from_json(j.at("M")), Poly2::from_json(j.at("N"))};
}

PolyField pushforward_x(const PolyField& v, const std::vector<double>& psi, const std::vector<double>& phi,
                        int total_degree) {
  Poly2 phi_u;
  for (std::size_t d = 0; d < phi.size(); ++d) phi_u = phi_u + Poly2::monomial(static_cast<int>(d), 0, phi[d]);
  phi_u = phi_u.truncated(total_degree);
  Poly2 dpsi;
  for (std::size_t d = 1; d < psi.size(); ++d) dpsi = dpsi + Poly2::monomial(static_cast<int>(d - 1), 0, psi[d] * d);
  const Poly2 y = Poly2::y();
  const Poly2 m = v.M.substitute(phi_u, y, total_degree);
  const Poly2 n = v.N.substitute(phi_u, y, total_degree);
  const Poly2 scale = dpsi.substitute(phi_u, y, total_degree);
  return {(scale * m).truncated(total_degree), n};
}

}  // namespace pfocus
