#include "pfocus/jet_io.hpp"

#include <cctype>
#include <limits>
#include <string>

#include "pfocus/errors.hpp"

namespace pfocus {

namespace {

nlohmann::json integer_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return static_cast<long long>(z.get_si());
  return z.get_str();
}

mpz_class integer_from_json(const nlohmann::json& v) {
  if (v.is_number_integer()) return mpz_class(std::to_string(v.get<long long>()));
  if (v.is_string()) {
    mpz_class z;
    if (z.set_str(v.get<std::string>(), 10) != 0) throw Error(ErrorCode::ParseError, "bad integer " + v.dump());
    return z;
  }
  throw Error(ErrorCode::ParseError, "expected an integer, got " + v.dump());
}

std::string normalize_minus(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2212 MINUS SIGN
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x88 && static_cast<unsigned char>(text[i + 2]) == 0x92) {
      out.push_back('-');
      i += 2;
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(text[i]))) out.push_back(text[i]);
  }
  return out;
}

}  // namespace

nlohmann::json jet_to_json(const Jet& f) {
  nlohmann::json out = nlohmann::json::array();
  for (int d = 1; d <= f.order(); ++d) {
    if (sgn(f[d]) == 0) continue;
    out.push_back({{"degree", d},
                   {"numerator", integer_to_json(f[d].get_num())},
                   {"denominator", integer_to_json(f[d].get_den())}});
  }
  return out;
}

Jet jet_from_json(const nlohmann::json& records, std::optional<int> order) {
  if (!records.is_array()) throw Error(ErrorCode::ParseError, "jet must be a JSON list");
  std::vector<std::pair<int, Rational>> terms;
  int max_degree = 1;
  int previous = 0;
  for (const auto& r : records) {
    if (!r.is_object() || !r.contains("degree") || !r.contains("numerator") || !r.contains("denominator")) {
      throw Error(ErrorCode::ParseError, "jet record needs degree/numerator/denominator: " + r.dump());
    }
    const int degree = r.at("degree").get<int>();
    if (degree <= previous) throw Error(ErrorCode::ParseError, "jet records must be strictly degree-sorted");
    previous = degree;
    const mpz_class den = integer_from_json(r.at("denominator"));
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator at degree " + std::to_string(degree));
    Rational value(integer_from_json(r.at("numerator")), den);
    value.canonicalize();
    if (sgn(value) == 0) throw Error(ErrorCode::ParseError, "zero entries are not allowed");
    terms.emplace_back(degree, value);
    max_degree = std::max(max_degree, degree);
  }
  return Jet::from_terms(terms, order.value_or(max_degree));
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational r;
    mpz_class num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0 || den == 0) {
      throw Error(ErrorCode::ParseError, "bad rational '" + s + "'");
    }
    r = Rational(num, den);
    r.canonicalize();
    return r;
  }
  // decimal with optional fraction and exponent, converted exactly
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long exponent = 0;
  bool seen_digit = false;
  for (; pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'); ++pos) {
    if (s[pos] == '.') {
      if (exponent != 0 || digits.find('.') != std::string::npos) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
      digits.push_back('.');
      continue;
    }
    seen_digit = true;
    digits.push_back(s[pos]);
  }
  if (!seen_digit) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    try {
      exponent = std::stol(s.substr(pos + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad exponent in '" + s + "'");
    }
    pos = s.size();
  }
  if (pos != s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
  long frac_digits = 0;
  if (auto dot = digits.find('.'); dot != std::string::npos) {
    frac_digits = static_cast<long>(digits.size() - dot - 1);
    digits.erase(dot, 1);
  }
  mpz_class num(digits, 10);
  const long scale = exponent - frac_digits;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational r = scale < 0 ? Rational(num, ten_pow) : Rational(num * ten_pow, 1);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

Jet parse_jet(std::string_view text, std::optional<int> order) {
  const std::string s = normalize_minus(text);
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty jet expression");
  std::vector<std::pair<int, Rational>> terms;
  int max_degree = 1;
  std::size_t pos = 0;
  while (pos < s.size()) {
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') {
      negative = s[pos] == '-';
      ++pos;
    } else if (!terms.empty()) {
      throw Error(ErrorCode::ParseError, "expected '+' or '-' at offset " + std::to_string(pos) + " in '" + s + "'");
    }
    std::size_t end = pos;
    while (end < s.size() && s[end] != '+' && s[end] != '-') {
      // keep exponent signs such as 1e-3 attached to the number
      ++end;
      if (end < s.size() && (s[end] == '+' || s[end] == '-') && (s[end - 1] == 'e' || s[end - 1] == 'E')) ++end;
    }
    const std::string term = s.substr(pos, end - pos);
    pos = end;
    if (term.empty()) throw Error(ErrorCode::ParseError, "empty term in '" + s + "'");

    const auto t = term.find('t');
    Rational coeff(1);
    int degree = 0;
    if (t == std::string::npos) {
      coeff = parse_rational(term);
    } else {
      std::string lead = term.substr(0, t);
      if (!lead.empty() && lead.back() == '*') lead.pop_back();
      if (!lead.empty()) coeff = parse_rational(lead);
      const std::string tail = term.substr(t + 1);
      if (tail.empty()) {
        degree = 1;
      } else if (tail.front() == '^') {
        try {
          std::size_t used = 0;
          degree = std::stoi(tail.substr(1), &used);
          if (used + 1 != tail.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw Error(ErrorCode::ParseError, "bad exponent in term '" + term + "'");
        }
      } else {
        throw Error(ErrorCode::ParseError, "bad term '" + term + "'");
      }
    }
    if (negative) coeff = -coeff;
    if (degree == 0 && sgn(coeff) != 0) throw Error(ErrorCode::ConstantTerm, "germs must fix 0: '" + term + "'");
    if (degree < 0) throw Error(ErrorCode::ParseError, "negative degree in '" + term + "'");
    if (degree > 0) {
      terms.emplace_back(degree, coeff);
      max_degree = std::max(max_degree, degree);
    }
  }
  return Jet::from_terms(terms, order.value_or(max_degree));
}

}  // namespace pfocus
