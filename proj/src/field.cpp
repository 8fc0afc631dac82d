#include "umbilic4/field.hpp"

#include <stdexcept>

namespace umbilic4 {

namespace {

int rsign(const Rational& q) { return sgn(q); }

// sign of p + q√2
int sign_sqrt2(const Rational& p, const Rational& q) {
  int sp = rsign(p), sq = rsign(q);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  return (p * p > 2 * q * q) ? sp : sq;
}

const char* kSuffix[4] = {"", "*sqrt2", "*sqrt5", "*sqrt10"};

}  // namespace

AlgebraicScalar::AlgebraicScalar(const Rational& a, const Rational& b, const Rational& c,
                                 const Rational& d)
    : c_{a, b, c, d} {
  for (auto& q : c_) q.canonicalize();
}

bool AlgebraicScalar::is_zero() const {
  return c_[0] == 0 && c_[1] == 0 && c_[2] == 0 && c_[3] == 0;
}

int AlgebraicScalar::sign() const {
  // Write x = A + B√5 with A = a + b√2, B = c + d√2.
  int sa = sign_sqrt2(c_[0], c_[1]);
  int sb = sign_sqrt2(c_[2], c_[3]);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare A² with 5B², both in Q(√2).
  Rational n0 = c_[0] * c_[0] + 2 * c_[1] * c_[1] - 5 * (c_[2] * c_[2] + 2 * c_[3] * c_[3]);
  Rational n1 = 2 * c_[0] * c_[1] - 10 * c_[2] * c_[3];
  return sign_sqrt2(n0, n1) > 0 ? sa : sb;
}

double AlgebraicScalar::to_double() const {
  static const double r2 = std::sqrt(2.0), r5 = std::sqrt(5.0), r10 = std::sqrt(10.0);
  return c_[0].get_d() + c_[1].get_d() * r2 + c_[2].get_d() * r5 + c_[3].get_d() * r10;
}

AlgebraicScalar& AlgebraicScalar::operator+=(const AlgebraicScalar& o) {
  for (int k = 0; k < 4; ++k) c_[k] += o.c_[k];
  return *this;
}

AlgebraicScalar& AlgebraicScalar::operator-=(const AlgebraicScalar& o) {
  for (int k = 0; k < 4; ++k) c_[k] -= o.c_[k];
  return *this;
}

AlgebraicScalar& AlgebraicScalar::operator*=(const AlgebraicScalar& o) {
  const auto& [a, b, c, d] = c_;
  const auto& [e, f, g, h] = o.c_;
  Rational r0 = a * e + 2 * b * f + 5 * c * g + 10 * d * h;
  Rational r1 = a * f + b * e + 5 * c * h + 5 * d * g;
  Rational r2 = a * g + c * e + 2 * b * h + 2 * d * f;
  Rational r3 = a * h + d * e + b * g + c * f;
  c_ = {r0, r1, r2, r3};
  return *this;
}

AlgebraicScalar AlgebraicScalar::inverse() const {
  if (is_zero()) throw std::domain_error("AlgebraicScalar: division by zero");
  // x = A + B√5  ->  1/x = (A - B√5) / (A² - 5B²), and A² - 5B² = p + q√2.
  const auto& [a, b, c, d] = c_;
  Rational p = a * a + 2 * b * b - 5 * (c * c + 2 * d * d);
  Rational q = 2 * a * b - 10 * c * d;
  Rational n = p * p - 2 * q * q;  // norm down to Q, nonzero since x != 0
  AlgebraicScalar inv_norm(p / n, -q / n);
  return conj5() * inv_norm;
}

std::string AlgebraicScalar::to_string() const {
  std::string out;
  for (int k = 0; k < 4; ++k) {
    if (c_[k] == 0) continue;
    std::string term = c_[k].get_str();
    if (!out.empty() && term[0] != '-') out += '+';
    out += term;
    out += kSuffix[k];
  }
  return out.empty() ? "0" : out;
}

AlgebraicScalar AlgebraicScalar::parse(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ') s += ch;
  if (s.empty()) throw std::invalid_argument("empty algebraic scalar");
  AlgebraicScalar out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = pos + 1;
    while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
    std::string term = s.substr(pos, end - pos);
    pos = end;
    bool neg = false;
    if (term[0] == '+' || term[0] == '-') {
      neg = term[0] == '-';
      term.erase(0, 1);
    }
    int slot = 0;
    std::string coeff = term;
    if (auto at = term.find("sqrt"); at != std::string::npos) {
      std::string radicand = term.substr(at + 4);
      if (radicand == "2") slot = 1;
      else if (radicand == "5") slot = 2;
      else if (radicand == "10") slot = 3;
      else throw std::invalid_argument("unsupported radical: " + term);
      coeff = term.substr(0, at);
      if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
      if (coeff.empty()) coeff = "1";
    }
    Rational q;
    if (q.set_str(coeff, 10) != 0) throw std::invalid_argument("bad rational: " + coeff);
    q.canonicalize();
    out.c_[slot] += neg ? Rational(-q) : q;
  }
  return out;
}

}  // namespace umbilic4
