#include "congibbs/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace congibbs {

namespace {

BigInt parse_integer(const std::string& s, const std::string& whole) {
  if (s.empty()) throw std::invalid_argument("bad rational: '" + whole + "'");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument("bad rational: '" + whole + "'");
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw std::invalid_argument("bad rational: '" + whole + "'");
  return BigInt(s);
}

}  // namespace

BigInt binom_big(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

double log_bigint(const BigInt& x) {
  if (x <= 0) throw std::invalid_argument("log_bigint: argument must be positive");
  const auto bits = boost::multiprecision::msb(x);
  if (bits <= 52) return std::log(x.convert_to<double>());
  const BigInt top = x >> (bits - 52);
  return std::log(top.convert_to<double>()) + static_cast<double>(bits - 52) * std::log(2.0);
}

Rational parse_rational(const std::string& token) {
  const auto slash = token.find('/');
  if (slash != std::string::npos) {
    const BigInt num = parse_integer(token.substr(0, slash), token);
    const BigInt den = parse_integer(token.substr(slash + 1), token);
    if (den == 0) throw std::invalid_argument("bad rational (zero denominator): '" + token + "'");
    return Rational(num, den);
  }
  const auto dot = token.find('.');
  if (dot != std::string::npos) {
    const std::string frac = token.substr(dot + 1);
    const BigInt whole = parse_integer(token.substr(0, dot).empty() ? "0" : token.substr(0, dot), token);
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const BigInt frac_num = frac.empty() ? BigInt(0) : parse_integer(frac, token);
    const bool neg = !token.empty() && token[0] == '-';
    BigInt num = whole * scale + (neg ? -frac_num : frac_num);
    return Rational(num, scale);
  }
  return Rational(parse_integer(token, token));
}

std::string to_string(const Rational& r) {
  std::string s = r.numerator().str();
  if (r.denominator() != 1) s += "/" + r.denominator().str();
  return s;
}

std::string to_string(const ExtRational& r) {
  return r.is_infinite() ? "inf" : to_string(r.value());
}

}  // namespace congibbs
