#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace congibbs {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

inline double to_double(const Rational& r) {
  return r.numerator().convert_to<double>() / r.denominator().convert_to<double>();
}

// Rational extended with a single +infinity state. Used for costs and
// potentials so that capacity violations stay exact instead of hiding behind
// a large finite surrogate. Arithmetic saturates: inf + x = inf.
class ExtRational {
 public:
  ExtRational() : value_(0) {}
  ExtRational(Rational v) : value_(std::move(v)) {}
  ExtRational(const BigInt& v) : value_(v) {}
  ExtRational(long v) : value_(BigInt(v)) {}

  static ExtRational infinity() {
    ExtRational r;
    r.infinite_ = true;
    return r;
  }

  bool is_infinite() const { return infinite_; }

  const Rational& value() const {
    if (infinite_) throw std::logic_error("ExtRational: value() on infinity");
    return value_;
  }

  double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity()
                     : congibbs::to_double(value_);
  }

  ExtRational& operator+=(const ExtRational& o) {
    if (o.infinite_) infinite_ = true;
    if (!infinite_) value_ += o.value_;
    return *this;
  }
  friend ExtRational operator+(ExtRational a, const ExtRational& b) {
    a += b;
    return a;
  }
  friend ExtRational operator-(const ExtRational& a, const ExtRational& b) {
    if (b.infinite_) throw std::logic_error("ExtRational: cannot subtract infinity");
    if (a.infinite_) return infinity();
    return ExtRational(a.value_ - b.value_);
  }

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend bool operator!=(const ExtRational& a, const ExtRational& b) { return !(a == b); }
  friend bool operator<(const ExtRational& a, const ExtRational& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const ExtRational& a, const ExtRational& b) {
    return a < b || a == b;
  }
  friend bool operator>(const ExtRational& a, const ExtRational& b) { return b < a; }
  friend bool operator>=(const ExtRational& a, const ExtRational& b) { return b <= a; }

 private:
  bool infinite_ = false;
  Rational value_;
};

BigInt binom_big(int n, int k);

// Natural log of a positive integer, accurate even when the integer does not
// fit in a double.
double log_bigint(const BigInt& x);

// Accepts "3", "-3", "5/2" and decimal literals like "0.25".
Rational parse_rational(const std::string& token);

std::string to_string(const Rational& r);
std::string to_string(const ExtRational& r);

}  // namespace congibbs
