#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "congibbs/rng.hpp"

namespace congibbs {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Kahan-compensated accumulator.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(sum_i exp(a[i])); -inf entries contribute nothing.
inline double log_sum_exp(std::span<const double> a) {
  double m = kNegInf;
  for (double x : a)
    if (x > m) m = x;
  if (m == kNegInf) return kNegInf;
  KahanSum s;
  for (double x : a)
    if (x != kNegInf) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

// ln(k!) from a cumulative table built with compensated summation; the table
// covers the sizes this library is meant for, lgamma picks up the tail.
double log_factorial(std::int64_t k);

// Index drawn with probability proportional to q[i] * exp(a[i]).
// Entries with q[i] <= 0 or a[i] = -inf are excluded; throws if nothing
// remains. q values are taken as exact (they are small integer counts in
// every caller); only the exponentials are subject to rounding.
int suitable_sample(std::span<const double> q, std::span<const double> a, Rng& rng);

}  // namespace congibbs
