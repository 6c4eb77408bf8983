#include "congibbs/numeric.hpp"

#include <cmath>

namespace congibbs {

namespace {

constexpr int kLogFactTableSize = 1 << 16;

const std::vector<double>& log_fact_table() {
  static std::vector<double> table;
  static std::once_flag once;
  std::call_once(once, [] {
    table.resize(kLogFactTableSize);
    KahanSum acc;
    table[0] = 0.0;
    for (int k = 1; k < kLogFactTableSize; ++k) {
      acc.add(std::log(static_cast<double>(k)));
      table[k] = acc.value();
    }
  });
  return table;
}

}  // namespace

double log_factorial(std::int64_t k) {
  if (k < 0) throw std::invalid_argument("log_factorial: negative argument");
  const auto& table = log_fact_table();
  if (k < kLogFactTableSize) return table[static_cast<int>(k)];
  return std::lgamma(static_cast<double>(k) + 1.0);
}

int suitable_sample(std::span<const double> q, std::span<const double> a, Rng& rng) {
  if (q.size() != a.size())
    throw std::invalid_argument("suitable_sample: length mismatch");
  double m = kNegInf;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0 && a[i] != kNegInf && a[i] > m) m = a[i];
  }
  if (m == kNegInf)
    throw std::invalid_argument("suitable_sample: no admissible entry");
  // shift by the max so every exponential is <= 1
  KahanSum total;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0 && a[i] != kNegInf) total.add(q[i] * std::exp(a[i] - m));
  }
  const double u = uniform_real01(rng) * total.value();
  KahanSum prefix;
  int last = -1;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0 || a[i] == kNegInf) continue;
    prefix.add(q[i] * std::exp(a[i] - m));
    last = static_cast<int>(i);
    if (u < prefix.value()) return last;
  }
  return last;  // u landed on the rounding boundary; return the last admissible
}

}  // namespace congibbs
