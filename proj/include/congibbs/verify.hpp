#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "congibbs/dynamics.hpp"
#include "congibbs/game.hpp"
#include "congibbs/rational.hpp"

namespace congibbs {

// All feasible profiles, in odometer order over the players' menus.
// Refuses games whose full menu product exceeds the guard.
std::vector<StrategyProfile> enumerate_profiles(const CongestionGame& g,
                                                std::int64_t guard = 1'000'000);

struct ExactDistribution {
  std::vector<StrategyProfile> support;  // feasible profiles, odometer order
  std::vector<double> probability;
  std::vector<double> log_probability;
};

// Gibbs distribution by full enumeration; scale as in EpGibbsWeights.
ExactDistribution exact_gibbs(const CongestionGame& g, double temperature, double scale = 1.0);

double total_variation(std::span<const double> p, std::span<const double> q);

// Histogram of the samples over the given support, in support order.
// Throws on an empty sample set or a sample outside the support.
std::vector<double> empirical_distribution(std::span<const StrategyProfile> support,
                                           std::span<const StrategyProfile> samples);

// Position lookup for profiles within a fixed support.
class ProfileIndex {
 public:
  explicit ProfileIndex(std::span<const StrategyProfile> support);
  std::optional<std::size_t> find(const StrategyProfile& s) const;

 private:
  std::map<std::vector<std::int64_t>, std::size_t> pos_;
};

// One-step transition matrix of the chain over the feasible profiles,
// indexed as in exact_gibbs / enumerate_profiles.
std::vector<std::vector<double>> chain_kernel(const CongestionGame& g, ChainKind kind,
                                              double temperature);

struct KernelReport {
  double max_row_sum_error = 0.0;       // |row sum - 1|
  double max_reversibility_error = 0.0; // |pi_i K_ij - pi_j K_ji|
  double max_stationarity_error = 0.0;  // |(pi K)_j - pi_j|
  // log-domain reversibility on entries where both fluxes are positive,
  // meaningful when the stationary weights span many orders of magnitude
  double max_log_reversibility_error = 0.0;
};

KernelReport check_kernel(const std::vector<std::vector<double>>& kernel,
                          std::span<const double> pi);

// Mixing time from one start state: the smallest t such that the TV between
// the t-step distribution and pi stays at or below eps from t onward.
// Per-start TV need not be monotone, so after each crossing the scan
// continues through a doubling window before the time is accepted.
// Guards: at most 2000 states and 2^30 steps.
std::uint64_t exact_mixing_time(const std::vector<std::vector<double>>& kernel,
                                std::span<const double> pi, std::size_t start, double eps);

struct MixingResult {
  std::uint64_t time = 0;  // smallest t with worst-start TV <= eps
  double tv_at_time = 0.0;
  double tv_before = 0.0;  // worst-start TV at time - 1
};

// Worst-start mixing time. The worst-start TV is non-increasing in t, so
// repeated squaring plus binary search pins the crossing exactly.
// Same guards as above.
MixingResult worst_mixing_time(const std::vector<std::vector<double>>& kernel,
                               std::span<const double> pi, double eps);

struct ExchangeViolation {
  std::vector<int> alpha;
  std::vector<int> beta;
  int from = 0;  // coordinate with alpha[from] > beta[from] that no exchange repairs
};

// Exhaustive exchange-property check of f over the given profiles: for every
// pair and every coordinate where alpha exceeds beta, some opposite
// coordinate must give f(alpha) + f(beta) >= f(alpha - e_i + e_j) +
// f(beta + e_i - e_j). Returns the first violation found, if any.
std::optional<ExchangeViolation> check_m_convex(
    const std::vector<std::vector<int>>& profiles,
    const std::function<ExtRational(std::span<const int>)>& f);

std::optional<ExchangeViolation> check_m_convex_dbl(
    const std::vector<std::vector<int>>& profiles,
    const std::function<double(std::span<const int>)>& f, double tolerance);

struct PotentialViolation {
  StrategyProfile profile;
  int player = 0;
  std::int64_t alternative = 0;
};

// Exact check that unilateral cost changes equal potential changes across
// all feasible profile/deviation pairs.
std::optional<PotentialViolation> check_exact_potential(const CongestionGame& g);

}  // namespace congibbs
