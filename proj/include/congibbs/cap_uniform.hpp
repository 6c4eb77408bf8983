#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "congibbs/game.hpp"
#include "congibbs/rational.hpp"
#include "congibbs/rng.hpp"

namespace congibbs {

// Bipartite degree sequence: one row per player (degree k_i), one column per
// resource (degree alpha_j). Simple graphs only, no parallel edges.
struct DegreeSequence {
  std::vector<int> row_degrees;
  std::vector<int> column_degrees;
};

struct McKayTerms {
  long long total = 0;          // sum of the row degrees
  long long row_pairs = 0;      // sum k_i (k_i - 1)
  long long column_pairs = 0;   // sum alpha_j (alpha_j - 1)
  double log_prefactor = 0.0;   // ln total! - sum ln k_i! - sum ln alpha_j!
};

McKayTerms mckay_terms(const DegreeSequence& seq);

// ln of the pairing-model estimate for the number of bipartite graphs with
// the given degrees: prefactor * exp(-row_pairs * column_pairs / total^2).
double log_mckay_estimate(const DegreeSequence& seq);

// Exact number of bipartite graphs with the given degrees. Guarded to at
// most 12 rows and rows * columns <= 120; larger sequences are refused.
BigInt count_bipartite(const DegreeSequence& seq);

// Exactly uniform graph with the given degrees, as sorted per-row column
// lists. Same size guard as count_bipartite. Throws if none exists.
std::vector<std::vector<int>> sample_bipartite_uniform(const DegreeSequence& seq, Rng& rng);

// Uniform integer in [0, bound).
BigInt uniform_bigint(Rng& rng, const BigInt& bound);

enum class CapMode { Exact, McKay };

// Resource-load profile of a capacitated k-uniform game, drawn approximately
// from the Gibbs marginal over loads. Exact mode weights each profile by the
// exact number of underlying strategy profiles; McKay mode substitutes the
// pairing-model estimate.
std::vector<int> sample_load_profile_cap(const CongestionGame& g, double temperature,
                                         CapMode mode, double eps, double mix_constant, Rng& rng);

StrategyProfile sample_gibbs_cap(const CongestionGame& g, double temperature, CapMode mode,
                                 double eps, double mix_constant, Rng& rng);

// Feasible starting profile: players in order grab their k resources from
// whatever has the most remaining capacity.
StrategyProfile greedy_cap_start(const CongestionGame& g);

// Probability of each profile in `support` under the exact composition of
// the two sampler stages (load marginal, then uniform assignment). In McKay
// mode the load marginal is conditioned on realizability, matching the
// sampler's redraw loop.
std::vector<double> exact_stage_distribution_cap(const CongestionGame& g, double temperature,
                                                 CapMode mode,
                                                 std::span<const StrategyProfile> support);

namespace detail {

// count_bipartite without the size guard; columns beyond the guard are fine
// as long as the dynamic-programming state (row residual classes) fits.
BigInt count_bipartite_unguarded(std::span<const int> row_degrees,
                                 std::span<const int> column_degrees);

}  // namespace detail

}  // namespace congibbs
