#pragma once

#include <cstdint>
#include <vector>

#include "congibbs/game.hpp"
#include "congibbs/rng.hpp"

namespace congibbs {

enum class ChainKind { Logit, RelaxedLogit };

struct ChainConfig {
  double temperature = 1.0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t record_every = 0;  // 0: record nothing, keep only the final profile
};

struct ChainTrace {
  StrategyProfile final_profile;
  std::vector<StrategyProfile> records;
  std::uint64_t steps = 0;
};

// Picks a uniform player and resamples their strategy with probability
// proportional to exp(-T * potential of the deviation); capacity-violating
// deviations are excluded. A feasible profile therefore stays feasible.
void logit_step(const CongestionGame& g, StrategyProfile& s, double temperature, Rng& rng);

// With probability 1/2 swaps the strategies of an ordered uniform player
// pair (which never changes loads or the potential), otherwise performs a
// logit step. Requires a symmetric game so swaps stay meaningful.
void relaxed_logit_step(const CongestionGame& g, StrategyProfile& s, double temperature,
                        Rng& rng);

ChainTrace run_chain(const CongestionGame& g, const StrategyProfile& start, ChainKind kind,
                     const ChainConfig& config);

// Step budget that the relaxed chain is tested against:
//   n^3 (ln n + max(0, ln ln q) + ln(2 T phi_max / eps^2)) + n^3.
// Requires T * phi_max > 0 so the last logarithm is defined.
double relaxed_mixing_budget(int num_players, std::int64_t num_strategies, double temperature,
                             double phi_max, double eps);

}  // namespace congibbs
