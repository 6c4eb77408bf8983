#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "congibbs/game.hpp"
#include "congibbs/rng.hpp"

namespace congibbs {

// Log-weight of a path-load profile alpha in a series-parallel game:
//   ln(n! / prod alpha_p!) - T * scale * potential(alpha).
// scale is 1 for the natural Gibbs measure and ln 2 when the temperature is
// an exponent of 2 (the equilibrium sampler). Instances keep scratch space,
// so share one per thread at most.
class EpGibbsWeights {
 public:
  EpGibbsWeights(const CongestionGame& g, double temperature, double scale = 1.0);

  double operator()(std::span<const int> alpha) const;

 private:
  const CongestionGame* game_;
  double temperature_;
  double scale_;
  double log_n_factorial_;
  mutable std::vector<int> loads_;
};

// Draws a path-load profile approximately from the Gibbs measure, within
// total variation eps, by running the base-exchange walk on the polarized
// uniform matroid (paths x player copies).
std::vector<int> sample_load_profile_ep(const CongestionGame& g, double temperature, double eps,
                                        double mix_constant, Rng& rng);

// Uniform strategy profile among those with the given path loads.
StrategyProfile assign_players_uniform(const CongestionGame& g, std::span<const int> alpha,
                                       Rng& rng);

StrategyProfile sample_gibbs_ep(const CongestionGame& g, double temperature, double eps,
                                double mix_constant, Rng& rng);

// Probability of each profile in `support` under the exact composition of
// the two sampler stages: the normalized load-profile weights spread
// uniformly over the profiles realizing each load profile. Useful as an
// independently ordered check against full-enumeration Gibbs.
std::vector<double> exact_stage_distribution_ep(const CongestionGame& g, double temperature,
                                                double scale,
                                                std::span<const StrategyProfile> support);

// Smallest integer T with 2^-T small enough that the base-2 Gibbs measure at
// temperature T puts at most eps/2 relative mass outside the potential
// minimizers: ceil(n log2 q + log2(2 / eps)).
int pne_temperature(const CongestionGame& g, double eps);

struct PneStats {
  int attempts = 0;
};

// Near-uniform sample from the pure Nash equilibria of a series-parallel
// game: Gibbs sampling at the temperature above, rerun until the drawn
// profile attains the exact minimum potential.
StrategyProfile sample_uniform_pne(const CongestionGame& g, double eps, double mix_constant,
                                   Rng& rng, PneStats* stats = nullptr);

}  // namespace congibbs
