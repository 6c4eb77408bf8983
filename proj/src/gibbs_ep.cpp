#include "congibbs/gibbs_ep.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "congibbs/matroid.hpp"
#include "congibbs/numeric.hpp"

namespace congibbs {

EpGibbsWeights::EpGibbsWeights(const CongestionGame& g, double temperature, double scale)
    : game_(&g),
      temperature_(temperature),
      scale_(scale),
      log_n_factorial_(log_factorial(g.num_players())),
      loads_(static_cast<std::size_t>(g.num_resources()), 0) {
  if (g.kind() != StructureKind::ExtensionParallel) {
    throw std::invalid_argument("path-load weights need a series-parallel game");
  }
}

double EpGibbsWeights::operator()(std::span<const int> alpha) const {
  const auto& paths = game_->paths();
  if (alpha.size() != paths.size()) {
    throw std::invalid_argument("path-load profile has the wrong length");
  }

  std::fill(loads_.begin(), loads_.end(), 0);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const int ap = alpha[p];
    if (ap == 0) continue;
    for (int e : paths[p]) loads_[static_cast<std::size_t>(e)] += ap;
  }

  double potential = 0.0;
  for (int e = 0; e < game_->num_resources(); ++e) {
    potential += game_->resource(e).cumulative_dbl(loads_[static_cast<std::size_t>(e)]);
  }
  if (std::isinf(potential)) return kNegInf;

  double log_count = log_n_factorial_;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    log_count -= log_factorial(alpha[p]);
  }
  return log_count - temperature_ * scale_ * potential;
}

namespace {

std::vector<int> sample_load_profile_scaled(const CongestionGame& g, double temperature,
                                            double scale, double eps, double mix_constant,
                                            Rng& rng) {
  const auto q = static_cast<int>(g.paths().size());
  const int n = g.num_players();

  EpGibbsWeights weights(g, temperature, scale);
  LogWeightFn fn = [&weights](std::span<const int> alpha) { return weights(alpha); };

  BaseSampleConfig config;
  config.eps = eps;
  config.mix_constant = mix_constant;
  config.start = strategy_loads(g, min_potential_profile(g)).counts;

  MatroidSpec spec = MatroidSpec::uniform(q, n, n);
  return sample_polymatroid_base(spec, fn, config, rng).alpha;
}

}  // namespace

std::vector<int> sample_load_profile_ep(const CongestionGame& g, double temperature, double eps,
                                        double mix_constant, Rng& rng) {
  return sample_load_profile_scaled(g, temperature, 1.0, eps, mix_constant, rng);
}

StrategyProfile assign_players_uniform(const CongestionGame& g, std::span<const int> alpha,
                                       Rng& rng) {
  if (!g.symmetric()) {
    throw std::invalid_argument("load-based assignment needs a symmetric game");
  }
  const int n = g.num_players();
  if (alpha.size() != static_cast<std::size_t>(g.num_strategies(0))) {
    throw std::invalid_argument("strategy-count profile has the wrong length");
  }
  std::int64_t total = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("strategy counts must be non-negative");
    total += a;
  }
  if (total != n) {
    throw std::invalid_argument("strategy counts must sum to the number of players");
  }

  std::vector<int> slot(static_cast<std::size_t>(n));
  std::iota(slot.begin(), slot.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, static_cast<std::uint64_t>(i) + 1));
    std::swap(slot[static_cast<std::size_t>(i)], slot[j]);
  }

  StrategyProfile s;
  s.choice.assign(static_cast<std::size_t>(n), 0);
  std::size_t pos = 0;
  for (std::size_t p = 0; p < alpha.size(); ++p) {
    for (int c = 0; c < alpha[p]; ++c) {
      s.choice[static_cast<std::size_t>(slot[pos++])] = static_cast<std::int64_t>(p);
    }
  }
  return s;
}

StrategyProfile sample_gibbs_ep(const CongestionGame& g, double temperature, double eps,
                                double mix_constant, Rng& rng) {
  const std::vector<int> alpha = sample_load_profile_ep(g, temperature, eps, mix_constant, rng);
  return assign_players_uniform(g, alpha, rng);
}

std::vector<double> exact_stage_distribution_ep(const CongestionGame& g, double temperature,
                                                double scale,
                                                std::span<const StrategyProfile> support) {
  const auto q = static_cast<int>(g.paths().size());
  const int n = g.num_players();

  PolymatroidBaseSet box{std::vector<int>(static_cast<std::size_t>(q), n), n};
  const std::vector<std::vector<int>> profiles = box.enumerate();

  EpGibbsWeights weights(g, temperature, scale);
  std::vector<double> log_w;
  log_w.reserve(profiles.size());
  for (const auto& alpha : profiles) log_w.push_back(weights(alpha));
  const double lse = log_sum_exp(log_w);

  std::map<std::vector<int>, double> stage1;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    stage1.emplace(profiles[i], log_w[i] - lse);
  }

  std::vector<double> out;
  out.reserve(support.size());
  for (const auto& s : support) {
    const std::vector<int> alpha = strategy_loads(g, s).counts;
    double log_count = log_factorial(n);
    for (int a : alpha) log_count -= log_factorial(a);
    const double lp = stage1.at(alpha);
    out.push_back(std::isinf(lp) ? 0.0 : std::exp(lp - log_count));
  }
  return out;
}

int pne_temperature(const CongestionGame& g, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("equilibrium sampler needs eps in (0, 1)");
  }
  const auto q = static_cast<double>(g.paths().size());
  const double n = static_cast<double>(g.num_players());
  const double t = std::ceil(n * std::log2(q) + std::log2(2.0 / eps));
  return std::max(1, static_cast<int>(t));
}

StrategyProfile sample_uniform_pne(const CongestionGame& g, double eps, double mix_constant,
                                   Rng& rng, PneStats* stats) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("equilibrium sampler needs eps in (0, 1)");
  }
  const ExtRational phi_min = rosenthal_potential(g, min_potential_profile(g));
  const int temperature = pne_temperature(g, eps);
  const double stage_eps = eps / 2.0;

  const int max_attempts = 64 * static_cast<int>(std::ceil(1.0 / (1.0 - eps / 2.0)));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (stats != nullptr) stats->attempts = attempt + 1;
    const std::vector<int> alpha = sample_load_profile_scaled(
        g, static_cast<double>(temperature), std::log(2.0), stage_eps, mix_constant, rng);
    if (ep_potential(g, alpha) == phi_min) {
      return assign_players_uniform(g, alpha, rng);
    }
  }
  throw std::runtime_error("equilibrium sampler exhausted its retry budget");
}

}  // namespace congibbs
