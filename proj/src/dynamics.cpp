#include "congibbs/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "congibbs/numeric.hpp"

namespace congibbs {

namespace {

constexpr std::int64_t kMenuGuard = 1'000'000;

}  // namespace

void logit_step(const CongestionGame& g, StrategyProfile& s, double temperature, Rng& rng) {
  const int n = g.num_players();
  const int player = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n)));

  std::vector<int> loads = resource_loads(g, s).counts;
  g.visit_strategy(player, s.choice[static_cast<std::size_t>(player)],
                   [&](int e) { loads[static_cast<std::size_t>(e)] -= 1; });

  const std::int64_t menu = g.num_strategies(player);
  if (menu > kMenuGuard) {
    throw std::runtime_error("logit step: strategy menu too large to enumerate");
  }

  std::vector<double> log_w(static_cast<std::size_t>(menu));
  std::vector<double> pref(static_cast<std::size_t>(menu), 1.0);
  for (std::int64_t t = 0; t < menu; ++t) {
    double marginal = 0.0;
    g.visit_strategy(player, t, [&](int e) {
      marginal += g.resource(e).at_dbl(loads[static_cast<std::size_t>(e)] + 1);
    });
    // Keep 0 * inf out of the weight when the temperature is zero.
    log_w[static_cast<std::size_t>(t)] =
        std::isinf(marginal) ? kNegInf : -temperature * marginal;
  }

  const int pick = suitable_sample(pref, log_w, rng);
  s.choice[static_cast<std::size_t>(player)] = pick;
}

void relaxed_logit_step(const CongestionGame& g, StrategyProfile& s, double temperature,
                        Rng& rng) {
  if (!g.symmetric()) {
    throw std::invalid_argument("relaxed chain requires a symmetric game");
  }
  if (uniform_index(rng, 2) == 0) {
    const auto n = static_cast<std::uint64_t>(g.num_players());
    const auto i = static_cast<std::size_t>(uniform_index(rng, n));
    const auto j = static_cast<std::size_t>(uniform_index(rng, n));
    std::swap(s.choice[i], s.choice[j]);
    return;
  }
  logit_step(g, s, temperature, rng);
}

ChainTrace run_chain(const CongestionGame& g, const StrategyProfile& start, ChainKind kind,
                     const ChainConfig& config) {
  if (static_cast<int>(start.choice.size()) != g.num_players()) {
    throw std::invalid_argument("chain start has the wrong number of players");
  }
  if (!is_feasible(g, start)) {
    throw std::invalid_argument("chain needs a feasible starting profile");
  }

  Rng rng(config.seed);
  ChainTrace trace;
  trace.final_profile = start;
  trace.steps = config.steps;

  StrategyProfile& s = trace.final_profile;
  for (std::uint64_t t = 1; t <= config.steps; ++t) {
    if (kind == ChainKind::Logit) {
      logit_step(g, s, config.temperature, rng);
    } else {
      relaxed_logit_step(g, s, config.temperature, rng);
    }
    if (config.record_every != 0 && t % config.record_every == 0) {
      trace.records.push_back(s);
    }
  }
  return trace;
}

double relaxed_mixing_budget(int num_players, std::int64_t num_strategies, double temperature,
                             double phi_max, double eps) {
  if (num_players < 1 || num_strategies < 1) {
    throw std::invalid_argument("mixing budget needs at least one player and strategy");
  }
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("mixing budget needs eps in (0, 1)");
  }
  if (!(temperature * phi_max > 0.0)) {
    throw std::invalid_argument("mixing budget needs a positive temperature-range product");
  }
  const double n = static_cast<double>(num_players);
  const double n3 = n * n * n;
  const double lq = std::log(static_cast<double>(num_strategies));
  const double lnln = lq > 0.0 ? std::max(0.0, std::log(lq)) : 0.0;
  const double tail = std::log(2.0 * temperature * phi_max / (eps * eps));
  return n3 * (std::log(n) + lnln + tail) + n3;
}

}  // namespace congibbs
