#pragma once

// Shared helpers for the test binaries: deterministic random games, sample
// collection, and empirical-distribution utilities.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "congibbs/game.hpp"
#include "congibbs/gamefile.hpp"
#include "congibbs/gibbs_ep.hpp"
#include "congibbs/rng.hpp"
#include "congibbs/verify.hpp"

namespace testutil {

using namespace congibbs;

inline std::string game_path(const std::string& name) {
  return std::string(CONGIBBS_SOURCE_DIR) + "/games/" + name;
}

inline CongestionGame load_or_die(const std::string& name) {
  return load_game(game_path(name));
}

// Nondecreasing integer cost table with values bounded by max_cost.
inline CostFunction random_cost(const std::string& name, int n, int max_cost, Rng& rng) {
  std::vector<Rational> values;
  values.reserve(static_cast<std::size_t>(n));
  long v = static_cast<long>(uniform_index(rng, 4));
  for (int i = 0; i < n; ++i) {
    values.emplace_back(BigInt(v));
    v = std::min<long>(max_cost, v + static_cast<long>(uniform_index(rng, 3)));
  }
  return CostFunction(name, std::move(values), n);
}

// Random series-parallel game drawn from a fixed set of shapes with 2 to 4
// paths, 2 to max_players players, and nondecreasing integer costs.
inline CongestionGame random_ep_game(Rng& rng, int max_players = 4, int max_cost = 8) {
  const int n = 2 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(max_players - 1)));
  const int shape = static_cast<int>(uniform_index(rng, 5));

  int num_resources = 0;
  std::unique_ptr<EPNode> net;
  switch (shape) {
    case 0:
      num_resources = 2;
      net = EPNode::make_parallel(EPNode::make_arc(0), EPNode::make_arc(1));
      break;
    case 1:
      num_resources = 3;
      net = EPNode::make_parallel(
          EPNode::make_arc(0),
          EPNode::make_parallel(EPNode::make_arc(1), EPNode::make_arc(2)));
      break;
    case 2:
      num_resources = 4;
      net = EPNode::make_parallel(
          EPNode::make_parallel(EPNode::make_arc(0), EPNode::make_arc(1)),
          EPNode::make_parallel(EPNode::make_arc(2), EPNode::make_arc(3)));
      break;
    case 3:
      num_resources = 4;
      net = EPNode::make_parallel(
          EPNode::make_extension(
              0, EPNode::make_parallel(EPNode::make_arc(1), EPNode::make_arc(2))),
          EPNode::make_arc(3));
      break;
    default:
      num_resources = 5;
      net = EPNode::make_parallel(
          EPNode::make_arc(0),
          EPNode::make_extension(
              1, EPNode::make_parallel(
                     EPNode::make_arc(2),
                     EPNode::make_parallel(EPNode::make_arc(3), EPNode::make_arc(4)))));
      break;
  }

  std::vector<CostFunction> resources;
  resources.reserve(static_cast<std::size_t>(num_resources));
  for (int e = 0; e < num_resources; ++e) {
    resources.push_back(random_cost(std::string(1, static_cast<char>('a' + e)), n, max_cost, rng));
  }
  return CongestionGame::ep(n, std::move(resources), std::move(net));
}

// Two parallel links with c(1) = 0 and c(2) = gap on both.
inline CongestionGame two_link_game(long gap, int players = 2) {
  std::vector<CostFunction> resources;
  for (const char* name : {"a", "b"}) {
    std::vector<Rational> values{Rational(BigInt(0)), Rational(BigInt(gap))};
    for (int i = 2; i < players; ++i) values.emplace_back(BigInt(gap));
    resources.emplace_back(name, std::move(values), players);
  }
  return CongestionGame::ep(players, std::move(resources),
                            EPNode::make_parallel(EPNode::make_arc(0), EPNode::make_arc(1)));
}

inline std::vector<StrategyProfile> sample_many_ep(const CongestionGame& g, double temperature,
                                                   double eps, std::int64_t n,
                                                   std::uint64_t seed) {
  std::vector<StrategyProfile> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] = sample_gibbs_ep(g, temperature, eps, 4.0, rng);
  }
  return out;
}

inline double empirical_tv(const ExactDistribution& exact,
                           const std::vector<StrategyProfile>& samples) {
  const std::vector<double> emp = empirical_distribution(exact.support, samples);
  return total_variation(emp, exact.probability);
}

// Pearson statistic against equal class probabilities.
inline double chi_squared_uniform(const std::vector<std::int64_t>& counts) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (std::int64_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace testutil
