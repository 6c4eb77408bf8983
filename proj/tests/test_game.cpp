#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "congibbs/game.hpp"
#include "congibbs/gamefile.hpp"
#include "congibbs/numeric.hpp"
#include "congibbs/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace congibbs;

namespace {

Rational rat(long v) { return Rational(BigInt(v)); }

std::vector<CostFunction> linear_pair(int players) {
  std::vector<CostFunction> out;
  for (const char* name : {"a", "b"}) {
    std::vector<Rational> values;
    for (int i = 1; i <= players; ++i) values.push_back(rat(i));
    out.emplace_back(name, std::move(values), players);
  }
  return out;
}

ExtRational brute_force_min_potential(const CongestionGame& g) {
  std::vector<std::int64_t> menu(static_cast<std::size_t>(g.num_players()));
  for (int p = 0; p < g.num_players(); ++p) menu[static_cast<std::size_t>(p)] = g.num_strategies(p);
  StrategyProfile s;
  s.choice.assign(static_cast<std::size_t>(g.num_players()), 0);
  ExtRational best = ExtRational::infinity();
  for (;;) {
    const ExtRational phi = rosenthal_potential(g, s);
    if (phi < best) best = phi;
    int p = 0;
    while (p < g.num_players()) {
      if (++s.choice[static_cast<std::size_t>(p)] < menu[static_cast<std::size_t>(p)]) break;
      s.choice[static_cast<std::size_t>(p)] = 0;
      ++p;
    }
    if (p == g.num_players()) break;
  }
  return best;
}

}  // namespace

TEST_CASE("cost function evaluates loads and saturates at capacity") {
  const CostFunction c("a", {rat(1), rat(2), rat(4)}, 2);
  CHECK(c.max_load() == 3);
  CHECK(c.capacity() == 2);
  CHECK(c.at(1) == ExtRational(rat(1)));
  CHECK(c.at(2) == ExtRational(rat(2)));
  CHECK(c.at(3).is_infinite());
  CHECK(c.cumulative(0) == ExtRational(rat(0)));
  CHECK(c.cumulative(1) == ExtRational(rat(1)));
  CHECK(c.cumulative(2) == ExtRational(rat(3)));
  CHECK(c.cumulative(3).is_infinite());
  CHECK(c.at_dbl(2) == doctest::Approx(2.0));
  CHECK(c.cumulative_dbl(2) == doctest::Approx(3.0));
  CHECK(c.at_dbl(3) == kPosInf);
  CHECK_THROWS_AS(c.at(0), std::out_of_range);
  CHECK_THROWS_AS(c.at(4), std::out_of_range);
  CHECK_THROWS_AS(c.cumulative(-1), std::out_of_range);

  CHECK_THROWS_AS(CostFunction("x", {}, 0), std::invalid_argument);
  CHECK_THROWS_AS(CostFunction("x", {rat(-1)}, 1), std::invalid_argument);
  CHECK_THROWS_AS(CostFunction("x", {rat(3), rat(2)}, 2), std::invalid_argument);
  CHECK_THROWS_AS(CostFunction("x", {rat(1)}, 2), std::invalid_argument);
  CHECK_THROWS_AS(CostFunction("x", {rat(1)}, -1), std::invalid_argument);
}

TEST_CASE("path enumeration walks the tree left first with sorted arc sets") {
  const auto single = enumerate_paths(*EPNode::make_arc(0));
  CHECK(single == std::vector<std::vector<int>>{{0}});

  const auto pair = enumerate_paths(
      *EPNode::make_parallel(EPNode::make_arc(0), EPNode::make_arc(1)));
  CHECK(pair == std::vector<std::vector<int>>{{0}, {1}});

  // Two forks in parallel, each behind its own stem arc.
  const auto forked = EPNode::make_parallel(
      EPNode::make_extension(2, EPNode::make_parallel(EPNode::make_arc(0), EPNode::make_arc(1))),
      EPNode::make_extension(5, EPNode::make_parallel(EPNode::make_arc(3), EPNode::make_arc(4))));
  const auto paths = enumerate_paths(*forked);
  CHECK(paths == std::vector<std::vector<int>>{{0, 2}, {1, 2}, {3, 5}, {4, 5}});

  const CongestionGame fork = load_game(testutil::game_path("fork.game"));
  CHECK(fork.paths() == std::vector<std::vector<int>>{{0}, {1, 2}, {1, 3}});
}

TEST_CASE("resource loads tally strategy incidence") {
  const CongestionGame fork = load_game(testutil::game_path("fork.game"));
  const StrategyProfile s{{0, 1, 2}};
  const LoadProfile loads = resource_loads(fork, s);
  CHECK(loads.kind == LoadProfile::Kind::Resource);
  CHECK(loads.counts == std::vector<int>{1, 2, 1, 1});
  CHECK(loads.total() == 5);

  std::vector<int> tally(static_cast<std::size_t>(fork.num_resources()), 0);
  for (int p = 0; p < fork.num_players(); ++p) {
    fork.visit_strategy(p, s.choice[static_cast<std::size_t>(p)],
                        [&](int e) { ++tally[static_cast<std::size_t>(e)]; });
  }
  CHECK(loads.counts == tally);

  CHECK_THROWS_AS(resource_loads(fork, StrategyProfile{{0, 1}}), std::invalid_argument);
}

TEST_CASE("strategy loads need a symmetric game and sum to the player count") {
  const CongestionGame fork = load_game(testutil::game_path("fork.game"));
  const LoadProfile sl = strategy_loads(fork, StrategyProfile{{0, 1, 1}});
  CHECK(sl.kind == LoadProfile::Kind::Strategy);
  CHECK(sl.counts == std::vector<int>{1, 2, 0});
  CHECK(sl.total() == fork.num_players());

  const CongestionGame ku = load_game(testutil::game_path("kuniform.game"));
  CHECK_FALSE(ku.symmetric());
  CHECK_THROWS_AS(strategy_loads(ku, StrategyProfile{{0, 0, 0}}), std::invalid_argument);
}

TEST_CASE("rosenthal potential matches hand values and a direct tally") {
  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  CHECK(rosenthal_potential(tl, StrategyProfile{{0, 1}}) == ExtRational(rat(0)));
  CHECK(rosenthal_potential(tl, StrategyProfile{{0, 0}}) == ExtRational(rat(6)));
  CHECK(potential_from_loads(tl, std::vector<int>{1, 1}) == ExtRational(rat(0)));
  CHECK(potential_from_loads(tl, std::vector<int>{0, 0}) == ExtRational(rat(0)));

  // Over-capacity load is infinitely costly.
  const CongestionGame ku = load_game(testutil::game_path("kuniform.game"));
  CHECK(potential_from_loads(ku, std::vector<int>{0, 2, 0, 3}).is_infinite());
  CHECK_FALSE(potential_from_loads(ku, std::vector<int>{1, 1, 0, 3}).is_infinite());

  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const CongestionGame g = testutil::random_ep_game(rng);
    StrategyProfile s;
    s.choice.resize(static_cast<std::size_t>(g.num_players()));
    for (int p = 0; p < g.num_players(); ++p) {
      s.choice[static_cast<std::size_t>(p)] = static_cast<std::int64_t>(
          uniform_index(rng, static_cast<std::uint64_t>(g.num_strategies(p))));
    }
    const LoadProfile loads = resource_loads(g, s);
    ExtRational expect{rat(0)};
    for (int e = 0; e < g.num_resources(); ++e) {
      for (int k = 1; k <= loads.counts[static_cast<std::size_t>(e)]; ++k) {
        expect = expect + g.resource(e).at(k);
      }
    }
    CHECK(rosenthal_potential(g, s) == expect);
  }
}

TEST_CASE("player cost satisfies the exact potential identity") {
  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  CHECK(player_cost(tl, StrategyProfile{{0, 0}}, 0) == ExtRational(rat(6)));
  CHECK(player_cost(tl, StrategyProfile{{0, 0}}, 1) == ExtRational(rat(6)));
  CHECK(player_cost(tl, StrategyProfile{{0, 1}}, 0) == ExtRational(rat(0)));

  Rng rng(77);
  for (int trial = 0; trial < 15; ++trial) {
    const CongestionGame g = testutil::random_ep_game(rng);
    StrategyProfile s;
    s.choice.resize(static_cast<std::size_t>(g.num_players()));
    for (int p = 0; p < g.num_players(); ++p) {
      s.choice[static_cast<std::size_t>(p)] = static_cast<std::int64_t>(
          uniform_index(rng, static_cast<std::uint64_t>(g.num_strategies(p))));
    }
    for (int p = 0; p < g.num_players(); ++p) {
      for (std::int64_t t = 0; t < g.num_strategies(p); ++t) {
        StrategyProfile dev = s;
        dev.choice[static_cast<std::size_t>(p)] = t;
        const ExtRational lhs =
            rosenthal_potential(g, dev).value() - rosenthal_potential(g, s).value();
        const ExtRational rhs = player_cost(g, dev, p).value() - player_cost(g, s, p).value();
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("nash check flags improving deviations") {
  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  CHECK(is_nash(tl, StrategyProfile{{0, 1}}));
  CHECK(is_nash(tl, StrategyProfile{{1, 0}}));
  CHECK_FALSE(is_nash(tl, StrategyProfile{{0, 0}}));
  CHECK_FALSE(is_nash(tl, StrategyProfile{{1, 1}}));

  Rng rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const CongestionGame g = testutil::random_ep_game(rng);
    CHECK(is_nash(g, min_potential_profile(g)));
  }
}

TEST_CASE("greedy potential minimizer matches brute force") {
  Rng rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    const CongestionGame g = testutil::random_ep_game(rng);
    const StrategyProfile greedy = min_potential_profile(g);
    CHECK(is_feasible(g, greedy));
    CHECK(rosenthal_potential(g, greedy) == brute_force_min_potential(g));
  }
  const CongestionGame ku = load_game(testutil::game_path("kuniform.game"));
  CHECK_THROWS_AS(min_potential_profile(ku), std::invalid_argument);
}

TEST_CASE("k-uniform menus decode lexicographic resource subsets") {
  const CongestionGame ku = load_game(testutil::game_path("kuniform.game"));
  CHECK(ku.demands() == std::vector<int>{1, 2, 2});
  CHECK(ku.num_strategies(0) == 4);
  CHECK(ku.num_strategies(1) == 6);

  const std::vector<std::vector<int>> pairs{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (std::int64_t s = 0; s < 6; ++s) {
    const auto resources = ku.strategy_resources(1, s);
    CHECK(resources == pairs[static_cast<std::size_t>(s)]);
    CHECK(ku.strategy_index(1, resources) == s);
    std::vector<int> visited;
    ku.visit_strategy(1, s, [&](int e) { visited.push_back(e); });
    CHECK(visited == resources);
  }
  for (std::int64_t s = 0; s < 4; ++s) {
    CHECK(ku.strategy_resources(0, s) == std::vector<int>{static_cast<int>(s)});
  }
  CHECK_THROWS_AS(ku.strategy_resources(1, 6), std::out_of_range);
  CHECK_THROWS_AS(ku.strategy_index(1, std::vector<int>{0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(ku.strategy_index(1, std::vector<int>{0}), std::invalid_argument);
}

TEST_CASE("explicit games validate their menus") {
  const CongestionGame fe = load_game(testutil::game_path("figure_eight.game"));
  CHECK(fe.kind() == StructureKind::Explicit);
  CHECK(fe.symmetric());
  CHECK(fe.num_strategies(0) == 4);
  CHECK(fe.strategy_resources(0, 1) == std::vector<int>{0, 3});

  auto costs = [] { return linear_pair(2); };
  CHECK_FALSE(CongestionGame::explicit_strategies(2, costs(), {{{0}}, {{1}}}).symmetric());
  CHECK_THROWS_AS(CongestionGame::explicit_strategies(2, costs(), {{{0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CongestionGame::explicit_strategies(2, costs(), {{{0}}, {}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CongestionGame::explicit_strategies(2, costs(), {{{0}}, {{}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CongestionGame::explicit_strategies(2, costs(), {{{0}}, {{2}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CongestionGame::explicit_strategies(2, costs(), {{{0}}, {{1, 1}}}),
                  std::invalid_argument);
}

TEST_CASE("construction rejects degenerate inputs") {
  CHECK_THROWS_AS(CongestionGame::ep(0, linear_pair(2),
                                     EPNode::make_parallel(EPNode::make_arc(0), EPNode::make_arc(1))),
                  std::invalid_argument);
  CHECK_THROWS_AS(CongestionGame::ep(2, {}, EPNode::make_arc(0)), std::invalid_argument);
  CHECK_THROWS_AS(CongestionGame::ep(2, linear_pair(2), nullptr), std::invalid_argument);
  CHECK_THROWS_AS(CongestionGame::ep(2, linear_pair(2), EPNode::make_arc(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      CongestionGame::ep(2, linear_pair(2),
                         EPNode::make_parallel(EPNode::make_arc(0), EPNode::make_arc(0))),
      std::invalid_argument);
  // A three-value table on a two-player game is rejected.
  {
    std::vector<CostFunction> bad;
    bad.emplace_back("a", std::vector<Rational>{rat(1), rat(1), rat(1)}, 3);
    bad.emplace_back("b", std::vector<Rational>{rat(1), rat(1)}, 2);
    CHECK_THROWS_AS(CongestionGame::ep(2, std::move(bad),
                                       EPNode::make_parallel(EPNode::make_arc(0), EPNode::make_arc(1))),
                    std::invalid_argument);
  }
  CHECK_THROWS_AS(CongestionGame::k_uniform(linear_pair(2), {0, 1}), std::invalid_argument);
  {
    std::vector<CostFunction> tight;
    tight.emplace_back("a", std::vector<Rational>{rat(1), rat(1), rat(1)}, 2);
    tight.emplace_back("b", std::vector<Rational>{rat(1), rat(1), rat(1)}, 2);
    CHECK_THROWS_AS(CongestionGame::k_uniform(std::move(tight), {2, 1, 2}),
                    std::invalid_argument);
  }

  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  CHECK_THROWS_AS(tl.demands(), std::logic_error);
  const CongestionGame fe = load_game(testutil::game_path("figure_eight.game"));
  CHECK_THROWS_AS(fe.paths(), std::logic_error);
  CHECK_THROWS_AS(fe.network(), std::logic_error);
}

TEST_CASE("cumulative resource costs are convex in the load") {
  Rng rng(9090);
  for (int trial = 0; trial < 30; ++trial) {
    const CostFunction c = testutil::random_cost("r", 5, 8, rng);
    for (int k = 1; k + 1 <= c.max_load(); ++k) {
      const Rational second = c.cumulative(k + 1).value() - c.cumulative(k).value() -
                              (c.cumulative(k).value() - c.cumulative(k - 1).value());
      CHECK(second >= Rational(BigInt(0)));
    }
  }
}

TEST_CASE("profiles per strategy load profile follow the multinomial count") {
  const CongestionGame fork = load_game(testutil::game_path("fork.game"));
  std::map<std::vector<int>, std::int64_t> tally;
  StrategyProfile s;
  s.choice.assign(3, 0);
  for (std::int64_t a = 0; a < 3; ++a)
    for (std::int64_t b = 0; b < 3; ++b)
      for (std::int64_t c = 0; c < 3; ++c) {
        s.choice = {a, b, c};
        tally[strategy_loads(fork, s).counts] += 1;
      }
  CHECK(tally.size() == 10);
  for (const auto& [alpha, count] : tally) {
    BigInt expect = 1;
    for (int i = 2; i <= 3; ++i) expect *= i;
    for (int a : alpha)
      for (int i = 2; i <= a; ++i) expect /= i;
    CHECK(BigInt(count) == expect);
  }
}

TEST_CASE("game files parse and validate") {
  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  CHECK(tl.num_players() == 2);
  CHECK(tl.kind() == StructureKind::ExtensionParallel);
  CHECK(tl.resource_index("a") == 0);
  CHECK(tl.resource_index("b") == 1);
  CHECK(tl.resource_index("zz") == -1);

  const CongestionGame fork = load_game(testutil::game_path("fork.game"));
  CHECK(fork.num_players() == 3);
  CHECK(fork.symmetric());

  const CongestionGame ku = load_game(testutil::game_path("kuniform.game"));
  CHECK(ku.kind() == StructureKind::KUniform);
  CHECK(ku.num_resources() == 4);
  CHECK(ku.resource(1).capacity() == 1);

  const CongestionGame fe = load_game(testutil::game_path("figure_eight.game"));
  CHECK(fe.num_players() == 2);

  try {
    parse_game("players 2\nresource a 0 6\nnonsense\n");
    CHECK(false);
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS(load_game(testutil::game_path("missing.game")));
}
