#include <cmath>
#include <map>
#include <stdexcept>

#include "congibbs/gamefile.hpp"
#include "congibbs/gibbs_ep.hpp"
#include "congibbs/matroid.hpp"
#include "congibbs/numeric.hpp"
#include "congibbs/verify.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace congibbs;

namespace {

std::vector<int> iv(std::initializer_list<int> xs) { return std::vector<int>(xs); }

// Stage one distribution over path-load profiles by direct enumeration.
std::map<std::vector<int>, double> load_distribution(const CongestionGame& g, double temperature,
                                                     double scale = 1.0) {
  const EpGibbsWeights w(g, temperature, scale);
  const int q = static_cast<int>(g.paths().size());
  const PolymatroidBaseSet box{std::vector<int>(static_cast<std::size_t>(q), g.num_players()),
                               g.num_players()};
  std::map<std::vector<int>, double> out;
  double total = 0.0;
  for (const auto& alpha : box.enumerate()) {
    const double lw = w(alpha);
    if (lw == kNegInf) continue;
    const double mass = std::exp(lw);
    out[alpha] = mass;
    total += mass;
  }
  for (auto& [alpha, mass] : out) mass /= total;
  return out;
}

}  // namespace

TEST_CASE("path load weights combine a multinomial count and the potential") {
  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  const EpGibbsWeights w(tl, 1.0);
  CHECK(w(iv({1, 1})) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(w(iv({2, 0})) == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(w(iv({0, 2})) == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK_THROWS_AS(w(iv({1, 1, 0})), std::invalid_argument);

  const EpGibbsWeights base2(tl, 1.0, std::log(2.0));
  CHECK(base2(iv({2, 0})) == doctest::Approx(-6.0 * std::log(2.0)).epsilon(1e-12));

  // A unit capacity turns the crowded profile off entirely.
  const CongestionGame capped = parse_game(
      "players = 2\n"
      "resource a costs = [0, 6] capacity = 1\n"
      "resource b costs = [0, 6]\n"
      "structure = ep { par(arc(a), arc(b)) }\n");
  const EpGibbsWeights wc(capped, 1.0);
  CHECK(wc(iv({2, 0})) == kNegInf);
  CHECK(wc(iv({1, 1})) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const CongestionGame ku = load_game(testutil::game_path("kuniform.game"));
  CHECK_THROWS_AS(EpGibbsWeights(ku, 1.0), std::invalid_argument);
}

TEST_CASE("the load marginal concentrates on the balanced profile") {
  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  const auto dist = load_distribution(tl, 1.0);
  REQUIRE(dist.size() == 3);
  const double crowded = std::exp(-6.0) / (2.0 + 2.0 * std::exp(-6.0));
  CHECK(dist.at(iv({1, 1})) > 0.995);
  CHECK(dist.at(iv({1, 1})) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-6.0))).epsilon(1e-12));
  CHECK(dist.at(iv({2, 0})) == doctest::Approx(crowded).epsilon(1e-12));
  CHECK(dist.at(iv({0, 2})) == doctest::Approx(crowded).epsilon(1e-12));
}

TEST_CASE("a single player game reduces to a softmax over path costs") {
  const CongestionGame solo = parse_game(
      "players = 1\n"
      "resource a costs = [2]\n"
      "resource b costs = [1]\n"
      "resource c costs = [3]\n"
      "structure = ep { par(arc(a), par(arc(b), arc(c))) }\n");
  const double temperature = 0.8;
  const ExactDistribution exact = exact_gibbs(solo, temperature);
  REQUIRE(exact.support.size() == 3);

  std::vector<double> costs;
  for (const auto& s : exact.support) {
    costs.push_back(to_double(player_cost(solo, s, 0).value()));
  }
  double total = 0.0;
  std::vector<double> softmax;
  for (double c : costs) {
    softmax.push_back(std::exp(-temperature * c));
    total += softmax.back();
  }
  for (double& p : softmax) p /= total;
  for (std::size_t i = 0; i < softmax.size(); ++i) {
    CHECK(exact.probability[i] == doctest::Approx(softmax[i]).epsilon(1e-12));
  }

  const auto samples = testutil::sample_many_ep(solo, temperature, 0.01, 10000, 314);
  CHECK(testutil::empirical_tv(exact, samples) < 0.03);
}

TEST_CASE("sampled load profiles match the stage distribution") {
  const CongestionGame fork = load_game(testutil::game_path("fork.game"));
  const auto dist = load_distribution(fork, 1.0);
  std::map<std::vector<int>, std::int64_t> tally;
  const std::int64_t n = 20000;
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(child_seed(271828, static_cast<std::uint64_t>(i)));
    tally[sample_load_profile_ep(fork, 1.0, 0.01, 4.0, rng)] += 1;
  }
  double tv = 0.0;
  for (const auto& [alpha, p] : dist) {
    const auto it = tally.find(alpha);
    const double emp =
        it == tally.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
    tv += std::abs(emp - p);
  }
  tv /= 2.0;
  CHECK(tv < 0.04);
}

TEST_CASE("player assignment is uniform over the realizing profiles") {
  const CongestionGame fork = load_game(testutil::game_path("fork.game"));

  // All players forced onto one path.
  {
    Rng rng(5);
    const StrategyProfile s = assign_players_uniform(fork, iv({0, 3, 0}), rng);
    CHECK(s.choice == std::vector<std::int64_t>{1, 1, 1});
  }

  // Two players split over two paths: each ordering has probability 1/2.
  {
    const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
    std::int64_t first = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      Rng rng(child_seed(17, static_cast<std::uint64_t>(i)));
      const StrategyProfile s = assign_players_uniform(tl, iv({1, 1}), rng);
      if (s.choice[0] == 0) ++first;
      CHECK(s.choice[0] + s.choice[1] == 1);
    }
    CHECK(std::abs(static_cast<double>(first) / n - 0.5) < 0.02);
  }

  // Six orderings of three distinct paths, each 1/6.
  {
    std::map<std::vector<std::int64_t>, std::int64_t> tally;
    const int n = 12000;
    for (int i = 0; i < n; ++i) {
      Rng rng(child_seed(23, static_cast<std::uint64_t>(i)));
      tally[assign_players_uniform(fork, iv({1, 1, 1}), rng).choice] += 1;
    }
    REQUIRE(tally.size() == 6);
    std::vector<std::int64_t> counts;
    for (const auto& [profile, c] : tally) counts.push_back(c);
    CHECK(testutil::chi_squared_uniform(counts) < 25.0);
  }

  {
    Rng rng(2);
    CHECK_THROWS_AS(assign_players_uniform(fork, iv({1, 1, 0}), rng), std::invalid_argument);
  }
}

TEST_CASE("end to end samples follow the gibbs measure") {
  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  std::int64_t split = 0;
  const std::int64_t n = 10000;
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(child_seed(1001, static_cast<std::uint64_t>(i)));
    const StrategyProfile s = sample_gibbs_ep(tl, 1.0, 0.01, 4.0, rng);
    if (s.choice[0] != s.choice[1]) ++split;
  }
  CHECK(static_cast<double>(split) / static_cast<double>(n) >= 0.98);

  const CongestionGame fork = load_game(testutil::game_path("fork.game"));
  const ExactDistribution exact = exact_gibbs(fork, 1.0);
  const auto samples = testutil::sample_many_ep(fork, 1.0, 0.01, 30000, 5656);
  CHECK(testutil::empirical_tv(exact, samples) < 0.04);
}

TEST_CASE("composing the two stages reproduces full enumeration exactly") {
  struct Setup {
    const char* file;
    double temperature;
    double scale;
  };
  const Setup setups[] = {
      {"two_link.game", 1.0, 1.0},
      {"two_link.game", 0.25, 1.0},
      {"two_link.game", 3.0, std::log(2.0)},
      {"fork.game", 1.0, 1.0},
  };
  for (const auto& setup : setups) {
    CAPTURE(setup.file);
    const CongestionGame g = load_game(testutil::game_path(setup.file));
    const ExactDistribution exact = exact_gibbs(g, setup.temperature, setup.scale);
    const auto composed =
        exact_stage_distribution_ep(g, setup.temperature, setup.scale, exact.support);
    CHECK(total_variation(exact.probability, composed) < 1e-12);
  }

  Rng rng(60601);
  for (int trial = 0; trial < 4; ++trial) {
    const CongestionGame g = testutil::random_ep_game(rng);
    const double temperature = trial % 2 == 0 ? 0.5 : 1.0;
    const ExactDistribution exact = exact_gibbs(g, temperature);
    const auto composed = exact_stage_distribution_ep(g, temperature, 1.0, exact.support);
    CHECK(total_variation(exact.probability, composed) < 1e-12);
  }
}

TEST_CASE("the equilibrium temperature clears the non-equilibrium mass") {
  const CongestionGame tl = load_game(testutil::game_path("two_link.game"));
  CHECK(pne_temperature(tl, 0.05) == 8);
  const CongestionGame fork = load_game(testutil::game_path("fork.game"));
  CHECK(pne_temperature(fork, 0.05) == 11);
  CHECK(pne_temperature(fork, 0.01) >= pne_temperature(fork, 0.05));

  // At the computed temperature the base-2 Gibbs measure leaves at most
  // eps/2 of the equilibrium mass outside the minimizers.
  const double eps = 0.05;
  const int temperature = pne_temperature(fork, eps);
  const ExactDistribution exact =
      exact_gibbs(fork, static_cast<double>(temperature), std::log(2.0));
  const ExtRational min_potential =
      rosenthal_potential(fork, min_potential_profile(fork));
  double on = 0.0, off = 0.0;
  for (std::size_t i = 0; i < exact.support.size(); ++i) {
    if (rosenthal_potential(fork, exact.support[i]) == min_potential) {
      on += exact.probability[i];
    } else {
      off += exact.probability[i];
    }
  }
  CHECK(off <= 0.5 * eps * on);
}

TEST_CASE("equilibrium samples are uniform over the equilibria") {
  // Both equilibria of the two-link game with a unit gap appear equally.
  const CongestionGame tl = testutil::two_link_game(1);
  std::int64_t first = 0;
  const std::int64_t n = 20000;
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(child_seed(909, static_cast<std::uint64_t>(i)));
    PneStats stats;
    const StrategyProfile s = sample_uniform_pne(tl, 0.05, 4.0, rng, &stats);
    REQUIRE(is_nash(tl, s));
    CHECK(stats.attempts >= 1);
    if (s.choice == std::vector<std::int64_t>{0, 1}) ++first;
    REQUIRE(s.choice[0] + s.choice[1] == 1);
  }
  CHECK(std::abs(static_cast<double>(first) / static_cast<double>(n) - 0.5) < 0.02);

  // A dominant path is the unique equilibrium and is returned every time.
  const CongestionGame dominant = parse_game(
      "players = 2\n"
      "resource a costs = [0, 0]\n"
      "resource b costs = [5, 9]\n"
      "structure = ep { par(arc(a), arc(b)) }\n");
  for (std::int64_t i = 0; i < 50; ++i) {
    Rng rng(child_seed(911, static_cast<std::uint64_t>(i)));
    const StrategyProfile s = sample_uniform_pne(dominant, 0.05, 4.0, rng);
    CHECK(s.choice == std::vector<std::int64_t>{0, 0});
  }

  const CongestionGame ku = load_game(testutil::game_path("kuniform.game"));
  Rng rng(7);
  CHECK_THROWS_AS(sample_uniform_pne(ku, 0.05, 4.0, rng), std::invalid_argument);
}

TEST_CASE("equilibrium sampling matches the uniform law on a richer game") {
  // Three identical links with increasing costs: the six profiles placing
  // one player per link are exactly the potential minimizers.
  const CongestionGame g = parse_game(
      "players = 3\n"
      "resource a costs = [1, 2, 4]\n"
      "resource b costs = [1, 2, 4]\n"
      "resource c costs = [1, 2, 4]\n"
      "structure = ep { par(arc(a), par(arc(b), arc(c))) }\n");
  const auto support = enumerate_profiles(g);
  std::vector<StrategyProfile> equilibria;
  const ExtRational best = rosenthal_potential(g, min_potential_profile(g));
  for (const auto& s : support) {
    if (rosenthal_potential(g, s) == best) equilibria.push_back(s);
  }
  REQUIRE(equilibria.size() == 6);

  const ProfileIndex index(equilibria);
  std::vector<std::int64_t> counts(equilibria.size(), 0);
  const std::int64_t n = 12000;
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(child_seed(8088, static_cast<std::uint64_t>(i)));
    const StrategyProfile s = sample_uniform_pne(g, 0.05, 4.0, rng);
    const auto pos = index.find(s);
    REQUIRE(pos.has_value());
    counts[*pos] += 1;
  }
  CHECK(testutil::chi_squared_uniform(counts) < 25.0);
}
