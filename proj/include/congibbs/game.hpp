#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "congibbs/rational.hpp"

namespace congibbs {

// Cost of one resource as a function of its integer load. Loads above the
// capacity cost +infinity; loads within capacity must be non-negative and
// non-decreasing in the load.
class CostFunction {
 public:
  CostFunction(std::string name, std::vector<Rational> values, int capacity);

  const std::string& name() const { return name_; }
  int max_load() const { return static_cast<int>(values_.size()); }
  int capacity() const { return capacity_; }

  ExtRational at(int load) const;          // c(load), load in 1..max_load
  ExtRational cumulative(int load) const;  // sum of c(1..load), load in 0..max_load
  double at_dbl(int load) const { return at_dbl_[check_load(load, 1)]; }
  double cumulative_dbl(int load) const { return cum_dbl_[check_load(load, 0)]; }

 private:
  int check_load(int load, int lo) const;

  std::string name_;
  std::vector<Rational> values_;
  std::vector<Rational> prefix_;       // prefix_[x] = sum of values_[0..x-1]
  std::vector<double> at_dbl_;         // +inf above capacity
  std::vector<double> cum_dbl_;
  int capacity_;
};

// Extension-parallel network: a single arc, two networks in parallel, or a
// single arc in series with a network.
struct EPNode {
  enum class Kind { Arc, Parallel, Extension };

  Kind kind = Kind::Arc;
  int arc = -1;                         // Arc and Extension
  std::unique_ptr<EPNode> left, right;  // Parallel: both; Extension: left only

  static std::unique_ptr<EPNode> make_arc(int arc);
  static std::unique_ptr<EPNode> make_parallel(std::unique_ptr<EPNode> l,
                                               std::unique_ptr<EPNode> r);
  static std::unique_ptr<EPNode> make_extension(int arc, std::unique_ptr<EPNode> sub);
  std::unique_ptr<EPNode> clone() const;
};

// Arc sets of all o-d paths, depth-first with the left branch first, so the
// order is a stable function of the tree shape. Each path is sorted.
std::vector<std::vector<int>> enumerate_paths(const EPNode& root);

enum class StructureKind { ExtensionParallel, KUniform, Explicit };

// Exact binomial coefficient as int64; throws if it does not fit.
std::int64_t binom64(int n, int k);

// Per-player strategy choice, stored as an index into that player's strategy
// menu (path index for EP, lexicographic subset rank for k-uniform).
struct StrategyProfile {
  std::vector<std::int64_t> choice;
  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

struct LoadProfile {
  enum class Kind { Resource, Strategy };
  Kind kind = Kind::Resource;
  std::vector<int> counts;
  int total() const;
};

class CongestionGame {
 public:
  static CongestionGame ep(int num_players, std::vector<CostFunction> resources,
                           std::unique_ptr<EPNode> network);
  static CongestionGame k_uniform(std::vector<CostFunction> resources,
                                  std::vector<int> demands);
  static CongestionGame explicit_strategies(
      int num_players, std::vector<CostFunction> resources,
      std::vector<std::vector<std::vector<int>>> strategies);

  CongestionGame(CongestionGame&&) = default;
  CongestionGame& operator=(CongestionGame&&) = default;

  int num_players() const { return num_players_; }
  int num_resources() const { return static_cast<int>(resources_.size()); }
  StructureKind kind() const { return kind_; }
  const CostFunction& resource(int e) const { return resources_.at(e); }
  const std::vector<CostFunction>& resources() const { return resources_; }
  int resource_index(const std::string& name) const;  // -1 if unknown

  bool symmetric() const { return symmetric_; }
  const std::vector<std::vector<int>>& paths() const;  // EP only
  const EPNode& network() const;                       // EP only
  const std::vector<int>& demands() const;             // k-uniform only

  std::int64_t num_strategies(int player) const;
  std::vector<int> strategy_resources(int player, std::int64_t s) const;
  std::int64_t strategy_index(int player, std::span<const int> sorted_resources) const;

  // Visits the resources of one strategy without building a vector; the
  // k-uniform menu is decoded in place.
  template <typename Fn>
  void visit_strategy(int player, std::int64_t s, Fn&& fn) const {
    switch (kind_) {
      case StructureKind::ExtensionParallel:
        for (int e : paths_[static_cast<std::size_t>(s)]) fn(e);
        return;
      case StructureKind::Explicit:
        for (int e : strategies_[player][static_cast<std::size_t>(s)]) fn(e);
        return;
      case StructureKind::KUniform: {
        const int m = num_resources();
        const int k = demands_[player];
        std::int64_t idx = s;
        int v = 0;
        for (int picked = 0; picked < k; ++picked) {
          for (;; ++v) {
            const std::int64_t block = binom64(m - 1 - v, k - 1 - picked);
            if (idx < block) {
              fn(v++);
              break;
            }
            idx -= block;
          }
        }
        return;
      }
    }
  }

 private:
  CongestionGame() = default;

  StructureKind kind_ = StructureKind::Explicit;
  int num_players_ = 0;
  std::vector<CostFunction> resources_;
  bool symmetric_ = false;
  std::unique_ptr<EPNode> network_;
  std::vector<std::vector<int>> paths_;  // EP
  std::vector<int> demands_;             // k-uniform
  std::vector<std::vector<std::vector<int>>> strategies_;  // explicit
};

LoadProfile resource_loads(const CongestionGame& g, const StrategyProfile& s);
// Counts per strategy of the common menu; rejects non-symmetric games.
LoadProfile strategy_loads(const CongestionGame& g, const StrategyProfile& s);

ExtRational potential_from_loads(const CongestionGame& g, std::span<const int> loads);
double potential_from_loads_dbl(const CongestionGame& g, std::span<const int> loads);
ExtRational rosenthal_potential(const CongestionGame& g, const StrategyProfile& s);
ExtRational player_cost(const CongestionGame& g, const StrategyProfile& s, int player);
bool is_feasible(const CongestionGame& g, const StrategyProfile& s);

// Exhaustive best-response check; menus are enumerated, so per-player
// strategy counts are guarded.
bool is_nash(const CongestionGame& g, const StrategyProfile& s);

// EP only: players are inserted one at a time on a marginally cheapest path
// (ties to the smallest path index). For extension-parallel networks this
// greedy profile is an equilibrium and attains the potential minimum; tests
// certify it against brute force.
StrategyProfile min_potential_profile(const CongestionGame& g);

// EP helpers on strategy load profiles (counts per path).
std::vector<int> ep_resource_loads(const CongestionGame& g, std::span<const int> alpha);
ExtRational ep_potential(const CongestionGame& g, std::span<const int> alpha);
double ep_potential_dbl(const CongestionGame& g, std::span<const int> alpha);

}  // namespace congibbs
