#include "congibbs/game.hpp"

#include <algorithm>
#include <stdexcept>

#include "congibbs/numeric.hpp"

namespace congibbs {

CostFunction::CostFunction(std::string name, std::vector<Rational> values, int capacity)
    : name_(std::move(name)), values_(std::move(values)), capacity_(capacity) {
  if (values_.empty()) throw std::invalid_argument("cost function needs at least one value");
  if (capacity_ < 0 || capacity_ > static_cast<int>(values_.size()))
    throw std::invalid_argument("cost capacity out of range for resource '" + name_ + "'");
  const Rational zero(0);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < zero)
      throw std::invalid_argument("negative cost for resource '" + name_ + "'");
    if (i > 0 && values_[i] < values_[i - 1])
      throw std::invalid_argument("decreasing cost for resource '" + name_ + "'");
  }
  const int n = max_load();
  prefix_.resize(n + 1);
  prefix_[0] = Rational(0);
  for (int x = 1; x <= n; ++x) prefix_[x] = prefix_[x - 1] + values_[x - 1];
  at_dbl_.assign(n + 1, 0.0);
  cum_dbl_.assign(n + 1, 0.0);
  for (int x = 1; x <= n; ++x) {
    const bool over = x > capacity_;
    at_dbl_[x] = over ? kPosInf : to_double(values_[x - 1]);
    cum_dbl_[x] = over ? kPosInf : to_double(prefix_[x]);
  }
}

ExtRational CostFunction::at(int load) const {
  check_load(load, 1);
  if (load > capacity_) return ExtRational::infinity();
  return ExtRational(values_[load - 1]);
}

ExtRational CostFunction::cumulative(int load) const {
  check_load(load, 0);
  if (load > capacity_) return ExtRational::infinity();
  return ExtRational(prefix_[load]);
}

int CostFunction::check_load(int load, int lo) const {
  if (load < lo || load > max_load())
    throw std::out_of_range("load " + std::to_string(load) + " out of range for resource '" +
                            name_ + "'");
  return load;
}

std::unique_ptr<EPNode> EPNode::make_arc(int arc) {
  auto node = std::make_unique<EPNode>();
  node->kind = Kind::Arc;
  node->arc = arc;
  return node;
}

std::unique_ptr<EPNode> EPNode::make_parallel(std::unique_ptr<EPNode> l,
                                              std::unique_ptr<EPNode> r) {
  auto node = std::make_unique<EPNode>();
  node->kind = Kind::Parallel;
  node->left = std::move(l);
  node->right = std::move(r);
  return node;
}

std::unique_ptr<EPNode> EPNode::make_extension(int arc, std::unique_ptr<EPNode> sub) {
  auto node = std::make_unique<EPNode>();
  node->kind = Kind::Extension;
  node->arc = arc;
  node->left = std::move(sub);
  return node;
}

std::unique_ptr<EPNode> EPNode::clone() const {
  auto node = std::make_unique<EPNode>();
  node->kind = kind;
  node->arc = arc;
  if (left) node->left = left->clone();
  if (right) node->right = right->clone();
  return node;
}

namespace {

void collect_paths(const EPNode& node, std::vector<std::vector<int>>& out) {
  switch (node.kind) {
    case EPNode::Kind::Arc:
      out.push_back({node.arc});
      break;
    case EPNode::Kind::Parallel:
      collect_paths(*node.left, out);
      collect_paths(*node.right, out);
      break;
    case EPNode::Kind::Extension: {
      std::vector<std::vector<int>> sub;
      collect_paths(*node.left, sub);
      for (auto& p : sub) {
        p.push_back(node.arc);
        out.push_back(std::move(p));
      }
      break;
    }
  }
}

void collect_arcs(const EPNode& node, std::vector<int>& arcs) {
  switch (node.kind) {
    case EPNode::Kind::Arc:
      arcs.push_back(node.arc);
      break;
    case EPNode::Kind::Parallel:
      collect_arcs(*node.left, arcs);
      collect_arcs(*node.right, arcs);
      break;
    case EPNode::Kind::Extension:
      arcs.push_back(node.arc);
      collect_arcs(*node.left, arcs);
      break;
  }
}

void check_resource_table(const std::vector<CostFunction>& resources, int n) {
  if (resources.empty()) throw std::invalid_argument("game needs at least one resource");
  for (const auto& r : resources)
    if (r.max_load() != n)
      throw std::invalid_argument("resource '" + r.name() + "' needs exactly " +
                                  std::to_string(n) + " cost values");
}

constexpr std::int64_t kMenuGuard = 1'000'000;

}  // namespace

std::vector<std::vector<int>> enumerate_paths(const EPNode& root) {
  std::vector<std::vector<int>> out;
  collect_paths(root, out);
  for (auto& p : out) std::sort(p.begin(), p.end());
  return out;
}

int LoadProfile::total() const {
  int t = 0;
  for (int c : counts) t += c;
  return t;
}

CongestionGame CongestionGame::ep(int num_players, std::vector<CostFunction> resources,
                                  std::unique_ptr<EPNode> network) {
  if (num_players < 1) throw std::invalid_argument("game needs at least one player");
  check_resource_table(resources, num_players);
  if (!network) throw std::invalid_argument("ep game needs a network");
  const int m = static_cast<int>(resources.size());
  std::vector<int> arcs;
  collect_arcs(*network, arcs);
  std::vector<int> sorted = arcs;
  std::sort(sorted.begin(), sorted.end());
  for (int e = 0; e < m; ++e)
    if (e >= static_cast<int>(sorted.size()) || sorted[e] != e)
      throw std::invalid_argument("network must use every resource exactly once as an arc");
  if (static_cast<int>(sorted.size()) != m)
    throw std::invalid_argument("network must use every resource exactly once as an arc");

  CongestionGame g;
  g.kind_ = StructureKind::ExtensionParallel;
  g.num_players_ = num_players;
  g.resources_ = std::move(resources);
  g.network_ = std::move(network);
  g.paths_ = enumerate_paths(*g.network_);
  g.symmetric_ = true;
  return g;
}

CongestionGame CongestionGame::k_uniform(std::vector<CostFunction> resources,
                                         std::vector<int> demands) {
  const int n = static_cast<int>(demands.size());
  if (n < 1) throw std::invalid_argument("game needs at least one player");
  check_resource_table(resources, n);
  const int m = static_cast<int>(resources.size());
  long long total_demand = 0, total_capacity = 0;
  for (int k : demands) {
    if (k < 1 || k > m)
      throw std::invalid_argument("player demand must be between 1 and the resource count");
    total_demand += k;
    binom64(m, k);  // rejects menus too large to index
  }
  for (const auto& r : resources) total_capacity += std::min(r.capacity(), n);
  if (total_demand > total_capacity)
    throw std::invalid_argument("total demand exceeds total capacity");

  CongestionGame g;
  g.kind_ = StructureKind::KUniform;
  g.num_players_ = n;
  g.resources_ = std::move(resources);
  g.demands_ = std::move(demands);
  g.symmetric_ = std::all_of(g.demands_.begin(), g.demands_.end(),
                             [&](int k) { return k == g.demands_[0]; });
  return g;
}

CongestionGame CongestionGame::explicit_strategies(
    int num_players, std::vector<CostFunction> resources,
    std::vector<std::vector<std::vector<int>>> strategies) {
  if (num_players < 1) throw std::invalid_argument("game needs at least one player");
  check_resource_table(resources, num_players);
  if (static_cast<int>(strategies.size()) != num_players)
    throw std::invalid_argument("explicit strategies must cover every player");
  const int m = static_cast<int>(resources.size());
  for (auto& menu : strategies) {
    if (menu.empty()) throw std::invalid_argument("every player needs at least one strategy");
    for (auto& s : menu) {
      if (s.empty()) throw std::invalid_argument("strategies must use at least one resource");
      std::sort(s.begin(), s.end());
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= m) throw std::invalid_argument("strategy uses unknown resource");
        if (i > 0 && s[i] == s[i - 1])
          throw std::invalid_argument("strategy lists a resource twice");
      }
    }
  }

  CongestionGame g;
  g.kind_ = StructureKind::Explicit;
  g.num_players_ = num_players;
  g.resources_ = std::move(resources);
  g.strategies_ = std::move(strategies);
  g.symmetric_ = true;
  for (int i = 1; i < num_players && g.symmetric_; ++i)
    g.symmetric_ = g.strategies_[i] == g.strategies_[0];
  return g;
}

int CongestionGame::resource_index(const std::string& name) const {
  for (int e = 0; e < num_resources(); ++e)
    if (resources_[e].name() == name) return e;
  return -1;
}

const std::vector<std::vector<int>>& CongestionGame::paths() const {
  if (kind_ != StructureKind::ExtensionParallel)
    throw std::logic_error("paths() requires an extension-parallel game");
  return paths_;
}

const EPNode& CongestionGame::network() const {
  if (kind_ != StructureKind::ExtensionParallel)
    throw std::logic_error("network() requires an extension-parallel game");
  return *network_;
}

const std::vector<int>& CongestionGame::demands() const {
  if (kind_ != StructureKind::KUniform)
    throw std::logic_error("demands() requires a k-uniform game");
  return demands_;
}

std::int64_t CongestionGame::num_strategies(int player) const {
  if (player < 0 || player >= num_players_) throw std::out_of_range("bad player index");
  switch (kind_) {
    case StructureKind::ExtensionParallel:
      return static_cast<std::int64_t>(paths_.size());
    case StructureKind::KUniform:
      return binom64(num_resources(), demands_[player]);
    case StructureKind::Explicit:
      return static_cast<std::int64_t>(strategies_[player].size());
  }
  return 0;
}

std::vector<int> CongestionGame::strategy_resources(int player, std::int64_t s) const {
  if (s < 0 || s >= num_strategies(player)) throw std::out_of_range("bad strategy index");
  switch (kind_) {
    case StructureKind::ExtensionParallel:
      return paths_[s];
    case StructureKind::Explicit:
      return strategies_[player][s];
    case StructureKind::KUniform: {
      // lexicographic subset unranking
      const int m = num_resources();
      const int k = demands_[player];
      std::vector<int> out;
      out.reserve(k);
      std::int64_t idx = s;
      int v = 0;
      for (int picked = 0; picked < k; ++picked) {
        for (;; ++v) {
          const std::int64_t block = binom64(m - 1 - v, k - 1 - picked);
          if (idx < block) {
            out.push_back(v++);
            break;
          }
          idx -= block;
        }
      }
      return out;
    }
  }
  return {};
}

std::int64_t CongestionGame::strategy_index(int player,
                                            std::span<const int> sorted_resources) const {
  switch (kind_) {
    case StructureKind::ExtensionParallel:
    case StructureKind::Explicit: {
      const std::int64_t count = num_strategies(player);
      for (std::int64_t s = 0; s < count; ++s) {
        const auto& menu = kind_ == StructureKind::ExtensionParallel ? paths_[s]
                                                                     : strategies_[player][s];
        if (std::equal(menu.begin(), menu.end(), sorted_resources.begin(),
                       sorted_resources.end()))
          return s;
      }
      throw std::invalid_argument("strategy not in the player's menu");
    }
    case StructureKind::KUniform: {
      const int m = num_resources();
      const int k = demands_[player];
      if (static_cast<int>(sorted_resources.size()) != k)
        throw std::invalid_argument("strategy has the wrong number of resources");
      std::int64_t rank = 0;
      int prev = 0;
      for (int i = 0; i < k; ++i) {
        const int cur = sorted_resources[i];
        if (cur < prev || cur >= m) throw std::invalid_argument("bad strategy resource set");
        for (int v = prev; v < cur; ++v) rank += binom64(m - 1 - v, k - 1 - i);
        prev = cur + 1;
      }
      return rank;
    }
  }
  return -1;
}

std::int64_t binom64(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > static_cast<unsigned __int128>(INT64_MAX))
      throw std::overflow_error("binomial coefficient does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(r);
}

LoadProfile resource_loads(const CongestionGame& g, const StrategyProfile& s) {
  if (static_cast<int>(s.choice.size()) != g.num_players())
    throw std::invalid_argument("profile has the wrong number of players");
  LoadProfile out;
  out.kind = LoadProfile::Kind::Resource;
  out.counts.assign(g.num_resources(), 0);
  for (int i = 0; i < g.num_players(); ++i)
    g.visit_strategy(i, s.choice[i], [&](int e) { ++out.counts[e]; });
  return out;
}

LoadProfile strategy_loads(const CongestionGame& g, const StrategyProfile& s) {
  if (!g.symmetric())
    throw std::invalid_argument("strategy loads require a symmetric game");
  if (static_cast<int>(s.choice.size()) != g.num_players())
    throw std::invalid_argument("profile has the wrong number of players");
  const std::int64_t menu = g.num_strategies(0);
  if (menu > kMenuGuard) throw std::invalid_argument("strategy menu too large to tabulate");
  LoadProfile out;
  out.kind = LoadProfile::Kind::Strategy;
  out.counts.assign(static_cast<std::size_t>(menu), 0);
  for (const std::int64_t c : s.choice) ++out.counts[c];
  return out;
}

ExtRational potential_from_loads(const CongestionGame& g, std::span<const int> loads) {
  if (static_cast<int>(loads.size()) != g.num_resources())
    throw std::invalid_argument("load vector has the wrong length");
  ExtRational total;
  for (int e = 0; e < g.num_resources(); ++e) total += g.resource(e).cumulative(loads[e]);
  return total;
}

double potential_from_loads_dbl(const CongestionGame& g, std::span<const int> loads) {
  double total = 0.0;
  for (int e = 0; e < g.num_resources(); ++e) total += g.resource(e).cumulative_dbl(loads[e]);
  return total;
}

ExtRational rosenthal_potential(const CongestionGame& g, const StrategyProfile& s) {
  const LoadProfile loads = resource_loads(g, s);
  return potential_from_loads(g, loads.counts);
}

ExtRational player_cost(const CongestionGame& g, const StrategyProfile& s, int player) {
  if (player < 0 || player >= g.num_players()) throw std::out_of_range("bad player index");
  const LoadProfile loads = resource_loads(g, s);
  ExtRational total;
  g.visit_strategy(player, s.choice[player],
                   [&](int e) { total += g.resource(e).at(loads.counts[e]); });
  return total;
}

bool is_feasible(const CongestionGame& g, const StrategyProfile& s) {
  return !rosenthal_potential(g, s).is_infinite();
}

bool is_nash(const CongestionGame& g, const StrategyProfile& s) {
  const LoadProfile loads = resource_loads(g, s);
  for (int i = 0; i < g.num_players(); ++i) {
    const std::int64_t menu = g.num_strategies(i);
    if (menu > kMenuGuard) throw std::invalid_argument("strategy menu too large to enumerate");
    ExtRational current;
    g.visit_strategy(i, s.choice[i],
                     [&](int e) { current += g.resource(e).at(loads.counts[e]); });
    std::vector<int> without = loads.counts;
    g.visit_strategy(i, s.choice[i], [&](int e) { --without[e]; });
    for (std::int64_t t = 0; t < menu; ++t) {
      if (t == s.choice[i]) continue;
      ExtRational alt;
      g.visit_strategy(i, t, [&](int e) { alt += g.resource(e).at(without[e] + 1); });
      if (alt < current) return false;
    }
  }
  return true;
}

StrategyProfile min_potential_profile(const CongestionGame& g) {
  if (g.kind() != StructureKind::ExtensionParallel)
    throw std::invalid_argument("min potential profile requires an extension-parallel game");
  const auto& paths = g.paths();
  std::vector<int> loads(g.num_resources(), 0);
  StrategyProfile s;
  s.choice.resize(g.num_players());
  for (int i = 0; i < g.num_players(); ++i) {
    int best = -1;
    ExtRational best_cost;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      ExtRational marginal;
      for (int e : paths[p]) marginal += g.resource(e).at(loads[e] + 1);
      if (best < 0 || marginal < best_cost) {
        best = static_cast<int>(p);
        best_cost = marginal;
      }
    }
    if (best_cost.is_infinite())
      throw std::runtime_error("game has no feasible profile");
    s.choice[i] = best;
    for (int e : paths[best]) ++loads[e];
  }
  return s;
}

std::vector<int> ep_resource_loads(const CongestionGame& g, std::span<const int> alpha) {
  const auto& paths = g.paths();
  if (alpha.size() != paths.size())
    throw std::invalid_argument("strategy load vector has the wrong length");
  std::vector<int> loads(g.num_resources(), 0);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    if (alpha[p] == 0) continue;
    for (int e : paths[p]) loads[e] += alpha[p];
  }
  return loads;
}

ExtRational ep_potential(const CongestionGame& g, std::span<const int> alpha) {
  return potential_from_loads(g, ep_resource_loads(g, alpha));
}

double ep_potential_dbl(const CongestionGame& g, std::span<const int> alpha) {
  const auto loads = ep_resource_loads(g, alpha);
  return potential_from_loads_dbl(g, loads);
}

}  // namespace congibbs
