#include "congibbs/cap_uniform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "congibbs/matroid.hpp"
#include "congibbs/numeric.hpp"

namespace congibbs {

namespace {

// Counts (and samples) bipartite graphs with fixed degrees, column by
// column. The state after a column is the multiset of residual row demands,
// tracked as one count per demand value and packed into a 64-bit memo key.
class BipartiteDp {
 public:
  BipartiteDp(std::vector<int> rows, std::vector<int> cols)
      : rows_(std::move(rows)), cols_(std::move(cols)), m_(static_cast<int>(cols_.size())) {
    for (int k : rows_) {
      if (k < 0) throw std::invalid_argument("row degrees must be non-negative");
      kmax_ = std::max(kmax_, k);
    }
    for (int a : cols_) {
      if (a < 0) throw std::invalid_argument("column degrees must be non-negative");
    }
    bits_ = std::bit_width(rows_.size() | 1);
    if (kmax_ * bits_ > 48 || m_ >= (1 << 15)) {
      throw std::invalid_argument("degree sequence state does not fit the counter");
    }
    suffix_.assign(static_cast<std::size_t>(m_) + 1, 0);
    for (int j = m_ - 1; j >= 0; --j) {
      suffix_[static_cast<std::size_t>(j)] =
          suffix_[static_cast<std::size_t>(j) + 1] + cols_[static_cast<std::size_t>(j)];
    }
    classes_.assign(static_cast<std::size_t>(kmax_) + 1, 0);
    for (int k : rows_) {
      classes_[static_cast<std::size_t>(k)] += 1;
    }
  }

  const BigInt& total() {
    if (!total_ready_) {
      total_ = count(0);
      total_ready_ = true;
    }
    return total_;
  }

  std::vector<std::vector<int>> sample(Rng& rng) {
    if (total() == 0) throw std::invalid_argument("degree sequence is not realizable");

    std::vector<std::vector<int>> pool(static_cast<std::size_t>(kmax_) + 1);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (rows_[i] > 0) pool[static_cast<std::size_t>(rows_[i])].push_back(static_cast<int>(i));
    }
    std::vector<std::vector<int>> edges(rows_.size());

    for (int j = 0; j < m_; ++j) {
      std::vector<std::vector<int>> comps;
      std::vector<BigInt> weights;
      BigInt total_here = 0;

      each_column_option(j, [&](const std::vector<int>& comp, const BigInt& ways) {
        const BigInt w = ways * count(j + 1);
        if (w > 0) {
          comps.push_back(comp);
          weights.push_back(w);
          total_here += w;
        }
      });

      BigInt r = uniform_bigint(rng, total_here);
      std::size_t pick = 0;
      while (r >= weights[pick]) {
        r -= weights[pick];
        ++pick;
      }
      const std::vector<int>& chosen = comps[pick];

      // Select the rows class by class; move them down only after the whole
      // column is placed so a row never receives two edges to one column.
      std::vector<std::pair<int, int>> moved;
      for (int d = kmax_; d >= 1; --d) {
        for (int c = 0; c < chosen[static_cast<std::size_t>(d)]; ++c) {
          auto& list = pool[static_cast<std::size_t>(d)];
          const auto idx =
              static_cast<std::size_t>(uniform_index(rng, static_cast<std::uint64_t>(list.size())));
          const int row = list[idx];
          list[idx] = list.back();
          list.pop_back();
          edges[static_cast<std::size_t>(row)].push_back(j);
          moved.emplace_back(row, d);
        }
        classes_[static_cast<std::size_t>(d)] -= chosen[static_cast<std::size_t>(d)];
        classes_[static_cast<std::size_t>(d) - 1] += chosen[static_cast<std::size_t>(d)];
      }
      for (const auto& [row, d] : moved) {
        if (d - 1 >= 1) pool[static_cast<std::size_t>(d) - 1].push_back(row);
      }
    }
    return edges;
  }

 private:
  std::vector<int> rows_;
  std::vector<int> cols_;
  int m_ = 0;
  int kmax_ = 0;
  int bits_ = 0;
  std::vector<long long> suffix_;
  std::vector<int> classes_;
  std::unordered_map<std::uint64_t, BigInt> memo_;
  BigInt total_;
  bool total_ready_ = false;

  std::uint64_t key(int j) const {
    std::uint64_t k = static_cast<std::uint64_t>(j);
    for (int d = 1; d <= kmax_; ++d) {
      k = (k << bits_) | static_cast<std::uint64_t>(classes_[static_cast<std::size_t>(d)]);
    }
    return k;
  }

  BigInt count(int j) {
    long long residual = 0;
    int highest = 0;
    for (int d = 1; d <= kmax_; ++d) {
      const int c = classes_[static_cast<std::size_t>(d)];
      residual += static_cast<long long>(d) * c;
      if (c > 0) highest = d;
    }
    if (residual != suffix_[static_cast<std::size_t>(j)]) return 0;
    if (j == m_) return residual == 0 ? 1 : 0;
    if (highest > m_ - j) return 0;

    int avail = 0;
    for (int d = 1; d <= kmax_; ++d) avail += classes_[static_cast<std::size_t>(d)];
    if (cols_[static_cast<std::size_t>(j)] > avail) return 0;

    const std::uint64_t k = key(j);
    if (const auto it = memo_.find(k); it != memo_.end()) return it->second;

    BigInt total = 0;
    each_column_option(
        j, [&](const std::vector<int>&, const BigInt& ways) { total += ways * count(j + 1); });

    memo_.emplace(k, total);
    return total;
  }

  // Enumerates the ways column j can draw its edges: comp[d] rows taken from
  // class d, weighted by the product of binomials over the untouched class
  // sizes. The class counts are advanced to the post-column state only while
  // fn runs, so a row can never supply two edges to the same column. comp is
  // local because fn may recurse back into this enumeration.
  template <typename Fn>
  void each_column_option(int j, Fn&& fn) {
    std::vector<int> comp(static_cast<std::size_t>(kmax_) + 1, 0);
    auto gen = [&](auto&& self, int d, int need, const BigInt& ways) -> void {
      if (d == 0) {
        if (need != 0) return;
        for (int dd = 1; dd <= kmax_; ++dd) {
          classes_[static_cast<std::size_t>(dd)] -= comp[static_cast<std::size_t>(dd)];
          classes_[static_cast<std::size_t>(dd) - 1] += comp[static_cast<std::size_t>(dd)];
        }
        fn(static_cast<const std::vector<int>&>(comp), ways);
        for (int dd = 1; dd <= kmax_; ++dd) {
          classes_[static_cast<std::size_t>(dd)] += comp[static_cast<std::size_t>(dd)];
          classes_[static_cast<std::size_t>(dd) - 1] -= comp[static_cast<std::size_t>(dd)];
        }
        return;
      }
      const int avail = classes_[static_cast<std::size_t>(d)];
      const int cmax = std::min(need, avail);
      for (int c = 0; c <= cmax; ++c) {
        comp[static_cast<std::size_t>(d)] = c;
        self(self, d - 1, need - c, ways * binom_big(avail, c));
      }
      comp[static_cast<std::size_t>(d)] = 0;
    };
    gen(gen, kmax_, cols_[static_cast<std::size_t>(j)], BigInt(1));
  }
};

constexpr std::size_t kMaxExactRows = 12;
constexpr std::size_t kMaxExactCells = 120;

void check_exact_guard(std::size_t rows, std::size_t cols) {
  if (rows > kMaxExactRows || rows * cols > kMaxExactCells) {
    throw std::invalid_argument("degree sequence too large for exact counting");
  }
}

bool degree_sums_match(const std::vector<int>& row_degrees,
                       const std::vector<int>& column_degrees) {
  long long rows = 0;
  long long cols = 0;
  for (int k : row_degrees) {
    if (k < 0) throw std::invalid_argument("row degrees must be non-negative");
    rows += k;
  }
  for (int a : column_degrees) {
    if (a < 0) throw std::invalid_argument("column degrees must be non-negative");
    cols += a;
  }
  return rows == cols;
}

void check_degree_sums(const DegreeSequence& seq) {
  if (!degree_sums_match(seq.row_degrees, seq.column_degrees)) {
    throw std::invalid_argument("row and column degree sums differ");
  }
}

// Per-load-profile log weights, keyed by the profile packed into 64 bits
// when the capacity box allows it.
class LoadTable {
 public:
  explicit LoadTable(const std::vector<int>& limits) {
    int total_bits = 0;
    shifts_.reserve(limits.size());
    for (int lim : limits) {
      const int b = std::bit_width(static_cast<unsigned>(lim) | 1u);
      shifts_.push_back(total_bits);
      total_bits += b;
      bits_.push_back(b);
    }
    packed_ = total_bits <= 64;
  }

  void set(std::span<const int> alpha, double w) {
    if (packed_) {
      map_[pack(alpha)] = w;
    } else {
      slow_[std::vector<int>(alpha.begin(), alpha.end())] = w;
    }
  }

  double get(std::span<const int> alpha) const {
    if (packed_) {
      const auto it = map_.find(pack(alpha));
      return it == map_.end() ? kNegInf : it->second;
    }
    const auto it = slow_.find(std::vector<int>(alpha.begin(), alpha.end()));
    return it == slow_.end() ? kNegInf : it->second;
  }

 private:
  std::vector<int> shifts_;
  std::vector<int> bits_;
  bool packed_ = false;
  std::unordered_map<std::uint64_t, double> map_;
  std::map<std::vector<int>, double> slow_;

  std::uint64_t pack(std::span<const int> alpha) const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      k |= static_cast<std::uint64_t>(alpha[i]) << shifts_[i];
    }
    return k;
  }
};

struct CapSetup {
  std::vector<int> demands;
  int total = 0;
  std::vector<int> limits;  // per resource, min(capacity, players)
};

CapSetup cap_setup(const CongestionGame& g) {
  if (g.kind() != StructureKind::KUniform) {
    throw std::invalid_argument("load sampler needs a k-uniform game");
  }
  CapSetup cs;
  cs.demands = g.demands();
  for (int k : cs.demands) cs.total += k;
  cs.limits.reserve(static_cast<std::size_t>(g.num_resources()));
  for (int e = 0; e < g.num_resources(); ++e) {
    cs.limits.push_back(std::min(g.resource(e).capacity(), g.num_players()));
  }
  return cs;
}

StrategyProfile greedy_cap_profile(const CongestionGame& g, const CapSetup& cs) {
  const int m = g.num_resources();
  std::vector<int> loads(static_cast<std::size_t>(m), 0);
  StrategyProfile s;
  s.choice.reserve(cs.demands.size());

  for (std::size_t i = 0; i < cs.demands.size(); ++i) {
    std::vector<int> open;
    for (int e = 0; e < m; ++e) {
      if (loads[static_cast<std::size_t>(e)] < cs.limits[static_cast<std::size_t>(e)]) {
        open.push_back(e);
      }
    }
    if (static_cast<int>(open.size()) < cs.demands[i]) {
      throw std::runtime_error("demands cannot be packed within the capacities");
    }
    std::sort(open.begin(), open.end(), [&](int a, int b) {
      const int ra = cs.limits[static_cast<std::size_t>(a)] - loads[static_cast<std::size_t>(a)];
      const int rb = cs.limits[static_cast<std::size_t>(b)] - loads[static_cast<std::size_t>(b)];
      if (ra != rb) return ra > rb;
      const double ca = g.resource(a).at_dbl(loads[static_cast<std::size_t>(a)] + 1);
      const double cb = g.resource(b).at_dbl(loads[static_cast<std::size_t>(b)] + 1);
      if (ca != cb) return ca < cb;
      return a < b;
    });
    std::vector<int> picked(open.begin(), open.begin() + cs.demands[i]);
    std::sort(picked.begin(), picked.end());
    for (int e : picked) loads[static_cast<std::size_t>(e)] += 1;
    s.choice.push_back(g.strategy_index(static_cast<int>(i), picked));
  }
  return s;
}

}  // namespace

McKayTerms mckay_terms(const DegreeSequence& seq) {
  check_degree_sums(seq);
  McKayTerms t;
  for (int k : seq.row_degrees) {
    t.total += k;
    t.row_pairs += static_cast<long long>(k) * (k - 1);
  }
  for (int a : seq.column_degrees) {
    t.column_pairs += static_cast<long long>(a) * (a - 1);
  }
  t.log_prefactor = log_factorial(t.total);
  for (int k : seq.row_degrees) t.log_prefactor -= log_factorial(k);
  for (int a : seq.column_degrees) t.log_prefactor -= log_factorial(a);
  return t;
}

double log_mckay_estimate(const DegreeSequence& seq) {
  const McKayTerms t = mckay_terms(seq);
  if (t.total == 0) return 0.0;
  const double kk = static_cast<double>(t.total);
  return t.log_prefactor -
         static_cast<double>(t.row_pairs) * static_cast<double>(t.column_pairs) / (kk * kk);
}

BigInt count_bipartite(const DegreeSequence& seq) {
  if (!degree_sums_match(seq.row_degrees, seq.column_degrees)) return BigInt(0);
  check_exact_guard(seq.row_degrees.size(), seq.column_degrees.size());
  return BipartiteDp(seq.row_degrees, seq.column_degrees).total();
}

std::vector<std::vector<int>> sample_bipartite_uniform(const DegreeSequence& seq, Rng& rng) {
  check_degree_sums(seq);
  check_exact_guard(seq.row_degrees.size(), seq.column_degrees.size());
  BipartiteDp dp(seq.row_degrees, seq.column_degrees);
  return dp.sample(rng);
}

BigInt uniform_bigint(Rng& rng, const BigInt& bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_bigint: bound must be positive");
  if (bound == 1) return 0;
  const auto bits = boost::multiprecision::msb(bound - 1) + 1;
  const auto words = (bits + 63) / 64;
  const BigInt mask = (BigInt(1) << bits) - 1;
  for (;;) {
    BigInt x = 0;
    for (unsigned w = 0; w < words; ++w) {
      x <<= 64;
      x |= BigInt(rng());
    }
    x &= mask;
    if (x < bound) return x;
  }
}

std::vector<int> sample_load_profile_cap(const CongestionGame& g, double temperature, CapMode mode,
                                         double eps, double mix_constant, Rng& rng) {
  const CapSetup cs = cap_setup(g);
  const int n = g.num_players();
  const int m = g.num_resources();

  if (mode == CapMode::Exact) {
    check_exact_guard(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
  }

  PolymatroidBaseSet box{cs.limits, cs.total};
  const std::vector<std::vector<int>> profiles = box.enumerate();

  LoadTable table(cs.limits);
  for (const auto& alpha : profiles) {
    double base;
    if (mode == CapMode::Exact) {
      BipartiteDp dp(cs.demands, alpha);
      if (dp.total() == 0) continue;
      base = log_bigint(dp.total());
    } else {
      base = log_mckay_estimate(DegreeSequence{cs.demands, alpha});
    }
    const double pot = potential_from_loads_dbl(g, alpha);
    if (std::isinf(pot)) continue;
    table.set(alpha, base - temperature * pot);
  }

  BaseSampleConfig config;
  config.eps = eps;
  config.mix_constant = mix_constant;
  config.start = resource_loads(g, greedy_cap_profile(g, cs)).counts;

  MatroidSpec spec = MatroidSpec::truncated_partition(
      std::vector<int>(static_cast<std::size_t>(m), n), cs.limits, cs.total);
  LogWeightFn fn = [&table](std::span<const int> alpha) { return table.get(alpha); };
  return sample_polymatroid_base(spec, fn, config, rng).alpha;
}

StrategyProfile sample_gibbs_cap(const CongestionGame& g, double temperature, CapMode mode,
                                 double eps, double mix_constant, Rng& rng) {
  const CapSetup cs = cap_setup(g);
  check_exact_guard(static_cast<std::size_t>(g.num_players()),
                    static_cast<std::size_t>(g.num_resources()));

  // The estimate-based load marginal can land on a profile no strategy
  // profile realizes; redraw when that happens. Exact mode never does.
  constexpr int kAttempts = 64;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const std::vector<int> alpha =
        sample_load_profile_cap(g, temperature, mode, eps, mix_constant, rng);
    BipartiteDp dp(cs.demands, alpha);
    if (dp.total() == 0) continue;
    const std::vector<std::vector<int>> rows = dp.sample(rng);

    StrategyProfile s;
    s.choice.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      s.choice.push_back(g.strategy_index(static_cast<int>(i), rows[i]));
    }
    return s;
  }
  throw std::runtime_error("load sampler kept drawing unrealizable profiles");
}

StrategyProfile greedy_cap_start(const CongestionGame& g) {
  return greedy_cap_profile(g, cap_setup(g));
}

std::vector<double> exact_stage_distribution_cap(const CongestionGame& g, double temperature,
                                                 CapMode mode,
                                                 std::span<const StrategyProfile> support) {
  const CapSetup cs = cap_setup(g);
  check_exact_guard(cs.demands.size(), cs.limits.size());

  PolymatroidBaseSet box{cs.limits, cs.total};
  const std::vector<std::vector<int>> profiles = box.enumerate();

  std::map<std::vector<int>, std::pair<double, double>> stage1;  // log weight, log count
  std::vector<double> log_w;
  std::vector<const std::vector<int>*> keep;
  for (const auto& alpha : profiles) {
    BipartiteDp dp(cs.demands, alpha);
    if (dp.total() == 0) continue;
    const double log_count = log_bigint(dp.total());
    const double pot = potential_from_loads_dbl(g, alpha);
    if (std::isinf(pot)) continue;
    const double base = mode == CapMode::Exact
                            ? log_count
                            : log_mckay_estimate(DegreeSequence{cs.demands, alpha});
    log_w.push_back(base - temperature * pot);
    keep.push_back(&alpha);
    stage1.emplace(alpha, std::make_pair(0.0, log_count));
  }
  const double lse = log_sum_exp(log_w);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    stage1.at(*keep[i]).first = log_w[i] - lse;
  }

  std::vector<double> out;
  out.reserve(support.size());
  for (const auto& s : support) {
    const std::vector<int> alpha = resource_loads(g, s).counts;
    const auto it = stage1.find(alpha);
    if (it == stage1.end()) {
      out.push_back(0.0);
      continue;
    }
    out.push_back(std::exp(it->second.first - it->second.second));
  }
  return out;
}

namespace detail {

BigInt count_bipartite_unguarded(std::span<const int> row_degrees,
                                 std::span<const int> column_degrees) {
  BipartiteDp dp(std::vector<int>(row_degrees.begin(), row_degrees.end()),
                 std::vector<int>(column_degrees.begin(), column_degrees.end()));
  return dp.total();
}

}  // namespace detail

}  // namespace congibbs
