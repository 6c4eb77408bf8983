#include "congibbs/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "congibbs/numeric.hpp"

namespace congibbs {

namespace {

using Matrix = std::vector<std::vector<double>>;

constexpr std::size_t kMaxMixingStates = 2000;
constexpr std::uint64_t kMaxMixingSteps = std::uint64_t{1} << 30;

Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      const auto& bk = b[k];
      auto& ci = c[i];
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  // Squaring drifts row sums by machine epsilon per level; renormalize so
  // deep powers stay stochastic.
  for (auto& row : c) {
    KahanSum sum;
    for (double v : row) sum.add(v);
    const double s = sum.value();
    if (s > 0.0) {
      for (double& v : row) v /= s;
    }
  }
  return c;
}

double worst_start_tv(const Matrix& m, std::span<const double> pi) {
  double worst = 0.0;
  for (const auto& row : m) {
    KahanSum acc;
    for (std::size_t j = 0; j < row.size(); ++j) acc.add(std::abs(row[j] - pi[j]));
    worst = std::max(worst, 0.5 * acc.value());
  }
  return worst;
}

Matrix power(const std::vector<Matrix>& squarings, std::uint64_t t) {
  Matrix result;
  bool have = false;
  for (std::size_t a = 0; a < squarings.size(); ++a) {
    if ((t >> a) & 1u) {
      result = have ? multiply(result, squarings[a]) : squarings[a];
      have = true;
    }
  }
  if (!have) throw std::logic_error("power: zero exponent");
  return result;
}

}  // namespace

std::vector<StrategyProfile> enumerate_profiles(const CongestionGame& g, std::int64_t guard) {
  const int n = g.num_players();
  unsigned __int128 product = 1;
  for (int i = 0; i < n; ++i) {
    product *= static_cast<unsigned __int128>(g.num_strategies(i));
    if (product > static_cast<unsigned __int128>(guard)) {
      throw std::runtime_error("profile space too large to enumerate");
    }
  }

  std::vector<StrategyProfile> out;
  StrategyProfile s;
  s.choice.assign(static_cast<std::size_t>(n), 0);
  for (;;) {
    if (is_feasible(g, s)) out.push_back(s);
    int pos = n - 1;
    while (pos >= 0) {
      auto& c = s.choice[static_cast<std::size_t>(pos)];
      if (++c < g.num_strategies(pos)) break;
      c = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

ExactDistribution exact_gibbs(const CongestionGame& g, double temperature, double scale) {
  ExactDistribution dist;
  dist.support = enumerate_profiles(g);
  if (dist.support.empty()) throw std::runtime_error("game has no feasible profile");

  std::vector<double> log_w;
  log_w.reserve(dist.support.size());
  for (const auto& s : dist.support) {
    const std::vector<int>& loads = resource_loads(g, s).counts;
    log_w.push_back(-temperature * scale * potential_from_loads_dbl(g, loads));
  }
  const double lse = log_sum_exp(log_w);
  dist.probability.reserve(log_w.size());
  dist.log_probability.reserve(log_w.size());
  for (double lw : log_w) {
    dist.log_probability.push_back(lw - lse);
    dist.probability.push_back(std::exp(lw - lse));
  }
  return dist;
}

std::vector<double> empirical_distribution(std::span<const StrategyProfile> support,
                                           std::span<const StrategyProfile> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical distribution of zero samples");
  const ProfileIndex index(support);
  std::vector<double> hist(support.size(), 0.0);
  for (const auto& s : samples) {
    const auto pos = index.find(s);
    if (!pos) throw std::invalid_argument("sample outside the support");
    hist[*pos] += 1.0;
  }
  for (double& h : hist) h /= static_cast<double>(samples.size());
  return hist;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  KahanSum acc;
  for (std::size_t i = 0; i < p.size(); ++i) acc.add(std::abs(p[i] - q[i]));
  return 0.5 * acc.value();
}

ProfileIndex::ProfileIndex(std::span<const StrategyProfile> support) {
  for (std::size_t i = 0; i < support.size(); ++i) {
    pos_.emplace(support[i].choice, i);
  }
}

std::optional<std::size_t> ProfileIndex::find(const StrategyProfile& s) const {
  const auto it = pos_.find(s.choice);
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::vector<double>> chain_kernel(const CongestionGame& g, ChainKind kind,
                                              double temperature) {
  if (kind == ChainKind::RelaxedLogit && !g.symmetric()) {
    throw std::invalid_argument("relaxed chain requires a symmetric game");
  }
  const std::vector<StrategyProfile> support = enumerate_profiles(g);
  const ProfileIndex index(support);
  const std::size_t states = support.size();
  const int n = g.num_players();

  Matrix kernel(states, std::vector<double>(states, 0.0));
  const double logit_share = kind == ChainKind::Logit ? 1.0 : 0.5;

  for (std::size_t si = 0; si < states; ++si) {
    const StrategyProfile& s = support[si];

    if (kind == ChainKind::RelaxedLogit) {
      const double pair_mass = 0.5 / (static_cast<double>(n) * static_cast<double>(n));
      StrategyProfile t = s;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          std::swap(t.choice[static_cast<std::size_t>(i)], t.choice[static_cast<std::size_t>(j)]);
          const auto pos = index.find(t);
          if (!pos) throw std::logic_error("swap left the feasible set");
          kernel[si][*pos] += pair_mass;
          std::swap(t.choice[static_cast<std::size_t>(i)], t.choice[static_cast<std::size_t>(j)]);
        }
      }
    }

    for (int player = 0; player < n; ++player) {
      std::vector<int> loads = resource_loads(g, s).counts;
      g.visit_strategy(player, s.choice[static_cast<std::size_t>(player)],
                       [&](int e) { loads[static_cast<std::size_t>(e)] -= 1; });

      const std::int64_t menu = g.num_strategies(player);
      std::vector<double> log_w(static_cast<std::size_t>(menu), kNegInf);
      for (std::int64_t t = 0; t < menu; ++t) {
        double marginal = 0.0;
        g.visit_strategy(player, t, [&](int e) {
          marginal += g.resource(e).at_dbl(loads[static_cast<std::size_t>(e)] + 1);
        });
        if (!std::isinf(marginal)) log_w[static_cast<std::size_t>(t)] = -temperature * marginal;
      }
      const double lse = log_sum_exp(log_w);

      StrategyProfile t = s;
      for (std::int64_t alt = 0; alt < menu; ++alt) {
        const double lw = log_w[static_cast<std::size_t>(alt)];
        if (std::isinf(lw)) continue;
        t.choice[static_cast<std::size_t>(player)] = alt;
        const auto pos = index.find(t);
        if (!pos) throw std::logic_error("finite-weight deviation left the feasible set");
        kernel[si][*pos] += logit_share * std::exp(lw - lse) / static_cast<double>(n);
      }
    }
  }
  return kernel;
}

KernelReport check_kernel(const std::vector<std::vector<double>>& kernel,
                          std::span<const double> pi) {
  const std::size_t n = kernel.size();
  if (pi.size() != n) throw std::invalid_argument("check_kernel: size mismatch");

  KernelReport report;
  for (const auto& row : kernel) {
    if (row.size() != n) throw std::invalid_argument("check_kernel: kernel not square");
    KahanSum sum;
    for (double v : row) sum.add(v);
    report.max_row_sum_error = std::max(report.max_row_sum_error, std::abs(sum.value() - 1.0));
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double fwd = pi[i] * kernel[i][j];
      const double bwd = pi[j] * kernel[j][i];
      report.max_reversibility_error =
          std::max(report.max_reversibility_error, std::abs(fwd - bwd));
      if (fwd > 0.0 && bwd > 0.0) {
        report.max_log_reversibility_error = std::max(
            report.max_log_reversibility_error, std::abs(std::log(fwd) - std::log(bwd)));
      }
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    KahanSum col;
    for (std::size_t i = 0; i < n; ++i) col.add(pi[i] * kernel[i][j]);
    report.max_stationarity_error =
        std::max(report.max_stationarity_error, std::abs(col.value() - pi[j]));
  }
  return report;
}

std::uint64_t exact_mixing_time(const std::vector<std::vector<double>>& kernel,
                                std::span<const double> pi, std::size_t start, double eps) {
  const std::size_t n = kernel.size();
  if (n == 0 || pi.size() != n) throw std::invalid_argument("mixing time: size mismatch");
  if (start >= n) throw std::invalid_argument("mixing time: start state out of range");
  if (n > kMaxMixingStates) {
    throw std::invalid_argument("mixing-time check limited to 2000 states");
  }
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("mixing time: eps in (0, 1)");

  std::vector<double> v(n, 0.0);
  v[start] = 1.0;
  std::vector<double> next(n, 0.0);

  auto tv_to_pi = [&]() {
    KahanSum acc;
    for (std::size_t j = 0; j < n; ++j) acc.add(std::abs(v[j] - pi[j]));
    return 0.5 * acc.value();
  };

  std::uint64_t candidate = tv_to_pi() <= eps ? 0 : kMaxMixingSteps;
  for (std::uint64_t t = 1;; ++t) {
    if (t > kMaxMixingSteps) {
      throw std::runtime_error("mixing time exceeds the step guard");
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      const auto& row = kernel[i];
      for (std::size_t j = 0; j < n; ++j) next[j] += vi * row[j];
    }
    v.swap(next);
    if (t % 1024 == 0) {
      KahanSum total;
      for (double x : v) total.add(x);
      const double s = total.value();
      for (double& x : v) x /= s;
    }

    if (tv_to_pi() <= eps) {
      if (candidate == kMaxMixingSteps) candidate = t;
      // Accept only once the TV has stayed below eps for a full doubling
      // window past the crossing.
      if (t >= 2 * (candidate == 0 ? 1 : candidate)) return candidate;
    } else {
      candidate = kMaxMixingSteps;
    }
  }
}

MixingResult worst_mixing_time(const std::vector<std::vector<double>>& kernel,
                               std::span<const double> pi, double eps) {
  const std::size_t n = kernel.size();
  if (n == 0 || pi.size() != n) throw std::invalid_argument("mixing time: size mismatch");
  if (n > kMaxMixingStates) {
    throw std::invalid_argument("mixing-time check limited to 2000 states");
  }
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("mixing time: eps in (0, 1)");

  std::vector<Matrix> squarings;
  squarings.push_back(kernel);
  double tv = worst_start_tv(kernel, pi);
  std::uint64_t horizon = 1;
  while (tv > eps) {
    if (horizon >= kMaxMixingSteps) {
      throw std::runtime_error("mixing time exceeds the step guard");
    }
    squarings.push_back(multiply(squarings.back(), squarings.back()));
    horizon <<= 1;
    tv = worst_start_tv(squarings.back(), pi);
  }

  if (horizon == 1) {
    double tv0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      KahanSum acc;
      for (std::size_t j = 0; j < n; ++j) acc.add(std::abs((i == j ? 1.0 : 0.0) - pi[j]));
      tv0 = std::max(tv0, 0.5 * acc.value());
    }
    if (tv0 <= eps) return MixingResult{0, tv0, tv0};
    return MixingResult{1, tv, tv0};
  }

  std::uint64_t lo = horizon >> 1;  // worst TV above eps here
  std::uint64_t hi = horizon;      // and at most eps here
  double tv_hi = tv;
  double tv_lo = worst_start_tv(squarings[squarings.size() - 2], pi);
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const double tv_mid = worst_start_tv(power(squarings, mid), pi);
    if (tv_mid <= eps) {
      hi = mid;
      tv_hi = tv_mid;
    } else {
      lo = mid;
      tv_lo = tv_mid;
    }
  }
  return MixingResult{hi, tv_hi, tv_lo};
}

std::optional<ExchangeViolation> check_m_convex(
    const std::vector<std::vector<int>>& profiles,
    const std::function<ExtRational(std::span<const int>)>& f) {
  std::vector<ExtRational> values;
  values.reserve(profiles.size());
  for (const auto& a : profiles) values.push_back(f(a));

  for (std::size_t ai = 0; ai < profiles.size(); ++ai) {
    for (std::size_t bi = 0; bi < profiles.size(); ++bi) {
      const auto& a = profiles[ai];
      const auto& b = profiles[bi];
      const ExtRational lhs = values[ai] + values[bi];
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] <= b[i]) continue;
        bool repaired = false;
        std::vector<int> a2 = a;
        std::vector<int> b2 = b;
        for (std::size_t j = 0; j < a.size(); ++j) {
          if (a[j] >= b[j]) continue;
          a2[i] -= 1;
          a2[j] += 1;
          b2[i] += 1;
          b2[j] -= 1;
          const ExtRational rhs = f(a2) + f(b2);
          a2[i] += 1;
          a2[j] -= 1;
          b2[i] -= 1;
          b2[j] += 1;
          if (lhs >= rhs) {
            repaired = true;
            break;
          }
        }
        if (!repaired) {
          return ExchangeViolation{a, b, static_cast<int>(i)};
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<ExchangeViolation> check_m_convex_dbl(
    const std::vector<std::vector<int>>& profiles,
    const std::function<double(std::span<const int>)>& f, double tolerance) {
  std::vector<double> values;
  values.reserve(profiles.size());
  for (const auto& a : profiles) values.push_back(f(a));

  for (std::size_t ai = 0; ai < profiles.size(); ++ai) {
    for (std::size_t bi = 0; bi < profiles.size(); ++bi) {
      const auto& a = profiles[ai];
      const auto& b = profiles[bi];
      const double lhs = values[ai] + values[bi];
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] <= b[i]) continue;
        bool repaired = false;
        std::vector<int> a2 = a;
        std::vector<int> b2 = b;
        for (std::size_t j = 0; j < a.size(); ++j) {
          if (a[j] >= b[j]) continue;
          a2[i] -= 1;
          a2[j] += 1;
          b2[i] += 1;
          b2[j] -= 1;
          const double rhs = f(a2) + f(b2);
          a2[i] += 1;
          a2[j] -= 1;
          b2[i] -= 1;
          b2[j] += 1;
          if (std::isinf(lhs) || rhs <= lhs + tolerance) {
            repaired = true;
            break;
          }
        }
        if (!repaired) {
          return ExchangeViolation{a, b, static_cast<int>(i)};
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<PotentialViolation> check_exact_potential(const CongestionGame& g) {
  const std::vector<StrategyProfile> profiles = enumerate_profiles(g);
  for (const auto& s : profiles) {
    const ExtRational phi = rosenthal_potential(g, s);
    for (int player = 0; player < g.num_players(); ++player) {
      const ExtRational cost = player_cost(g, s, player);
      StrategyProfile t = s;
      for (std::int64_t alt = 0; alt < g.num_strategies(player); ++alt) {
        if (alt == s.choice[static_cast<std::size_t>(player)]) continue;
        t.choice[static_cast<std::size_t>(player)] = alt;
        if (!is_feasible(g, t)) continue;
        const ExtRational lhs = cost - player_cost(g, t, player);
        const ExtRational rhs = phi - rosenthal_potential(g, t);
        if (lhs != rhs) {
          return PotentialViolation{s, player, alt};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace congibbs
