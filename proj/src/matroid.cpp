#include "congibbs/matroid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace congibbs {

namespace {

void check_spec(const MatroidSpec& spec) {
  if (spec.copies.empty() || spec.copies.size() != spec.caps.size())
    throw std::invalid_argument("matroid: copies/caps size mismatch");
  long long reachable = 0;
  for (int i = 0; i < spec.dimension(); ++i) {
    if (spec.copies[i] < 1) throw std::invalid_argument("matroid: coordinate without copies");
    if (spec.caps[i] < 0) throw std::invalid_argument("matroid: negative cap");
    reachable += spec.coordinate_limit(i);
  }
  if (spec.rank < 1) throw std::invalid_argument("matroid: rank must be positive");
  if (reachable < spec.rank)
    throw std::invalid_argument("matroid: caps cannot reach the rank");
}

}  // namespace

MatroidSpec MatroidSpec::uniform(int coordinates, int copies_per_coordinate, int rank) {
  MatroidSpec spec;
  spec.copies.assign(coordinates, copies_per_coordinate);
  spec.caps.assign(coordinates, copies_per_coordinate);
  spec.rank = rank;
  check_spec(spec);
  return spec;
}

MatroidSpec MatroidSpec::truncated_partition(std::vector<int> copies, std::vector<int> caps,
                                             int rank) {
  MatroidSpec spec;
  spec.copies = std::move(copies);
  spec.caps = std::move(caps);
  spec.rank = rank;
  check_spec(spec);
  return spec;
}

bool MatroidSpec::is_base_projection(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dimension()) return false;
  int total = 0;
  for (int i = 0; i < dimension(); ++i) {
    if (alpha[i] < 0 || alpha[i] > coordinate_limit(i)) return false;
    total += alpha[i];
  }
  return total == rank;
}

bool PolymatroidBaseSet::contains(std::span<const int> alpha) const {
  if (alpha.size() != caps.size()) return false;
  int total = 0;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (alpha[i] < 0 || alpha[i] > caps[i]) return false;
    total += alpha[i];
  }
  return total == rank;
}

std::vector<std::vector<int>> PolymatroidBaseSet::enumerate(std::size_t guard) const {
  std::vector<std::vector<int>> out;
  std::vector<int> current(caps.size(), 0);
  std::vector<long long> suffix(caps.size() + 1, 0);
  for (int i = static_cast<int>(caps.size()) - 1; i >= 0; --i)
    suffix[i] = suffix[i + 1] + caps[i];

  const auto walk = [&](auto&& self, std::size_t i, int remaining) -> void {
    if (i == caps.size()) {
      if (remaining == 0) {
        if (out.size() >= guard)
          throw std::runtime_error("polymatroid base set too large to enumerate");
        out.push_back(current);
      }
      return;
    }
    const int hi = std::min(caps[i], remaining);
    for (int v = 0; v <= hi; ++v) {
      if (suffix[i + 1] < remaining - v) continue;
      current[i] = v;
      self(self, i + 1, remaining - v);
    }
    current[i] = 0;
  };
  walk(walk, 0, rank);
  return out;
}

PolarizedBase PolarizedBase::from_projection(const MatroidSpec& spec, std::vector<int> alpha) {
  if (!spec.is_base_projection(alpha))
    throw std::invalid_argument("projection is not a base of the matroid");
  PolarizedBase base;
  base.alpha = std::move(alpha);
  base.elements.reserve(spec.rank);
  for (int i = 0; i < spec.dimension(); ++i)
    for (int j = 0; j < base.alpha[i]; ++j) base.elements.emplace_back(i, j);
  return base;
}

std::vector<int> PolarizedBase::recompute_projection(int dimension) const {
  std::vector<int> alpha(dimension, 0);
  for (const auto& [coord, copy] : elements) ++alpha.at(coord);
  return alpha;
}

void PolarizedBase::sort_elements() { std::sort(elements.begin(), elements.end()); }

BigInt multichoose(int d, std::span<const int> alpha) {
  BigInt r = 1;
  for (int a : alpha) {
    if (a < 0 || a > d) return 0;
    r *= binom_big(d, a);
  }
  return r;
}

double log_multichoose(std::span<const int> copies, std::span<const int> alpha) {
  if (copies.size() != alpha.size())
    throw std::invalid_argument("log_multichoose: length mismatch");
  KahanSum s;
  for (std::size_t i = 0; i < copies.size(); ++i) {
    if (alpha[i] < 0 || alpha[i] > copies[i]) return kNegInf;
    s.add(log_factorial(copies[i]) - log_factorial(alpha[i]) -
          log_factorial(copies[i] - alpha[i]));
  }
  return s.value();
}

double polarized_log_weight(const LogWeightFn& w, int d, const PolarizedBase& base) {
  const double lw = w(base.alpha);
  if (lw == kNegInf) return kNegInf;
  KahanSum s;
  for (int a : base.alpha) {
    if (a < 0 || a > d) return kNegInf;
    s.add(log_factorial(d) - log_factorial(a) - log_factorial(d - a));
  }
  return lw - s.value();
}

void base_exchange_step(const MatroidSpec& spec, const LogWeightFn& w, PolarizedBase& base,
                        Rng& rng) {
  const int dim = spec.dimension();
  const int r = spec.rank;
  if (static_cast<int>(base.elements.size()) != r)
    throw std::invalid_argument("base has the wrong number of elements");

  const std::size_t drop = uniform_index(rng, base.elements.size());
  const int dropped_coord = base.elements[drop].first;
  --base.alpha[dropped_coord];

  // menu over coordinates; every free copy of a coordinate has the same
  // polarized weight. free_copies * w(alpha+e_j) / multichoose(alpha+e_j)
  // divided by the multichoose factor of the current alpha (common to all
  // entries, so it cancels in the normalization) leaves
  // (alpha_j + 1) * w(alpha + e_j).
  thread_local std::vector<double> q, a;
  q.assign(static_cast<std::size_t>(dim), 0.0);
  a.assign(static_cast<std::size_t>(dim), kNegInf);
  for (int j = 0; j < dim; ++j) {
    if (base.alpha[j] + 1 > spec.coordinate_limit(j)) continue;
    if (spec.copies[j] - base.alpha[j] <= 0) continue;
    ++base.alpha[j];
    const double lw = w(base.alpha);
    if (lw != kNegInf) {
      q[static_cast<std::size_t>(j)] = static_cast<double>(base.alpha[j]);
      a[static_cast<std::size_t>(j)] = lw;
    }
    --base.alpha[j];
  }

  int chosen;
  try {
    chosen = suitable_sample(q, a, rng);
  } catch (const std::invalid_argument&) {
    throw std::runtime_error("base exchange: no finite-weight completion");
  }
  ++base.alpha[chosen];

  // uniform unused copy of the chosen coordinate (the dropped slot is free)
  thread_local std::vector<char> used;
  used.assign(static_cast<std::size_t>(spec.copies[chosen]), 0);
  for (std::size_t idx = 0; idx < base.elements.size(); ++idx) {
    if (idx == drop) continue;
    if (base.elements[idx].first == chosen) used[base.elements[idx].second] = 1;
  }
  int free_count = 0;
  for (char u : used) free_count += u == 0;
  std::uint64_t pick = uniform_index(rng, free_count);
  int copy = -1;
  for (int c = 0; c < spec.copies[chosen]; ++c) {
    if (used[c]) continue;
    if (pick == 0) {
      copy = c;
      break;
    }
    --pick;
  }
  base.elements[drop] = {chosen, copy};
}

std::uint64_t base_exchange_budget(int rank, double eps, double mix_constant) {
  if (rank < 1) throw std::invalid_argument("budget: rank must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("budget: eps must be in (0,1)");
  if (!(mix_constant > 0.0)) throw std::invalid_argument("budget: constant must be positive");
  const double r = static_cast<double>(rank);
  const double steps = mix_constant * r * (std::log(r) + std::log(1.0 / eps)) + mix_constant * r;
  return static_cast<std::uint64_t>(std::ceil(steps));
}

PolarizedBase sample_polymatroid_base(const MatroidSpec& spec, const LogWeightFn& w,
                                      const BaseSampleConfig& config, Rng& rng) {
  const int dim = spec.dimension();
  std::vector<int> alpha;
  if (config.start) {
    alpha = *config.start;
    if (!spec.is_base_projection(alpha))
      throw std::invalid_argument("start is not a base projection");
  } else {
    alpha.assign(dim, 0);
    int remaining = spec.rank;
    for (int i = 0; i < dim && remaining > 0; ++i) {
      alpha[i] = std::min(spec.coordinate_limit(i), remaining);
      remaining -= alpha[i];
    }
  }

  if (w(alpha) == kNegInf) {
    // deterministic single-unit repair: best finite-weight neighbour
    double best = kNegInf;
    int best_from = -1, best_to = -1;
    for (int i = 0; i < dim; ++i) {
      if (alpha[i] == 0) continue;
      --alpha[i];
      for (int j = 0; j < dim; ++j) {
        if (j == i || alpha[j] + 1 > spec.coordinate_limit(j)) continue;
        ++alpha[j];
        const double lw = w(alpha);
        if (lw > best) {
          best = lw;
          best_from = i;
          best_to = j;
        }
        --alpha[j];
      }
      ++alpha[i];
    }
    if (best == kNegInf)
      throw std::runtime_error("no finite-weight base near the start; supply one explicitly");
    --alpha[best_from];
    ++alpha[best_to];
  }

  PolarizedBase base = PolarizedBase::from_projection(spec, std::move(alpha));
  const std::uint64_t budget = base_exchange_budget(spec.rank, config.eps, config.mix_constant);
  for (std::uint64_t t = 0; t < budget; ++t) base_exchange_step(spec, w, base, rng);
  return base;
}

std::vector<PolarizedBase> enumerate_bases(const MatroidSpec& spec, std::size_t guard) {
  PolymatroidBaseSet box;
  box.caps.resize(spec.dimension());
  for (int i = 0; i < spec.dimension(); ++i) box.caps[i] = spec.coordinate_limit(i);
  box.rank = spec.rank;

  BigInt total = 0;
  const auto projections = box.enumerate(guard);
  for (const auto& alpha : projections) {
    BigInt count = 1;
    for (int i = 0; i < spec.dimension(); ++i) count *= binom_big(spec.copies[i], alpha[i]);
    total += count;
    if (total > guard) throw std::runtime_error("matroid has too many bases to enumerate");
  }

  std::vector<PolarizedBase> out;
  std::vector<std::pair<int, int>> chosen;
  for (const auto& alpha : projections) {
    // all ways to pick alpha[i] concrete copies per coordinate
    const auto expand = [&](auto&& self, int i) -> void {
      if (i == spec.dimension()) {
        PolarizedBase base;
        base.elements = chosen;
        base.alpha = alpha;
        out.push_back(std::move(base));
        return;
      }
      std::vector<int> comb(alpha[i]);
      const auto combos = [&](auto&& inner, int start, int depth) -> void {
        if (depth == alpha[i]) {
          for (int c : comb) chosen.emplace_back(i, c);
          self(self, i + 1);
          chosen.resize(chosen.size() - alpha[i]);
          return;
        }
        for (int c = start; c < spec.copies[i]; ++c) {
          comb[depth] = c;
          inner(inner, c + 1, depth + 1);
        }
      };
      combos(combos, 0, 0);
    };
    expand(expand, 0);
  }
  for (auto& b : out) b.sort_elements();
  return out;
}

}  // namespace congibbs
