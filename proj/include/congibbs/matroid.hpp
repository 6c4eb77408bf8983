#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "congibbs/numeric.hpp"
#include "congibbs/rational.hpp"
#include "congibbs/rng.hpp"

namespace congibbs {

// Block-structured matroid whose ground set is {(coordinate i, copy j)}:
// independence caps the selected copies per coordinate and the total size.
struct MatroidSpec {
  std::vector<int> copies;  // ground-set copies per coordinate
  std::vector<int> caps;    // per-coordinate cap on selected copies
  int rank = 0;             // common size of all bases

  static MatroidSpec uniform(int coordinates, int copies_per_coordinate, int rank);
  static MatroidSpec truncated_partition(std::vector<int> copies, std::vector<int> caps,
                                         int rank);

  int dimension() const { return static_cast<int>(copies.size()); }
  int coordinate_limit(int i) const { return std::min(copies[i], caps[i]); }
  bool is_base_projection(std::span<const int> alpha) const;
};

// Integer points of a box-with-modulus base set: 0 <= alpha <= caps,
// sum(alpha) = rank.
struct PolymatroidBaseSet {
  std::vector<int> caps;
  int rank = 0;

  bool contains(std::span<const int> alpha) const;
  // All members in lexicographic order; guarded against blowup.
  std::vector<std::vector<int>> enumerate(std::size_t guard = 200000) const;
};

// A base of the block matroid: the element set plus its cached projection
// alpha (copies selected per coordinate).
struct PolarizedBase {
  std::vector<std::pair<int, int>> elements;  // (coordinate, copy)
  std::vector<int> alpha;

  // Canonical base using the lowest copies of each coordinate.
  static PolarizedBase from_projection(const MatroidSpec& spec, std::vector<int> alpha);
  std::vector<int> recompute_projection(int dimension) const;
  void sort_elements();
};

// Log-weight over projections; -inf marks states excluded from the support.
using LogWeightFn = std::function<double(std::span<const int>)>;

// Number of bases projecting onto alpha when every coordinate has d copies.
BigInt multichoose(int d, std::span<const int> alpha);
double log_multichoose(std::span<const int> copies, std::span<const int> alpha);

// Weight an individual base inherits from its projection: w(alpha(B)) split
// evenly over the bases sharing that projection.
double polarized_log_weight(const LogWeightFn& w, int d, const PolarizedBase& base);

// One reversible move: drop a uniformly random element of the base, then
// re-add an element (possibly the dropped one) chosen with probability
// proportional to the polarized weight of the resulting base. Completions
// with weight -inf are excluded from the menu.
void base_exchange_step(const MatroidSpec& spec, const LogWeightFn& w, PolarizedBase& base,
                        Rng& rng);

struct BaseSampleConfig {
  double eps = 0.01;
  double mix_constant = 4.0;
  // Start projection; defaults to a left-to-right greedy fill. If the start
  // has weight -inf a deterministic single-unit repair runs first.
  std::optional<std::vector<int>> start;
};

// ceil(C * r * (ln r + ln(1/eps)) + C * r)
std::uint64_t base_exchange_budget(int rank, double eps, double mix_constant);

PolarizedBase sample_polymatroid_base(const MatroidSpec& spec, const LogWeightFn& w,
                                      const BaseSampleConfig& config, Rng& rng);

// All bases as canonicalized element sets; guarded against blowup.
std::vector<PolarizedBase> enumerate_bases(const MatroidSpec& spec,
                                           std::size_t guard = 200000);

}  // namespace congibbs
