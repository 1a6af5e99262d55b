#include "qcd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace qcd {

std::size_t SimplexGrid::point_count(std::size_t M, std::size_t G) {
  // C(G + M, M) built incrementally; every partial product is an integer.
  unsigned __int128 value = 1;
  for (std::size_t i = 1; i <= M; ++i) {
    value = value * (G + i) / i;
    if (value > std::numeric_limits<std::size_t>::max()) {
      return std::numeric_limits<std::size_t>::max();
    }
  }
  return static_cast<std::size_t>(value);
}

SimplexGrid::SimplexGrid(std::size_t M, std::size_t G, std::size_t point_budget) : M_(M), G_(G) {
  if (M < 1 || G < 1) throw std::invalid_argument("grid needs M >= 1 and G >= 1");
  if (M > kMaxDimension) {
    throw std::invalid_argument(fmt::format("grid dimension {} exceeds {}", M, kMaxDimension));
  }
  count_ = point_count(M, G);
  if (count_ > point_budget || count_ > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw GridBudgetExceeded(fmt::format(
        "grid M={} G={} has {} points, above the budget of {}", M, G, count_, point_budget));
  }

  const std::size_t cols = M + 2;
  binom_.assign((G + M + 1) * cols, 0);
  for (std::size_t r = 0; r <= G + M; ++r) {
    binom_[r * cols] = 1;
    for (std::size_t c = 1; c < cols && c <= r; ++c) {
      binom_[r * cols + c] = binom_[(r - 1) * cols + c - 1] + (c <= r - 1 ? binom_[(r - 1) * cols + c] : 0);
    }
  }

  points_.resize(count_ * (M + 1));
  std::vector<std::int32_t> s(M, 0);
  const auto g = static_cast<std::int32_t>(G);
  for (std::size_t idx = 0; idx < count_; ++idx) {
    std::int32_t* k = points_.data() + idx * (M + 1);
    k[0] = g - s[0];
    for (std::size_t t = 0; t + 1 < M; ++t) k[t + 1] = s[t] - s[t + 1];
    k[M] = s[M - 1];

    // Advance the chain odometer.
    for (std::size_t t = M; t-- > 0;) {
      const std::int32_t cap = t == 0 ? g : s[t - 1];
      if (s[t] < cap) {
        ++s[t];
        std::fill(s.begin() + static_cast<std::ptrdiff_t>(t) + 1, s.end(), 0);
        break;
      }
    }
  }
}

std::size_t SimplexGrid::rank_of_chain(const std::int32_t* s) const {
  const std::size_t cols = M_ + 2;
  std::size_t rank = 0;
  for (std::size_t t = 0; t < M_; ++t) {
    rank += binom_[(static_cast<std::size_t>(s[t]) + M_ - 1 - t) * cols + (M_ - t)];
  }
  return rank;
}

void SimplexGrid::coordinates(std::size_t index, std::span<double> out) const {
  const auto k = composition(index);
  const double g = static_cast<double>(G_);
  for (std::size_t i = 0; i <= M_; ++i) out[i] = static_cast<double>(k[i]) / g;
}

std::vector<double> SimplexGrid::coordinates(std::size_t index) const {
  std::vector<double> out(M_ + 1);
  coordinates(index, out);
  return out;
}

std::optional<std::size_t> SimplexGrid::index_of(std::span<const std::int32_t> k) const {
  if (k.size() != M_ + 1) return std::nullopt;
  std::int32_t s[kMaxDimension];
  std::int64_t acc = 0;
  for (std::size_t i = M_; i >= 1; --i) {
    if (k[i] < 0) return std::nullopt;
    acc += k[i];
    s[i - 1] = static_cast<std::int32_t>(acc);
  }
  if (k[0] < 0 || acc + k[0] != static_cast<std::int64_t>(G_)) return std::nullopt;
  return rank_of_chain(s);
}

std::optional<std::size_t> SimplexGrid::neighbor(std::size_t index, std::size_t from,
                                                 std::size_t to) const {
  if (from == to || from > M_ || to > M_) return std::nullopt;
  const auto k = composition(index);
  if (k[from] == 0) return std::nullopt;
  std::int32_t moved[kMaxDimension + 1];
  std::copy(k.begin(), k.end(), moved);
  --moved[from];
  ++moved[to];
  return index_of(std::span<const std::int32_t>(moved, M_ + 1));
}

std::vector<std::pair<std::size_t, std::size_t>> SimplexGrid::adjacency() const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t idx = 0; idx < count_; ++idx) {
    for (std::size_t from = 0; from <= M_; ++from) {
      for (std::size_t to = 0; to <= M_; ++to) {
        if (const auto other = neighbor(idx, from, to); other && idx < *other) {
          pairs.emplace_back(idx, *other);
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

namespace {

// Scaled suffix sums y_t = G (pi_{t+1} + ... + pi_M), forced into the chain
// region G >= y_0 >= ... >= y_{M-1} >= 0.
void scaled_suffix_sums(std::span<const double> pi, std::size_t M, double g, double* y) {
  double acc = 0.0;
  for (std::size_t t = M; t-- > 0;) {
    acc += std::max(pi[t + 1], 0.0);
    y[t] = g * acc;
  }
  double cap = g;
  for (std::size_t t = 0; t < M; ++t) {
    y[t] = std::clamp(y[t], 0.0, cap);
    cap = y[t];
  }
}

}  // namespace

SimplexCell SimplexGrid::locate(std::span<const double> pi) const {
  const double g = static_cast<double>(G_);
  const auto gi = static_cast<std::int32_t>(G_);
  double y[kMaxDimension];
  scaled_suffix_sums(pi, M_, g, y);

  std::int32_t base[kMaxDimension];
  double frac[kMaxDimension] = {};
  std::size_t order[kMaxDimension] = {};
  for (std::size_t t = 0; t < M_; ++t) {
    auto b = static_cast<std::int32_t>(std::floor(y[t]));
    double f = y[t] - static_cast<double>(b);
    if (b >= gi) {
      b = gi - 1;
      f = 1.0;
    }
    base[t] = b;
    frac[t] = f;
    order[t] = t;
  }
  // Descending fractional part, ties by ascending coordinate; this keeps
  // every vertex inside the chain region.
  for (std::size_t i = 1; i < M_; ++i) {
    const std::size_t key = order[i];
    std::size_t j = i;
    while (j > 0 && frac[order[j - 1]] < frac[key]) {
      order[j] = order[j - 1];
      --j;
    }
    order[j] = key;
  }

  SimplexCell cell;
  cell.count = M_ + 1;
  cell.index[0] = static_cast<std::int32_t>(rank_of_chain(base));
  cell.weight[0] = 1.0 - frac[order[0]];
  for (std::size_t k = 1; k <= M_; ++k) {
    ++base[order[k - 1]];
    cell.index[k] = static_cast<std::int32_t>(rank_of_chain(base));
    cell.weight[k] = frac[order[k - 1]] - (k < M_ ? frac[order[k]] : 0.0);
  }
  return cell;
}

std::size_t SimplexGrid::nearest(std::span<const double> pi) const {
  double y[kMaxDimension];
  scaled_suffix_sums(pi, M_, static_cast<double>(G_), y);
  std::int32_t s[kMaxDimension];
  for (std::size_t t = 0; t < M_; ++t) s[t] = static_cast<std::int32_t>(std::lround(y[t]));
  return rank_of_chain(s);
}

}  // namespace qcd
