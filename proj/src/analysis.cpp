#include "ddes/analysis.hpp"

#include <algorithm>
#include <numeric>

#include "ddes/convert.hpp"

namespace ddes {

namespace {

// Share of cell `index` (out of `count` along an axis) lying on the side where
// the coordinate increases with the index. Cell centers sit at
// (2*index + 1 - count) / count, so the middle cell of an odd axis is exactly 0.
double upper_share(std::size_t index, std::size_t count) {
  const std::size_t twice = 2 * index + 1;
  if (twice > count) return 1.0;
  if (twice < count) return 0.0;
  return 0.5;
}

double positive_valence_share(const GridGeometry& g, std::size_t j) { return upper_share(j, g.width()); }

// Arousal decreases with the row index.
double positive_arousal_share(const GridGeometry& g, std::size_t i) {
  return upper_share(g.height() - 1 - i, g.height());
}

}  // namespace

std::array<double, 4> quadrant_mass(const DensityGrid& grid) {
  const auto& g = grid.geometry();
  std::array<double, 4> q{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < g.height(); ++i) {
    const double up = positive_arousal_share(g, i);
    for (std::size_t j = 0; j < g.width(); ++j) {
      const double right = positive_valence_share(g, j);
      const double z = grid.at(i, j);
      q[0] += z * right * up;
      q[1] += z * (1.0 - right) * up;
      q[2] += z * (1.0 - right) * (1.0 - up);
      q[3] += z * right * (1.0 - up);
    }
  }
  // Stored grids may carry float32 rounding; report shares of the actual total.
  const double total = ordered_sum(grid.values());
  for (double& m : q) m /= total;
  return q;
}

std::array<double, 2> hemisphere_mass(const DensityGrid& grid, Axis axis) {
  const auto& g = grid.geometry();
  std::array<double, 2> h{0.0, 0.0};
  for (std::size_t i = 0; i < g.height(); ++i) {
    for (std::size_t j = 0; j < g.width(); ++j) {
      const double share = axis == Axis::Valence ? positive_valence_share(g, j) : positive_arousal_share(g, i);
      const double z = grid.at(i, j);
      h[0] += z * share;
      h[1] += z * (1.0 - share);
    }
  }
  const double total = ordered_sum(grid.values());
  h[0] /= total;
  h[1] /= total;
  return h;
}

CategoricalState project_to_wheel(const DensityGrid& grid, const EmotionSetPtr& wheel) {
  return ddes_to_ces(grid, wheel);
}

std::vector<RankedEmotion> top_k(const CategoricalState& state, std::size_t k) {
  if (k < 1 || k > state.size()) {
    throw Error(ErrorCode::KOutOfRange,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(state.size()) + "]");
  }
  std::vector<std::size_t> order(state.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return state[a] > state[b]; });
  std::vector<RankedEmotion> ranked;
  ranked.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t idx = order[r];
    ranked.push_back({idx, (*state.set())[idx].label, state[idx]});
  }
  return ranked;
}

}  // namespace ddes
