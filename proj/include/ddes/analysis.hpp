#pragma once
// Coarse summaries of a density grid.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ddes/core.hpp"

namespace ddes {

/// Mass in Q1 (v>0, a>0), Q2 (v<0, a>0), Q3 (v<0, a<0), Q4 (v>0, a<0).
/// Cells centered on an axis (odd dimensions) split evenly between the
/// adjacent quadrants.
std::array<double, 4> quadrant_mass(const DensityGrid& grid);

enum class Axis { Valence, Arousal };

/// {positive side, negative side} of the chosen axis.
std::array<double, 2> hemisphere_mass(const DensityGrid& grid, Axis axis);

/// Bilinear projection onto an arbitrary emotion wheel.
CategoricalState project_to_wheel(const DensityGrid& grid, const EmotionSetPtr& wheel);

struct RankedEmotion {
  std::size_t index;
  std::string label;
  double probability;
};

/// k most probable emotions, descending; ties keep the lower index first.
/// Errors: KOutOfRange.
std::vector<RankedEmotion> top_k(const CategoricalState& state, std::size_t k);

}  // namespace ddes
