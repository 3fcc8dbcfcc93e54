#pragma once
// Emotion representations over the 2D valence-arousal (VA) square [-1,1]^2.
//
//   CategoricalState  probability vector over a named EmotionSet (CES)
//   VAPoint           single point in VA space (DES)
//   DensityGrid       H x W normalized density over VA space (DDES)
//
// Grid orientation: row 0 is the top (arousal near +1), column 0 is the left
// edge (valence near -1). Cell (i, j) has center
//   valence = -1 + (2j + 1) / W,  arousal = 1 - (2i + 1) / H.
// All reductions over grids are sequential in row-major order.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddes/error.hpp"

namespace ddes {

/// Mass tolerance for normalized CES / DDES values.
inline constexpr double kMassTolerance = 1e-6;

/// Default decoder resolution.
inline constexpr std::size_t kDefaultGridSize = 28;

class VAPoint {
 public:
  /// Throws PointOutOfDomain unless both components are finite and in [-1, 1].
  VAPoint(double valence, double arousal);

  double valence() const noexcept { return valence_; }
  double arousal() const noexcept { return arousal_; }

  friend bool operator==(const VAPoint&, const VAPoint&) = default;

 private:
  double valence_;
  double arousal_;
};

/// Builds a point after clamping each component into [-1, 1]. Used for
/// results of convex combinations that may overshoot by rounding.
VAPoint clamped_point(double valence, double arousal);

struct Emotion {
  std::string label;
  VAPoint anchor;
};

class EmotionSet {
 public:
  /// Throws InvalidEmotionSet on empty lists or duplicate labels.
  EmotionSet(std::string name, std::vector<Emotion> emotions);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return emotions_.size(); }
  const std::vector<Emotion>& emotions() const noexcept { return emotions_; }
  const Emotion& operator[](std::size_t i) const { return emotions_[i]; }

  std::optional<std::size_t> index_of(std::string_view label) const;

  /// Same labels and anchors in the same order (names are not compared).
  bool same_emotions(const EmotionSet& other) const;

 private:
  std::string name_;
  std::vector<Emotion> emotions_;
};

using EmotionSetPtr = std::shared_ptr<const EmotionSet>;

EmotionSetPtr make_emotion_set(std::string name, std::vector<Emotion> emotions);

class CategoricalState {
 public:
  const EmotionSetPtr& set() const noexcept { return set_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// Index of the largest probability; ties resolve to the lowest index.
  std::size_t argmax() const noexcept;

 private:
  friend CategoricalState make_categorical(EmotionSetPtr, std::span<const double>);
  CategoricalState(EmotionSetPtr set, std::vector<double> probs)
      : set_(std::move(set)), probs_(std::move(probs)) {}

  EmotionSetPtr set_;
  std::vector<double> probs_;
};

/// Normalizes non-negative weights into a CES.
/// Errors: LengthMismatch, NegativeWeight, ZeroTotalMass.
CategoricalState make_categorical(EmotionSetPtr set, std::span<const double> weights);

class GridGeometry {
 public:
  /// Throws InvalidGeometry unless height >= 2 and width >= 2.
  GridGeometry(std::size_t height, std::size_t width);

  static GridGeometry square(std::size_t n) { return GridGeometry(n, n); }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t cells() const noexcept { return height_ * width_; }

  double column_valence(std::size_t j) const noexcept;
  double row_arousal(std::size_t i) const noexcept;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
};

/// Center of cell (i, j). Errors: IndexOutOfRange.
VAPoint cell_center(const GridGeometry& geometry, std::size_t i, std::size_t j);

class DensityGrid {
 public:
  /// Wraps values that are already normalized (checked against
  /// kMassTolerance, stored unchanged). Errors: ShapeMismatch, NegativeCell,
  /// NotNormalized.
  static DensityGrid from_normalized(const GridGeometry& geometry, std::vector<double> values);

  const GridGeometry& geometry() const noexcept { return geometry_; }
  std::size_t height() const noexcept { return geometry_.height(); }
  std::size_t width() const noexcept { return geometry_.width(); }
  std::span<const double> values() const noexcept { return values_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * geometry_.width() + j]; }

  /// Row-major index of the largest cell; ties resolve to the lowest index.
  std::size_t argmax() const noexcept;

 private:
  friend DensityGrid make_grid(const GridGeometry&, std::vector<double>);
  DensityGrid(GridGeometry geometry, std::vector<double> values)
      : geometry_(geometry), values_(std::move(values)) {}

  GridGeometry geometry_;
  std::vector<double> values_;
};

/// Normalizes a raw non-negative row-major H x W array into a grid.
/// Errors: ShapeMismatch, NegativeCell, ZeroTotalMass.
DensityGrid make_grid(const GridGeometry& geometry, std::vector<double> raw);

DensityGrid uniform_grid(const GridGeometry& geometry);

/// Bilinear interpolation of cell values at a VA point, clamped at the
/// border. Exact at cell centers.
double bilinear_sample(const DensityGrid& grid, const VAPoint& point);

/// Sequential sum in index order.
double ordered_sum(std::span<const double> values) noexcept;

}  // namespace ddes
