#include "ddes/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ddes {

namespace {

std::string point_text(double v, double a) {
  return "(" + std::to_string(v) + ", " + std::to_string(a) + ")";
}

bool in_unit_range(double x) { return std::isfinite(x) && x >= -1.0 && x <= 1.0; }

// Snaps a continuous index to the nearest integer when it is within rounding
// distance, so cell centers map back to their own node.
double snap_index(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

}  // namespace

VAPoint::VAPoint(double valence, double arousal) : valence_(valence), arousal_(arousal) {
  if (!in_unit_range(valence) || !in_unit_range(arousal)) {
    throw Error(ErrorCode::PointOutOfDomain, "VA point " + point_text(valence, arousal) + " outside [-1,1]^2");
  }
}

VAPoint clamped_point(double valence, double arousal) {
  return VAPoint(std::clamp(valence, -1.0, 1.0), std::clamp(arousal, -1.0, 1.0));
}

EmotionSet::EmotionSet(std::string name, std::vector<Emotion> emotions)
    : name_(std::move(name)), emotions_(std::move(emotions)) {
  if (emotions_.empty()) {
    throw Error(ErrorCode::InvalidEmotionSet, "emotion set '" + name_ + "' is empty");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& e : emotions_) {
    if (e.label.empty()) {
      throw Error(ErrorCode::InvalidEmotionSet, "emotion set '" + name_ + "' has an empty label");
    }
    if (!seen.insert(e.label).second) {
      throw Error(ErrorCode::InvalidEmotionSet, "duplicate label '" + e.label + "' in set '" + name_ + "'");
    }
  }
}

std::optional<std::size_t> EmotionSet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < emotions_.size(); ++i) {
    if (emotions_[i].label == label) return i;
  }
  return std::nullopt;
}

bool EmotionSet::same_emotions(const EmotionSet& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (emotions_[i].label != other.emotions_[i].label || !(emotions_[i].anchor == other.emotions_[i].anchor)) {
      return false;
    }
  }
  return true;
}

EmotionSetPtr make_emotion_set(std::string name, std::vector<Emotion> emotions) {
  return std::make_shared<const EmotionSet>(std::move(name), std::move(emotions));
}

std::size_t CategoricalState::argmax() const noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

CategoricalState make_categorical(EmotionSetPtr set, std::span<const double> weights) {
  if (!set) throw Error(ErrorCode::InvalidEmotionSet, "null emotion set");
  if (weights.size() != set->size()) {
    throw Error(ErrorCode::LengthMismatch, "got " + std::to_string(weights.size()) + " weights for " +
                                               std::to_string(set->size()) + " emotions");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(i) + " is " + std::to_string(weights[i]));
    }
  }
  const double total = ordered_sum(weights);
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroTotalMass, "all weights are zero");
  std::vector<double> probs(weights.begin(), weights.end());
  for (double& p : probs) p /= total;
  return CategoricalState(std::move(set), std::move(probs));
}

GridGeometry::GridGeometry(std::size_t height, std::size_t width) : height_(height), width_(width) {
  if (height < 2 || width < 2) {
    throw Error(ErrorCode::InvalidGeometry,
                "grid must be at least 2x2, got " + std::to_string(height) + "x" + std::to_string(width));
  }
}

double GridGeometry::column_valence(std::size_t j) const noexcept {
  return -1.0 + static_cast<double>(2 * j + 1) / static_cast<double>(width_);
}

double GridGeometry::row_arousal(std::size_t i) const noexcept {
  return 1.0 - static_cast<double>(2 * i + 1) / static_cast<double>(height_);
}

VAPoint cell_center(const GridGeometry& geometry, std::size_t i, std::size_t j) {
  if (i >= geometry.height() || j >= geometry.width()) {
    throw Error(ErrorCode::IndexOutOfRange, "cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                                ") outside " + std::to_string(geometry.height()) + "x" +
                                                std::to_string(geometry.width()) + " grid");
  }
  return VAPoint(geometry.column_valence(j), geometry.row_arousal(i));
}

namespace {

void check_cells(const GridGeometry& geometry, std::span<const double> values) {
  if (values.size() != geometry.cells()) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(geometry.cells()) + " cells, got " +
                                              std::to_string(values.size()));
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] >= 0.0) || !std::isfinite(values[k])) {
      throw Error(ErrorCode::NegativeCell, "cell " + std::to_string(k) + " is " + std::to_string(values[k]));
    }
  }
}

}  // namespace

DensityGrid DensityGrid::from_normalized(const GridGeometry& geometry, std::vector<double> values) {
  check_cells(geometry, values);
  const double total = ordered_sum(values);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::NotNormalized, "grid mass is " + std::to_string(total));
  }
  return DensityGrid(geometry, std::move(values));
}

std::size_t DensityGrid::argmax() const noexcept {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values_.size(); ++k) {
    if (values_[k] > values_[best]) best = k;
  }
  return best;
}

DensityGrid make_grid(const GridGeometry& geometry, std::vector<double> raw) {
  check_cells(geometry, raw);
  const double total = ordered_sum(raw);
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroTotalMass, "grid has no mass");
  for (double& v : raw) v /= total;
  return DensityGrid(geometry, std::move(raw));
}

DensityGrid uniform_grid(const GridGeometry& geometry) {
  return make_grid(geometry, std::vector<double>(geometry.cells(), 1.0));
}

double bilinear_sample(const DensityGrid& grid, const VAPoint& point) {
  const auto w = static_cast<double>(grid.width());
  const auto h = static_cast<double>(grid.height());
  const double x = std::clamp(snap_index((point.valence() + 1.0) * w / 2.0 - 0.5), 0.0, w - 1.0);
  const double y = std::clamp(snap_index((1.0 - point.arousal()) * h / 2.0 - 0.5), 0.0, h - 1.0);

  const auto x0 = static_cast<std::size_t>(std::floor(x));
  const auto y0 = static_cast<std::size_t>(std::floor(y));
  const std::size_t x1 = std::min(x0 + 1, grid.width() - 1);
  const std::size_t y1 = std::min(y0 + 1, grid.height() - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);

  if (fx == 0.0 && fy == 0.0) return grid.at(y0, x0);
  const double top = (1.0 - fx) * grid.at(y0, x0) + fx * grid.at(y0, x1);
  const double bottom = (1.0 - fx) * grid.at(y1, x0) + fx * grid.at(y1, x1);
  return (1.0 - fy) * top + fy * bottom;
}

double ordered_sum(std::span<const double> values) noexcept {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace ddes
