#pragma once
// Annotation aggregation: crowd labels (and optional precomputed sentence VA
// points) -> weighted point cloud -> Gaussian KDE sampled at grid cell
// centers.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddes/core.hpp"
#include "ddes/lexicon.hpp"

namespace ddes {

/// Isotropic bandwidth used whenever a data-driven estimate is degenerate.
inline constexpr double kFallbackSigma = 0.1;

struct AnnotationRecord {
  std::string image_id;
  std::string emotion_label;
  std::optional<VAPoint> sentence_va;
};

class WeightedPointCloud {
 public:
  /// Errors: EmptyCloud, LengthMismatch, NegativeWeight, NotNormalized
  /// (weights must sum to 1 within 1e-9).
  WeightedPointCloud(std::vector<VAPoint> points, std::vector<double> weights);

  static WeightedPointCloud uniform(std::vector<VAPoint> points);

  std::span<const VAPoint> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<VAPoint> points_;
  std::vector<double> weights_;
};

/// Symmetric 2x2 matrix in VA units squared.
struct Cov2 {
  double vv = 0.0;
  double va = 0.0;
  double aa = 0.0;

  double det() const noexcept { return vv * aa - va * va; }
  double trace() const noexcept { return vv + aa; }
};

class Bandwidth {
 public:
  /// Errors: SingularBandwidth unless the matrix is positive definite.
  explicit Bandwidth(Cov2 cov);

  /// sigma^2 * I. Errors: SigmaNonPositive.
  static Bandwidth isotropic(double sigma);

  const Cov2& cov() const noexcept { return cov_; }

 private:
  Cov2 cov_;
};

/// One point per label anchor plus one per present sentence point, all with
/// equal weight. Errors: EmptyInput, UnresolvableLabel.
WeightedPointCloud annotations_to_points(std::span<const AnnotationRecord> records, const EmotionSet& anchors);
WeightedPointCloud annotations_to_points(std::span<const AnnotationRecord> records, const Lexicon& lexicon);

/// Weighted Scott's rule: cov = n_eff^(-1/3) * S, where S is the
/// reliability-weighted covariance and n_eff = 1 / sum(w^2). Falls back to
/// kFallbackSigma^2 * I when n_eff < 2 or S is singular.
Bandwidth scott_bandwidth(const WeightedPointCloud& cloud);

/// Gaussian KDE evaluated at every cell center, normalized to unit mass.
/// Errors: SingularBandwidth, ZeroTotalMass (kernel underflow everywhere).
DensityGrid kde_to_grid(const WeightedPointCloud& cloud, const GridGeometry& geometry, const Bandwidth& bw);

struct Range {
  double lo;
  double hi;
};

/// Affine map of x from src onto dst. Errors: SourceRangeEmpty, OutOfRange.
double linear_rescale(double x, Range src, Range dst = {-1.0, 1.0});

}  // namespace ddes
