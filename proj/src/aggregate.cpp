#include "ddes/aggregate.hpp"

#include <cmath>

namespace ddes {

namespace {

// Relative determinant floor below which a covariance counts as singular.
constexpr double kSingularRatio = 1e-12;

bool positive_definite(const Cov2& c) {
  const double scale = c.trace() * c.trace();
  return std::isfinite(c.vv) && std::isfinite(c.va) && std::isfinite(c.aa) && c.vv > 0.0 && c.aa > 0.0 &&
         c.det() > kSingularRatio * scale;
}

template <typename Resolve>
WeightedPointCloud collect_points(std::span<const AnnotationRecord> records, Resolve&& resolve) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no annotation records");
  std::vector<VAPoint> points;
  points.reserve(records.size() * 2);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const auto anchor = resolve(rec.emotion_label);
    if (!anchor) {
      throw Error(ErrorCode::UnresolvableLabel,
                  "record " + std::to_string(r) + " (image '" + rec.image_id + "'): unknown emotion '" +
                      rec.emotion_label + "'");
    }
    points.push_back(*anchor);
    if (rec.sentence_va) points.push_back(*rec.sentence_va);
  }
  return WeightedPointCloud::uniform(std::move(points));
}

}  // namespace

WeightedPointCloud::WeightedPointCloud(std::vector<VAPoint> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw Error(ErrorCode::EmptyCloud, "point cloud is empty");
  if (points_.size() != weights_.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(points_.size()) + " points but " +
                                               std::to_string(weights_.size()) + " weights");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::NegativeWeight, "cloud weight " + std::to_string(w));
  }
  const double total = ordered_sum(weights_);
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::NotNormalized, "cloud weights sum to " + std::to_string(total));
  }
}

WeightedPointCloud WeightedPointCloud::uniform(std::vector<VAPoint> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyCloud, "point cloud is empty");
  std::vector<double> weights(points.size(), 1.0 / static_cast<double>(points.size()));
  return WeightedPointCloud(std::move(points), std::move(weights));
}

Bandwidth::Bandwidth(Cov2 cov) : cov_(cov) {
  if (!positive_definite(cov_)) {
    throw Error(ErrorCode::SingularBandwidth, "bandwidth covariance is not positive definite");
  }
}

Bandwidth Bandwidth::isotropic(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::SigmaNonPositive, "sigma must be positive, got " + std::to_string(sigma));
  }
  return Bandwidth(Cov2{sigma * sigma, 0.0, sigma * sigma});
}

WeightedPointCloud annotations_to_points(std::span<const AnnotationRecord> records, const EmotionSet& anchors) {
  return collect_points(records, [&](const std::string& label) -> std::optional<VAPoint> {
    const auto idx = anchors.index_of(normalize_word(label));
    if (!idx) return std::nullopt;
    return anchors[*idx].anchor;
  });
}

WeightedPointCloud annotations_to_points(std::span<const AnnotationRecord> records, const Lexicon& lexicon) {
  return collect_points(records, [&](const std::string& label) -> std::optional<VAPoint> {
    if (!lexicon.find(label)) return std::nullopt;
    return lookup_va(lexicon, label);
  });
}

Bandwidth scott_bandwidth(const WeightedPointCloud& cloud) {
  const auto points = cloud.points();
  const auto weights = cloud.weights();

  double mean_v = 0.0, mean_a = 0.0, sum_w2 = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    mean_v += weights[k] * points[k].valence();
    mean_a += weights[k] * points[k].arousal();
    sum_w2 += weights[k] * weights[k];
  }
  const double n_eff = 1.0 / sum_w2;
  if (n_eff < 2.0) return Bandwidth::isotropic(kFallbackSigma);

  Cov2 s;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double dv = points[k].valence() - mean_v;
    const double da = points[k].arousal() - mean_a;
    s.vv += weights[k] * dv * dv;
    s.va += weights[k] * dv * da;
    s.aa += weights[k] * da * da;
  }
  const double reliability = 1.0 - sum_w2;
  const double factor = std::pow(n_eff, -1.0 / 3.0) / reliability;
  const Cov2 cov{s.vv * factor, s.va * factor, s.aa * factor};
  if (!positive_definite(cov)) return Bandwidth::isotropic(kFallbackSigma);
  return Bandwidth(cov);
}

DensityGrid kde_to_grid(const WeightedPointCloud& cloud, const GridGeometry& geometry, const Bandwidth& bw) {
  const Cov2& c = bw.cov();
  const double det = c.det();
  if (!(det > 0.0)) throw Error(ErrorCode::SingularBandwidth, "bandwidth determinant is not positive");
  // Precision matrix.
  const double p_vv = c.aa / det;
  const double p_va = -c.va / det;
  const double p_aa = c.vv / det;

  const auto points = cloud.points();
  const auto weights = cloud.weights();
  std::vector<double> raw(geometry.cells(), 0.0);
  for (std::size_t i = 0; i < geometry.height(); ++i) {
    const double a = geometry.row_arousal(i);
    for (std::size_t j = 0; j < geometry.width(); ++j) {
      const double v = geometry.column_valence(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < points.size(); ++k) {
        const double dv = v - points[k].valence();
        const double da = a - points[k].arousal();
        const double q = p_vv * dv * dv + 2.0 * p_va * dv * da + p_aa * da * da;
        acc += weights[k] * std::exp(-0.5 * q);
      }
      raw[i * geometry.width() + j] = acc;
    }
  }
  return make_grid(geometry, std::move(raw));
}

double linear_rescale(double x, Range src, Range dst) {
  if (!(src.lo < src.hi)) {
    throw Error(ErrorCode::SourceRangeEmpty,
                "source range [" + std::to_string(src.lo) + ", " + std::to_string(src.hi) + "] is empty");
  }
  if (!(x >= src.lo && x <= src.hi)) {
    throw Error(ErrorCode::OutOfRange, std::to_string(x) + " outside [" + std::to_string(src.lo) + ", " +
                                           std::to_string(src.hi) + "]");
  }
  return dst.lo + (x - src.lo) * (dst.hi - dst.lo) / (src.hi - src.lo);
}

}  // namespace ddes
