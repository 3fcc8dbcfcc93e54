#include "ddes/convert.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace ddes {

namespace {

double distance(const VAPoint& a, const VAPoint& b) {
  return std::hypot(a.valence() - b.valence(), a.arousal() - b.arousal());
}

double squared_distance(const VAPoint& a, const VAPoint& b) {
  const double dv = a.valence() - b.valence();
  const double da = a.arousal() - b.arousal();
  return dv * dv + da * da;
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidParams, std::string(name) + " must be positive, got " + std::to_string(value));
  }
}

}  // namespace

void ConversionParams::validate() const {
  require_positive(epsilon_dist, "epsilon_dist");
  require_positive(sharpness_k, "sharpness_k");
  require_positive(epsilon_temp, "epsilon_temp");
  require_positive(temperature_tau, "temperature_tau");
  if (temperature_tau > 1.0) {
    throw Error(ErrorCode::InvalidParams, "temperature_tau must be in (0, 1], got " + std::to_string(temperature_tau));
  }
  if (sigma && (!(*sigma > 0.0) || !std::isfinite(*sigma))) {
    throw Error(ErrorCode::SigmaNonPositive, "sigma must be positive, got " + std::to_string(*sigma));
  }
}

Bandwidth resolve_bandwidth(const WeightedPointCloud& cloud, const ConversionParams& params) {
  if (params.sigma) return Bandwidth::isotropic(*params.sigma);
  return scott_bandwidth(cloud);
}

VAPoint ces_to_des(const CategoricalState& state) {
  const auto& set = *state.set();
  double v = 0.0, a = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    v += state[i] * set[i].anchor.valence();
    a += state[i] * set[i].anchor.arousal();
  }
  return clamped_point(v, a);
}

CategoricalState ces_to_ces(const CategoricalState& state, const EmotionSetPtr& target,
                            const ConversionParams& params) {
  params.validate();
  const auto& source = *state.set();
  std::vector<double> weights(target->size(), 0.0);
  for (std::size_t i = 0; i < target->size(); ++i) {
    const VAPoint& d = (*target)[i].anchor;
    double acc = 0.0;
    for (std::size_t j = 0; j < source.size(); ++j) {
      acc += state[j] / (distance(d, source[j].anchor) + params.epsilon_dist);
    }
    weights[i] = acc;
  }
  return make_categorical(target, weights);
}

DensityGrid ces_to_ddes(const CategoricalState& state, const GridGeometry& geometry,
                        const ConversionParams& params) {
  params.validate();
  const auto& set = *state.set();
  std::vector<VAPoint> anchors;
  anchors.reserve(set.size());
  for (const auto& e : set.emotions()) anchors.push_back(e.anchor);
  const WeightedPointCloud cloud(std::move(anchors), {state.probs().begin(), state.probs().end()});
  return kde_to_grid(cloud, geometry, resolve_bandwidth(cloud, params));
}

CategoricalState des_to_ces(const VAPoint& point, const EmotionSetPtr& target, const ConversionParams& params) {
  params.validate();
  std::vector<double> logits(target->size());
  for (std::size_t i = 0; i < target->size(); ++i) {
    logits[i] = -params.sharpness_k * squared_distance(point, (*target)[i].anchor);
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  for (double& l : logits) l = std::exp(l - top);
  return make_categorical(target, logits);
}

DensityGrid des_to_ddes(const VAPoint& point, const GridGeometry& geometry, const ConversionParams& params) {
  params.validate();
  const auto cloud = WeightedPointCloud::uniform({point});
  return kde_to_grid(cloud, geometry, resolve_bandwidth(cloud, params));
}

CategoricalState ddes_to_ces(const DensityGrid& grid, const EmotionSetPtr& target) {
  std::vector<double> samples(target->size());
  for (std::size_t i = 0; i < target->size(); ++i) {
    samples[i] = bilinear_sample(grid, (*target)[i].anchor);
  }
  if (!(ordered_sum(samples) > 0.0)) {
    throw Error(ErrorCode::ZeroTotalMass, "grid has no mass at any anchor of set '" + target->name() + "'");
  }
  return make_categorical(target, samples);
}

DensityGrid sharpen_grid(const DensityGrid& grid, const ConversionParams& params) {
  params.validate();
  const auto values = grid.values();
  const double inv_tau = 1.0 / params.temperature_tau;
  std::vector<double> logits(values.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < values.size(); ++k) {
    logits[k] = std::log(values[k] + params.epsilon_temp) * inv_tau;
    top = std::max(top, logits[k]);
  }
  for (double& l : logits) l = std::exp(l - top);
  return make_grid(grid.geometry(), std::move(logits));
}

namespace {

// Sum of coord(k) * mass[k] taken over mirrored pairs. Coordinates of mirrored
// cells are exact negatives, so a symmetric marginal yields exactly zero.
double paired_moment(const std::vector<double>& mass, const std::function<double(std::size_t)>& coord) {
  const std::size_t n = mass.size();
  double m = 0.0;
  for (std::size_t k = 0; k < n / 2; ++k) m += coord(k) * (mass[k] - mass[n - 1 - k]);
  return m;
}

}  // namespace

VAPoint center_of_mass(const DensityGrid& grid) {
  const auto& geometry = grid.geometry();
  std::vector<double> rows(geometry.height(), 0.0), cols(geometry.width(), 0.0);
  for (std::size_t i = 0; i < geometry.height(); ++i) {
    for (std::size_t j = 0; j < geometry.width(); ++j) {
      const double z = grid.at(i, j);
      rows[i] += z;
      cols[j] += z;
    }
  }
  const double v = paired_moment(cols, [&](std::size_t j) { return geometry.column_valence(j); });
  const double a = paired_moment(rows, [&](std::size_t i) { return geometry.row_arousal(i); });
  return clamped_point(v, a);
}

VAPoint ddes_to_des(const DensityGrid& grid, const ConversionParams& params) {
  return center_of_mass(sharpen_grid(grid, params));
}

}  // namespace ddes
