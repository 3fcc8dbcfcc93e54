#pragma once
// Conversions between the three representations, all routed through VA space.
//
//   CES  -> DES   probability-weighted mean of anchors
//   CES  -> CES   inverse-distance resampling onto another emotion set
//   CES  -> DDES  probability-weighted Gaussian kernels at the anchors
//   DES  -> CES   Gaussian softmax over squared anchor distances
//   DES  -> DDES  single Gaussian kernel
//   DDES -> CES   bilinear samples at the anchors, renormalized
//   DDES -> DES   center of mass after temperature sharpening

#include <optional>

#include "ddes/aggregate.hpp"
#include "ddes/core.hpp"

namespace ddes {

struct ConversionParams {
  double epsilon_dist = 1e-6;   // added to each distance in CES -> CES
  double sharpness_k = 10.0;    // DES -> CES
  std::optional<double> sigma;  // Gaussian width for -> DDES; nullopt = Scott's rule
  double temperature_tau = 0.05;
  double epsilon_temp = 1e-12;

  /// Errors: InvalidParams, SigmaNonPositive.
  void validate() const;
};

VAPoint ces_to_des(const CategoricalState& state);

CategoricalState ces_to_ces(const CategoricalState& state, const EmotionSetPtr& target,
                            const ConversionParams& params = {});

DensityGrid ces_to_ddes(const CategoricalState& state, const GridGeometry& geometry,
                        const ConversionParams& params = {});

CategoricalState des_to_ces(const VAPoint& point, const EmotionSetPtr& target, const ConversionParams& params = {});

DensityGrid des_to_ddes(const VAPoint& point, const GridGeometry& geometry, const ConversionParams& params = {});

/// Errors: ZeroTotalMass when every anchor samples to zero.
CategoricalState ddes_to_ces(const DensityGrid& grid, const EmotionSetPtr& target);

/// (Z + eps)^(1/tau), renormalized; evaluated in log space.
DensityGrid sharpen_grid(const DensityGrid& grid, const ConversionParams& params = {});

VAPoint ddes_to_des(const DensityGrid& grid, const ConversionParams& params = {});

/// Center of mass of a grid without sharpening.
VAPoint center_of_mass(const DensityGrid& grid);

/// Explicit sigma, or Scott's rule over the cloud with its degenerate fallback.
Bandwidth resolve_bandwidth(const WeightedPointCloud& cloud, const ConversionParams& params);

}  // namespace ddes
