#pragma once
// Evaluation metrics and training losses.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ddes/core.hpp"

namespace ddes {

/// Smoothing constant inside the KL logarithms.
inline constexpr double kKlEpsilon = 1e-12;

struct MetricReport {
  std::string name;
  double value = 0.0;
  std::size_t sample_count = 0;
  std::size_t skipped = 0;
};

/// Fraction of pairs with matching argmax (ties -> lowest index).
/// Errors: LengthMismatch, SetMismatch, EmptyInput.
double top1_accuracy(std::span<const CategoricalState> preds, std::span<const CategoricalState> gts);

/// Unweighted mean over every class of the set of the per-class F1 on argmax
/// labels. A class with no true and no predicted instances scores 0.
double macro_f1(std::span<const CategoricalState> preds, std::span<const CategoricalState> gts);

/// Kendall tau-b of two paired score vectors, O(n log n).
/// Errors: LengthMismatch, DegenerateInput (fewer than two values, or every
/// value tied in either vector).
double kendall_tau_b(std::span<const double> xs, std::span<const double> ys);

/// Tau-b between the probability vectors. Errors: SetMismatch, DegenerateInput.
double kendall_tau(const CategoricalState& pred, const CategoricalState& gt);

struct TauSummary {
  double mean = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// Per-sample tau-b averaged over the dataset; degenerate samples are skipped
/// and counted. Errors: LengthMismatch, SetMismatch, DegenerateInput when
/// every sample is degenerate.
TauSummary mean_kendall_tau(std::span<const CategoricalState> preds, std::span<const CategoricalState> gts);

/// Errors: LengthMismatch (or fewer than 2 samples), ZeroVariance.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Pooled over both dimensions. Errors: LengthMismatch, EmptyInput.
double rmse(std::span<const VAPoint> preds, std::span<const VAPoint> gts);

/// KL(target || pred) with kKlEpsilon smoothing. Errors: ShapeMismatch.
double kl_divergence(std::span<const double> target, std::span<const double> pred);
double kl_divergence(const CategoricalState& target, const CategoricalState& pred);
double kl_divergence(const DensityGrid& target, const DensityGrid& pred);

double mse_loss(const VAPoint& pred, const VAPoint& gt);

struct LossTerm {
  std::string kind;
  double value = 0.0;
  std::size_t count = 0;
};

/// Sum of term values weighted by their share of the batch.
/// Errors: EmptyBatch, InvalidParams (zero count or non-finite value).
double batch_loss(std::span<const LossTerm> terms);

}  // namespace ddes
