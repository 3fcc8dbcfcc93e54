#include "ddes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace ddes {

namespace {

void check_pairs(std::span<const CategoricalState> preds, std::span<const CategoricalState> gts) {
  if (preds.size() != gts.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(preds.size()) + " predictions vs " +
                                               std::to_string(gts.size()) + " ground truths");
  }
  if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  for (std::size_t n = 0; n < preds.size(); ++n) {
    if (!preds[n].set()->same_emotions(*gts[n].set())) {
      throw Error(ErrorCode::SetMismatch, "sample " + std::to_string(n) + " uses different emotion sets");
    }
  }
}

// Number of unordered pairs within runs of equal values in a sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t pairs = 0;
  while (first != last) {
    It run_end = std::next(first);
    while (run_end != last && eq(*first, *run_end)) ++run_end;
    const auto t = static_cast<std::int64_t>(std::distance(first, run_end));
    pairs += t * (t - 1) / 2;
    first = run_end;
  }
  return pairs;
}

// Stable merge sort of ys counting strict inversions (pairs i < j with
// ys[i] > ys[j]).
std::int64_t sort_counting_inversions(std::vector<double>& ys, std::vector<double>& scratch, std::size_t lo,
                                      std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_counting_inversions(ys, scratch, lo, mid) + sort_counting_inversions(ys, scratch, mid, hi);
  std::size_t i = lo, j = mid, out = lo;
  while (i < mid && j < hi) {
    if (ys[j] < ys[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[out++] = ys[j++];
    } else {
      scratch[out++] = ys[i++];
    }
  }
  while (i < mid) scratch[out++] = ys[i++];
  while (j < hi) scratch[out++] = ys[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            ys.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double top1_accuracy(std::span<const CategoricalState> preds, std::span<const CategoricalState> gts) {
  check_pairs(preds, gts);
  std::size_t hits = 0;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    if (preds[n].argmax() == gts[n].argmax()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double macro_f1(std::span<const CategoricalState> preds, std::span<const CategoricalState> gts) {
  check_pairs(preds, gts);
  const std::size_t classes = preds.front().size();
  std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const std::size_t p = preds[n].argmax();
    const std::size_t g = gts[n].argmax();
    if (p == g) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const std::size_t denom = 2 * tp[c] + fp[c] + fn[c];
    if (denom > 0) total += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
  }
  return total / static_cast<double>(classes);
}

double kendall_tau_b(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) + " values");
  }
  const std::size_t n = xs.size();
  if (n < 2) throw Error(ErrorCode::DegenerateInput, "tau needs at least two values");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] != xs[b] ? xs[a] < xs[b] : ys[a] < ys[b];
  });

  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t x_ties = tied_pairs(order.begin(), order.end(),
                                         [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
  const std::int64_t joint_ties = tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] == xs[b] && ys[a] == ys[b];
  });

  std::vector<double> sorted_y(n), scratch(n);
  for (std::size_t k = 0; k < n; ++k) sorted_y[k] = ys[order[k]];
  // With ties in x broken by ascending y, every inversion left in y is a
  // discordant pair.
  const std::int64_t discordant = sort_counting_inversions(sorted_y, scratch, 0, n);
  const std::int64_t y_ties = tied_pairs(sorted_y.begin(), sorted_y.end(), std::equal_to<>());

  if (x_ties == total || y_ties == total) {
    throw Error(ErrorCode::DegenerateInput, "all values tied; tau-b undefined");
  }
  const auto numerator = static_cast<double>(total - x_ties - y_ties + joint_ties - 2 * discordant);
  const double denominator =
      std::sqrt(static_cast<double>(total - x_ties)) * std::sqrt(static_cast<double>(total - y_ties));
  return std::clamp(numerator / denominator, -1.0, 1.0);
}

double kendall_tau(const CategoricalState& pred, const CategoricalState& gt) {
  if (!pred.set()->same_emotions(*gt.set())) throw Error(ErrorCode::SetMismatch, "different emotion sets");
  return kendall_tau_b(pred.probs(), gt.probs());
}

TauSummary mean_kendall_tau(std::span<const CategoricalState> preds, std::span<const CategoricalState> gts) {
  check_pairs(preds, gts);
  TauSummary summary;
  double total = 0.0;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    try {
      total += kendall_tau(preds[n], gts[n]);
      ++summary.used;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
      ++summary.skipped;
    }
  }
  if (summary.used == 0) throw Error(ErrorCode::DegenerateInput, "every sample is degenerate");
  summary.mean = total / static_cast<double>(summary.used);
  return summary;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::LengthMismatch,
                "pearson needs equal lengths >= 2, got " + std::to_string(xs.size()) + " and " + std::to_string(ys.size()));
  }
  const auto n = static_cast<double>(xs.size());
  const double mx = ordered_sum(xs) / n;
  const double my = ordered_sum(ys) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx;
    const double dy = ys[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(ErrorCode::ZeroVariance, "pearson input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double rmse(std::span<const VAPoint> preds, std::span<const VAPoint> gts) {
  if (preds.size() != gts.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(preds.size()) + " predictions vs " +
                                               std::to_string(gts.size()) + " ground truths");
  }
  if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  double sum = 0.0;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const double dv = preds[n].valence() - gts[n].valence();
    const double da = preds[n].arousal() - gts[n].arousal();
    sum += dv * dv + da * da;
  }
  return std::sqrt(sum / (2.0 * static_cast<double>(preds.size())));
}

double kl_divergence(std::span<const double> target, std::span<const double> pred) {
  if (target.size() != pred.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                "KL arguments have " + std::to_string(target.size()) + " and " + std::to_string(pred.size()) + " entries");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] == 0.0) continue;
    sum += target[k] * (std::log(target[k] + kKlEpsilon) - std::log(pred[k] + kKlEpsilon));
  }
  return sum;
}

double kl_divergence(const CategoricalState& target, const CategoricalState& pred) {
  if (!target.set()->same_emotions(*pred.set())) throw Error(ErrorCode::SetMismatch, "different emotion sets");
  return kl_divergence(target.probs(), pred.probs());
}

double kl_divergence(const DensityGrid& target, const DensityGrid& pred) {
  if (!(target.geometry() == pred.geometry())) throw Error(ErrorCode::ShapeMismatch, "grid geometries differ");
  return kl_divergence(target.values(), pred.values());
}

double mse_loss(const VAPoint& pred, const VAPoint& gt) {
  const double dv = pred.valence() - gt.valence();
  const double da = pred.arousal() - gt.arousal();
  return (dv * dv + da * da) / 2.0;
}

double batch_loss(std::span<const LossTerm> terms) {
  if (terms.empty()) throw Error(ErrorCode::EmptyBatch, "no loss terms");
  std::size_t total = 0;
  for (const auto& t : terms) {
    if (t.count == 0) throw Error(ErrorCode::InvalidParams, "loss term '" + t.kind + "' has zero count");
    if (!std::isfinite(t.value)) throw Error(ErrorCode::InvalidParams, "loss term '" + t.kind + "' is not finite");
    total += t.count;
  }
  double loss = 0.0;
  for (const auto& t : terms) {
    loss += static_cast<double>(t.count) / static_cast<double>(total) * t.value;
  }
  return loss;
}

}  // namespace ddes
