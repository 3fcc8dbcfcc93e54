#pragma once
// Brute-force reference implementations used only by tests. Each follows
// the textbook formula directly and shares no code path with the library
// beyond the value types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Pt {
  double v;
  double a;
};

inline Pt center(std::size_t h, std::size_t w, std::size_t i, std::size_t j) {
  return {(2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(w) - 1.0,
          1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(h)};
}

inline std::vector<double> normalized(std::vector<double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  for (double& v : x) v /= s;
  return x;
}

/// Weighted isotropic Gaussian mixture evaluated at every cell, normalized.
inline std::vector<double> gaussian_grid(std::size_t h, std::size_t w, const std::vector<Pt>& pts,
                                         const std::vector<double>& weights, double sigma) {
  std::vector<double> z;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const Pt c = center(h, w, i, j);
      double acc = 0.0;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const double d2 = std::pow(c.v - pts[k].v, 2) + std::pow(c.a - pts[k].a, 2);
        acc += weights[k] * std::exp(-d2 / (2.0 * sigma * sigma));
      }
      z.push_back(acc);
    }
  }
  return normalized(z);
}

/// Anisotropic Gaussian KDE; the quadratic form goes through a Cholesky
/// factor of the covariance instead of an explicit inverse.
inline std::vector<double> kde_grid(std::size_t h, std::size_t w, const std::vector<Pt>& pts,
                                    const std::vector<double>& weights, double c_vv, double c_va, double c_aa) {
  const double l11 = std::sqrt(c_vv);
  const double l21 = c_va / l11;
  const double l22 = std::sqrt(c_aa - l21 * l21);
  std::vector<double> z;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const Pt c = center(h, w, i, j);
      double acc = 0.0;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const double y1 = (c.v - pts[k].v) / l11;
        const double y2 = ((c.a - pts[k].a) - l21 * y1) / l22;
        acc += weights[k] * std::exp(-0.5 * (y1 * y1 + y2 * y2));
      }
      z.push_back(acc);
    }
  }
  return normalized(z);
}

/// Inverse-distance resampling written as the full double-sum ratio.
inline std::vector<double> inverse_distance(const std::vector<double>& p, const std::vector<Pt>& src,
                                            const std::vector<Pt>& dst, double eps) {
  std::vector<double> q(dst.size(), 0.0);
  double denom = 0.0;
  for (std::size_t k = 0; k < dst.size(); ++k) {
    for (std::size_t j = 0; j < src.size(); ++j) {
      denom += p[j] / (std::sqrt(std::pow(dst[k].v - src[j].v, 2) + std::pow(dst[k].a - src[j].a, 2)) + eps);
    }
  }
  for (std::size_t i = 0; i < dst.size(); ++i) {
    for (std::size_t j = 0; j < src.size(); ++j) {
      q[i] += p[j] / (std::sqrt(std::pow(dst[i].v - src[j].v, 2) + std::pow(dst[i].a - src[j].a, 2)) + eps);
    }
    q[i] /= denom;
  }
  return q;
}

/// Gaussian softmax without max-subtraction.
inline std::vector<double> gaussian_softmax(Pt x, const std::vector<Pt>& anchors, double k) {
  std::vector<double> p;
  for (const auto& c : anchors) p.push_back(std::exp(-k * (std::pow(x.v - c.v, 2) + std::pow(x.a - c.a, 2))));
  return normalized(p);
}

/// Direct powering, fine for moderate exponents.
inline std::vector<double> sharpen(const std::vector<double>& z, double tau, double eps) {
  std::vector<double> out;
  for (double v : z) out.push_back(std::pow(v + eps, 1.0 / tau));
  return normalized(out);
}

/// Two-pass sample covariance (n - 1 denominator) of equally weighted points.
inline std::array<double, 3> sample_covariance(const std::vector<Pt>& pts) {
  const double n = static_cast<double>(pts.size());
  double mv = 0.0, ma = 0.0;
  for (const auto& p : pts) {
    mv += p.v;
    ma += p.a;
  }
  mv /= n;
  ma /= n;
  double vv = 0.0, va = 0.0, aa = 0.0;
  for (const auto& p : pts) {
    vv += (p.v - mv) * (p.v - mv);
    va += (p.v - mv) * (p.a - ma);
    aa += (p.a - ma) * (p.a - ma);
  }
  return {vv / (n - 1.0), va / (n - 1.0), aa / (n - 1.0)};
}

/// Tau-b by enumerating every pair.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0.0, discordant = 0.0, only_x_tie = 0.0, only_y_tie = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        only_x_tie += 1.0;
      } else if (dy == 0.0) {
        only_y_tie += 1.0;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  }
  return (concordant - discordant) /
         std::sqrt((concordant + discordant + only_x_tie) * (concordant + discordant + only_y_tie));
}

/// Pearson via raw sums.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

inline std::size_t argmax(const std::vector<double>& p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

/// Macro F1 from label lists, one class at a time.
inline double macro_f1(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& gt, std::size_t classes) {
  double total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t n = 0; n < pred.size(); ++n) {
      if (pred[n] == c && gt[n] == c) tp += 1;
      if (pred[n] == c && gt[n] != c) fp += 1;
      if (pred[n] != c && gt[n] == c) fn += 1;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    total += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  }
  return total / static_cast<double>(classes);
}

inline double rmse(const std::vector<Pt>& p, const std::vector<Pt>& g) {
  double s = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) s += std::pow(p[n].v - g[n].v, 2) + std::pow(p[n].a - g[n].a, 2);
  return std::sqrt(s / (2.0 * static_cast<double>(p.size())));
}

inline double kl(const std::vector<double>& t, const std::vector<double>& p, double eps = 1e-12) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += t[i] * std::log((t[i] + eps) / (p[i] + eps));
  return s;
}

}  // namespace oracle
