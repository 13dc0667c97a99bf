#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "unkadf/errors.hpp"
#include "unkadf/matrix.hpp"

namespace unkadf {

/// Pearson coefficient between column ca of a and column cb of b. A constant
/// series has no defined coefficient and yields NaN as the undefined marker.
inline double pearson(const Matrix& a, int ca, const Matrix& b, int cb) {
  if (a.rows() != b.rows()) {
    throw errors::dimension("series lengths differ: " + std::to_string(a.rows()) + " vs " +
                            std::to_string(b.rows()));
  }
  const int t_steps = a.rows();
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (int t = 0; t < t_steps; ++t) {
    mean_a += a(t, ca);
    mean_b += b(t, cb);
  }
  mean_a /= t_steps;
  mean_b /= t_steps;

  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (int t = 0; t < t_steps; ++t) {
    const double da = a(t, ca) - mean_a;
    const double db = b(t, cb) - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

/// N_a x N_b matrix of station-pair coefficients.
inline Matrix pearson_matrix(const Matrix& a, const Matrix& b) {
  Matrix p(a.cols(), b.cols());
  for (int i = 0; i < a.cols(); ++i) {
    for (int j = 0; j < b.cols(); ++j) p(i, j) = pearson(a, i, b, j);
  }
  return p;
}

/// Histogram of coefficients binned at 0.1 across [-1, 1]; undefined (NaN)
/// entries are counted separately and excluded from the bins.
struct CorrelationSummary {
  std::vector<int> bin_counts = std::vector<int>(20, 0);
  int defined_pairs = 0;
  int undefined_pairs = 0;

  static double bin_low(int k) { return -1.0 + 0.1 * k; }

  double fraction_above(double threshold, const Matrix& p) const {
    int above = 0;
    for (int i = 0; i < p.rows(); ++i) {
      for (int j = 0; j < p.cols(); ++j) {
        if (!std::isnan(p(i, j)) && p(i, j) > threshold) ++above;
      }
    }
    return defined_pairs == 0 ? 0.0 : static_cast<double>(above) / defined_pairs;
  }
};

inline CorrelationSummary summarize_correlations(const Matrix& p) {
  CorrelationSummary s;
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      const double r = p(i, j);
      if (std::isnan(r)) {
        ++s.undefined_pairs;
        continue;
      }
      ++s.defined_pairs;
      const int bin = std::min(19, static_cast<int>(std::floor((r + 1.0) / 0.1)));
      ++s.bin_counts[bin];
    }
  }
  return s;
}

}  // namespace unkadf
