#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "unkadf/errors.hpp"
#include "unkadf/matrix.hpp"
#include "unkadf/window.hpp"

namespace unkadf {

/// Historical average per (hour of day, station). Hours are derived from
/// absolute step indices, so the caller passes the offset of the training
/// block within the full series along with absolute query indices. Hours
/// never observed in training fall back to the station mean.
inline Matrix ha_forecast(const Matrix& train, std::size_t train_start,
                          const std::vector<std::size_t>& query_times,
                          std::size_t steps_per_day = 24) {
  if (train.rows() == 0 || train.cols() == 0) {
    throw errors::empty_dataset("ha_forecast: empty training block");
  }
  if (steps_per_day == 0) {
    throw errors::config("ha_forecast: steps_per_day must be positive");
  }
  const std::size_t n = train.cols();
  Matrix hour_sum(steps_per_day, n);
  std::vector<std::size_t> hour_count(steps_per_day, 0);
  Vec station_sum(n, 0.0);
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const std::size_t hour = (train_start + r) % steps_per_day;
    ++hour_count[hour];
    for (std::size_t j = 0; j < n; ++j) {
      hour_sum(hour, j) += train(r, j);
      station_sum[j] += train(r, j);
    }
  }
  Vec station_mean(n);
  for (std::size_t j = 0; j < n; ++j) {
    station_mean[j] = station_sum[j] / static_cast<double>(train.rows());
  }

  Matrix out(query_times.size(), n);
  for (std::size_t q = 0; q < query_times.size(); ++q) {
    const std::size_t hour = query_times[q] % steps_per_day;
    for (std::size_t j = 0; j < n; ++j) {
      out(q, j) = hour_count[hour] > 0
                      ? hour_sum(hour, j) / static_cast<double>(hour_count[hour])
                      : station_mean[j];
    }
  }
  return out;
}

namespace detail {

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
inline Vec solve_linear_system(Matrix a, Vec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) {
    throw errors::dimension("solve_linear_system: matrix is " + shape_str(a) + ", rhs has length " +
                            std::to_string(b.size()));
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) < 1e-300) {
      throw errors::numerical("solve_linear_system: singular matrix at column " +
                              std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) * inv;
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      b[r] -= factor * b[col];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t col = n; col-- > 0;) {
    double acc = b[col];
    for (std::size_t c = col + 1; c < n; ++c) acc -= a(col, c) * x[c];
    x[col] = acc / a(col, col);
  }
  return x;
}

}  // namespace detail

/// Per-station linear autoregression: the tau lagged values (plus an
/// intercept) predict the next value. Coefficients come from ridge-damped
/// normal equations; predictions are one step ahead of each evaluation
/// window's final row.
inline Matrix lr_fit_forecast(const WindowBatch& train_windows, const WindowBatch& eval_windows,
                              double ridge = 1e-8) {
  if (train_windows.size() == 0) {
    throw errors::insufficient_data("lr_fit_forecast: no training windows");
  }
  const std::size_t tau = train_windows.inputs[0].rows();
  const std::size_t n = train_windows.inputs[0].cols();
  const std::size_t dim = tau + 1;  // lags plus intercept
  const std::size_t n_train = train_windows.inputs.size();
  const std::size_t n_eval = eval_windows.inputs.size();

  Matrix out(n_eval, n);
  for (std::size_t j = 0; j < n; ++j) {
    Matrix xtx(dim, dim);
    Vec xty(dim, 0.0);
    for (std::size_t w = 0; w < n_train; ++w) {
      Vec feat(dim, 1.0);
      for (std::size_t t = 0; t < tau; ++t) feat[t] = train_windows.inputs[w](t, j);
      const double y = train_windows.targets[w](tau - 1, j);
      for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) xtx(a, b) += feat[a] * feat[b];
        xty[a] += feat[a] * y;
      }
    }
    for (std::size_t a = 0; a < dim; ++a) xtx(a, a) += ridge;
    const Vec coef = detail::solve_linear_system(xtx, xty);
    for (std::size_t w = 0; w < n_eval; ++w) {
      double pred = coef[tau];
      for (std::size_t t = 0; t < tau; ++t) pred += coef[t] * eval_windows.inputs[w](t, j);
      out(w, j) = pred;
    }
  }
  return out;
}

}  // namespace unkadf
