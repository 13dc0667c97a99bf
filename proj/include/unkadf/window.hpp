#pragma once

#include <vector>

#include "unkadf/errors.hpp"
#include "unkadf/matrix.hpp"

namespace unkadf {

/// Stride-1 sliding windows over one normalized split. Sample k feeds rows
/// k..k+tau-1 and is supervised by the same rows shifted one step forward,
/// so targets[b] row t is the series at step k+t+1.
struct WindowBatch {
  std::vector<Matrix> inputs;   // each tau x N
  std::vector<Matrix> targets;  // each tau x N
  std::vector<int> window_start_indices;

  int size() const { return static_cast<int>(inputs.size()); }
};

inline WindowBatch make_windows(const Matrix& series, int tau) {
  if (tau < 1) throw errors::config("window length must be >= 1, got " + std::to_string(tau));
  const int t_steps = series.rows();
  if (t_steps <= tau) {
    throw errors::insufficient_data(std::to_string(t_steps) + " steps cannot host a window of length " +
                                    std::to_string(tau));
  }

  WindowBatch batch;
  const int count = t_steps - tau;
  batch.inputs.reserve(count);
  batch.targets.reserve(count);
  for (int k = 0; k < count; ++k) {
    Matrix input(tau, series.cols());
    Matrix target(tau, series.cols());
    for (int t = 0; t < tau; ++t) {
      for (int j = 0; j < series.cols(); ++j) {
        input(t, j) = series(k + t, j);
        target(t, j) = series(k + t + 1, j);
      }
    }
    batch.inputs.push_back(std::move(input));
    batch.targets.push_back(std::move(target));
    batch.window_start_indices.push_back(k);
  }
  return batch;
}

}  // namespace unkadf
