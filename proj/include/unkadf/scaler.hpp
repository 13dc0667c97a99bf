#pragma once

#include <limits>

#include "unkadf/errors.hpp"
#include "unkadf/matrix.hpp"

namespace unkadf {

/// Per-station min-max normalization. Fit on the training split only; apply
/// maps each station's training range onto [0, 1] and deliberately does not
/// clamp, so out-of-range validation/test values land outside [0, 1].
struct MinMaxScaler {
  Vec per_station_min;
  Vec per_station_max;

  int stations() const { return static_cast<int>(per_station_min.size()); }

  /// A station whose training series never moves scales to 0 everywhere.
  bool constant(int j) const { return per_station_max[j] == per_station_min[j]; }

  static MinMaxScaler fit(const Matrix& train_values) {
    if (train_values.rows() == 0 || train_values.cols() == 0) {
      throw errors::empty_dataset("cannot fit a scaler on an empty matrix");
    }
    MinMaxScaler s;
    s.per_station_min.assign(train_values.cols(), std::numeric_limits<double>::infinity());
    s.per_station_max.assign(train_values.cols(), -std::numeric_limits<double>::infinity());
    for (int t = 0; t < train_values.rows(); ++t) {
      for (int j = 0; j < train_values.cols(); ++j) {
        const double v = train_values(t, j);
        if (v < s.per_station_min[j]) s.per_station_min[j] = v;
        if (v > s.per_station_max[j]) s.per_station_max[j] = v;
      }
    }
    return s;
  }

  double apply_value(double v, int j) const {
    const double range = per_station_max[j] - per_station_min[j];
    if (range == 0.0) return 0.0;
    return (v - per_station_min[j]) / range;
  }

  double invert_value(double v, int j) const {
    const double range = per_station_max[j] - per_station_min[j];
    if (range == 0.0) return per_station_min[j];
    return per_station_min[j] + v * range;
  }

  Matrix apply(const Matrix& x) const {
    check_width(x.cols());
    Matrix y(x.rows(), x.cols());
    for (int t = 0; t < x.rows(); ++t) {
      for (int j = 0; j < x.cols(); ++j) y(t, j) = apply_value(x(t, j), j);
    }
    return y;
  }

  Matrix invert(const Matrix& x) const {
    check_width(x.cols());
    Matrix y(x.rows(), x.cols());
    for (int t = 0; t < x.rows(); ++t) {
      for (int j = 0; j < x.cols(); ++j) y(t, j) = invert_value(x(t, j), j);
    }
    return y;
  }

  Vec invert_row(const Vec& x) const {
    check_width(static_cast<int>(x.size()));
    Vec y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = invert_value(x[j], static_cast<int>(j));
    return y;
  }

 private:
  void check_width(int cols) const {
    if (cols != stations()) {
      throw errors::dimension("scaler fitted for " + std::to_string(stations()) +
                              " stations applied to " + std::to_string(cols));
    }
  }
};

}  // namespace unkadf
