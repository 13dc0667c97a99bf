#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "unkadf/errors.hpp"

namespace unkadf {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. The whole toolkit runs in double
/// precision; activations are plain Vec, weights and gradients are Matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != m.cols_)
        throw errors::dimension("Matrix::from_rows: ragged initializer");
      std::size_t c = 0;
      for (double v : row) m(r, c++) = v;
      ++r;
    }
    return m;
  }

  static Matrix from_rows(const std::vector<Vec>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols_)
        throw errors::dimension("Matrix::from_rows: ragged rows");
      for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  double* row_ptr(std::size_t r) noexcept { return data_.data() + r * cols_; }
  const double* row_ptr(std::size_t r) const noexcept { return data_.data() + r * cols_; }

  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(double v) { data_.assign(data_.size(), v); }

  Vec row(std::size_t r) const {
    return Vec(row_ptr(r), row_ptr(r) + cols_);
  }

  void set_row(std::size_t r, const Vec& v) {
    if (v.size() != cols_)
      throw errors::dimension("Matrix::set_row: row length " + std::to_string(v.size()) +
                              " != cols " + std::to_string(cols_));
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = v[c];
  }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(const Matrix& m) { return all_finite(m.values()); }

/// y = W x  (W is k x n, x has length n).
inline Vec matvec(const Matrix& w, const Vec& x, const char* who = "matvec") {
  if (x.size() != w.cols())
    throw errors::dimension(std::string(who) + ": W is " + shape_str(w) +
                            ", x has length " + std::to_string(x.size()));
  Vec y(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double* wr = w.row_ptr(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) acc += wr[c] * x[c];
    y[r] = acc;
  }
  return y;
}

/// y += W x  (accumulates the product into y, length k).
inline void matvec_add(const Matrix& w, const Vec& x, Vec& y,
                       const char* who = "matvec_add") {
  if (x.size() != w.cols() || y.size() != w.rows())
    throw errors::dimension(std::string(who) + ": W is " + shape_str(w) +
                            ", x has length " + std::to_string(x.size()) +
                            ", y has length " + std::to_string(y.size()));
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double* wr = w.row_ptr(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) acc += wr[c] * x[c];
    y[r] += acc;
  }
}

/// y += W^T d  (accumulates the transpose product into y, length n).
inline void matvec_transpose_add(const Matrix& w, const Vec& d, Vec& y,
                                 const char* who = "matvec_transpose_add") {
  if (d.size() != w.rows() || y.size() != w.cols())
    throw errors::dimension(std::string(who) + ": W is " + shape_str(w) +
                            ", d has length " + std::to_string(d.size()) +
                            ", y has length " + std::to_string(y.size()));
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double* wr = w.row_ptr(r);
    const double dr = d[r];
    if (dr == 0.0) continue;
    for (std::size_t c = 0; c < w.cols(); ++c) y[c] += dr * wr[c];
  }
}

/// A += scale * d x^T  (rank-one update, d length = rows, x length = cols).
inline void outer_add(Matrix& a, const Vec& d, const Vec& x, double scale = 1.0) {
  if (d.size() != a.rows() || x.size() != a.cols())
    throw errors::dimension("outer_add: A is " + shape_str(a) + ", d has length " +
                            std::to_string(d.size()) + ", x has length " +
                            std::to_string(x.size()));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double* ar = a.row_ptr(r);
    const double dr = scale * d[r];
    if (dr == 0.0) continue;
    for (std::size_t c = 0; c < a.cols(); ++c) ar[c] += dr * x[c];
  }
}

inline void axpy(Vec& y, const Vec& x, double scale = 1.0) {
  if (y.size() != x.size())
    throw errors::dimension("axpy: lengths " + std::to_string(y.size()) + " vs " +
                            std::to_string(x.size()));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * x[i];
}

/// Mean of squared elementwise differences.
inline double mse(const Matrix& pred, const Matrix& actual) {
  if (!pred.same_shape(actual))
    throw errors::dimension("mse: pred is " + shape_str(pred) + ", actual is " +
                            shape_str(actual));
  if (pred.size() == 0) throw errors::dimension("mse: empty operands");
  double acc = 0.0;
  const double* p = pred.data();
  const double* a = actual.data();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = p[i] - a[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

inline double mse(const Vec& pred, const Vec& actual) {
  if (pred.size() != actual.size())
    throw errors::dimension("mse: lengths " + std::to_string(pred.size()) + " vs " +
                            std::to_string(actual.size()));
  if (pred.empty()) throw errors::dimension("mse: empty operands");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

inline double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

/// tanh clamped to the open interval: std::tanh rounds to exactly +/-1.0 for
/// |u| above ~19, which would break the strict (-1, 1) output contract of the
/// activation layers and of hidden states.
inline double tanh_act(double u) {
  const double y = std::tanh(u);
  if (y >= 1.0) return std::nextafter(1.0, 0.0);
  if (y <= -1.0) return std::nextafter(-1.0, 0.0);
  return y;
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace unkadf
