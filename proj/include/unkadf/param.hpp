#pragma once

#include <string>
#include <utility>
#include <vector>

#include "unkadf/matrix.hpp"
#include "unkadf/rng.hpp"

namespace unkadf {

/// A named trainable tensor. Bias vectors are stored as k x 1 matrices so
/// that the gradient slot, the Adam moments, and serialization treat every
/// parameter uniformly. Frozen parameters keep receiving gradient (gradient
/// flow through them is needed for upstream updates) but are never touched
/// by the optimizer.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m1;  // Adam first moment
  Matrix m2;  // Adam second moment
  bool frozen = false;

  Param() = default;
  Param(std::string n, Matrix v)
      : name(std::move(n)),
        value(std::move(v)),
        grad(value.rows(), value.cols()),
        m1(value.rows(), value.cols()),
        m2(value.rows(), value.cols())
  {}

  std::size_t rows() const { return value.rows(); }
  std::size_t cols() const { return value.cols(); }

  void zero_grad() { grad.fill(0.0); }

  /// Column-vector view helpers for bias parameters.
  Vec as_vec() const { return value.values(); }
};

/// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], the initialization used for
/// every weight matrix; keeps tanh/sigmoid pre-activations in their active
/// range at the hidden sizes used here.
inline Param init_param(std::string name, std::size_t rows, std::size_t cols,
                        std::size_t fan_in, Rng& rng) {
  Matrix v(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& x : v.values()) x = rng.uniform(-bound, bound);
  return Param(std::move(name), std::move(v));
}

inline Param zero_param(std::string name, std::size_t rows, std::size_t cols) {
  return Param(std::move(name), Matrix(rows, cols));
}

inline void zero_grads(const std::vector<Param*>& params) {
  for (Param* p : params) p->zero_grad();
}

inline bool params_finite(const std::vector<Param*>& params) {
  for (const Param* p : params)
    if (!all_finite(p->value)) return false;
  return true;
}

}  // namespace unkadf
