#pragma once

#include <string>

#include "unkadf/matrix.hpp"
#include "unkadf/param.hpp"

namespace unkadf {

/// Affine map plus tanh: y = tanh(W x + b). Used for the demand encoders,
/// the reconstruction decoders, and the prediction heads.
struct DenseParams {
  Param w;
  Param b;  // k x 1

  DenseParams() = default;
  DenseParams(const std::string& prefix, std::size_t out_dim, std::size_t in_dim, Rng& rng)
      : w(init_param(prefix + ".W", out_dim, in_dim, in_dim, rng)),
        b(init_param(prefix + ".b", out_dim, 1, in_dim, rng)) {}

  std::size_t out_dim() const { return w.rows(); }
  std::size_t in_dim() const { return w.cols(); }

  std::vector<Param*> params() { return {&w, &b}; }
};

inline Vec dense_forward(const DenseParams& d, const Vec& x) {
  Vec y = matvec(d.w.value, x, "dense_forward");
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = tanh_act(y[k] + d.b.value(k, 0));
  return y;
}

/// Backward pass given the cached input x and output y; accumulates dW and db
/// into the parameter gradient slots (scaled by grad_scale) and returns dx.
inline Vec dense_backward(DenseParams& d, const Vec& x, const Vec& y, const Vec& dy,
                          double grad_scale = 1.0) {
  if (dy.size() != d.out_dim() || y.size() != d.out_dim())
    throw errors::dimension("dense_backward: dy has length " + std::to_string(dy.size()) +
                            ", layer output dim is " + std::to_string(d.out_dim()));
  Vec da(d.out_dim());
  for (std::size_t k = 0; k < da.size(); ++k) {
    da[k] = dy[k] * (1.0 - y[k] * y[k]);  // tanh'
    d.b.grad(k, 0) += grad_scale * da[k];
  }
  outer_add(d.w.grad, da, x, grad_scale);
  Vec dx(d.in_dim(), 0.0);
  matvec_transpose_add(d.w.value, da, dx, "dense_backward");
  return dx;
}

}  // namespace unkadf
