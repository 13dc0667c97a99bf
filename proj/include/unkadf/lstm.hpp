#pragma once

#include <string>
#include <vector>

#include "unkadf/matrix.hpp"
#include "unkadf/param.hpp"

namespace unkadf {

/// Recurrent state (hidden vector and memory cell), zero-initialized at the
/// start of every window.
struct LstmState {
  Vec h, c;

  LstmState() = default;
  explicit LstmState(std::size_t hidden) : h(hidden, 0.0), c(hidden, 0.0) {}
};

/// One LSTM cell: input/forget/output gates via sigmoid, cell candidate via
/// tanh, c_t = f*c_{t-1} + i*g, h_t = o*tanh(c_t). Weight layout:
/// W_* are m x n (input projections), U_* are m x m (recurrent), b_* are m.
struct LstmCellParams {
  Param w_i, w_f, w_o, w_g;
  Param u_i, u_f, u_o, u_g;
  Param b_i, b_f, b_o, b_g;

  LstmCellParams() = default;

  LstmCellParams(const std::string& prefix, std::size_t input_dim, std::size_t hidden_dim,
                 Rng& rng) {
    const std::size_t fan = input_dim + hidden_dim;
    w_i = init_param(prefix + ".W_i", hidden_dim, input_dim, fan, rng);
    w_f = init_param(prefix + ".W_f", hidden_dim, input_dim, fan, rng);
    w_o = init_param(prefix + ".W_o", hidden_dim, input_dim, fan, rng);
    w_g = init_param(prefix + ".W_g", hidden_dim, input_dim, fan, rng);
    u_i = init_param(prefix + ".U_i", hidden_dim, hidden_dim, fan, rng);
    u_f = init_param(prefix + ".U_f", hidden_dim, hidden_dim, fan, rng);
    u_o = init_param(prefix + ".U_o", hidden_dim, hidden_dim, fan, rng);
    u_g = init_param(prefix + ".U_g", hidden_dim, hidden_dim, fan, rng);
    b_i = init_param(prefix + ".b_i", hidden_dim, 1, fan, rng);
    b_f = init_param(prefix + ".b_f", hidden_dim, 1, fan, rng);
    b_o = init_param(prefix + ".b_o", hidden_dim, 1, fan, rng);
    b_g = init_param(prefix + ".b_g", hidden_dim, 1, fan, rng);
  }

  static LstmCellParams zeros(const std::string& prefix, std::size_t input_dim,
                              std::size_t hidden_dim) {
    LstmCellParams p;
    p.w_i = zero_param(prefix + ".W_i", hidden_dim, input_dim);
    p.w_f = zero_param(prefix + ".W_f", hidden_dim, input_dim);
    p.w_o = zero_param(prefix + ".W_o", hidden_dim, input_dim);
    p.w_g = zero_param(prefix + ".W_g", hidden_dim, input_dim);
    p.u_i = zero_param(prefix + ".U_i", hidden_dim, hidden_dim);
    p.u_f = zero_param(prefix + ".U_f", hidden_dim, hidden_dim);
    p.u_o = zero_param(prefix + ".U_o", hidden_dim, hidden_dim);
    p.u_g = zero_param(prefix + ".U_g", hidden_dim, hidden_dim);
    p.b_i = zero_param(prefix + ".b_i", hidden_dim, 1);
    p.b_f = zero_param(prefix + ".b_f", hidden_dim, 1);
    p.b_o = zero_param(prefix + ".b_o", hidden_dim, 1);
    p.b_g = zero_param(prefix + ".b_g", hidden_dim, 1);
    return p;
  }

  std::size_t input_dim() const { return w_i.cols(); }
  std::size_t hidden_dim() const { return w_i.rows(); }

  /// In the declared order: four input projections, four recurrent matrices,
  /// four biases. Serialization and freezing rely on this order.
  std::vector<Param*> params() {
    return {&w_i, &w_f, &w_o, &w_g, &u_i, &u_f, &u_o, &u_g, &b_i, &b_f, &b_o, &b_g};
  }
  std::vector<const Param*> params() const {
    return {&w_i, &w_f, &w_o, &w_g, &u_i, &u_f, &u_o, &u_g, &b_i, &b_f, &b_o, &b_g};
  }

  void set_frozen(bool frozen) {
    for (Param* p : params()) p->frozen = frozen;
  }

  bool bitwise_equal(const LstmCellParams& other) const {
    auto a = params();
    auto b = other.params();
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!(a[k]->value == b[k]->value)) return false;
    return true;
  }
};

/// Everything the backward pass needs from one forward step.
struct LstmStepCache {
  Vec x, h_prev, c_prev;
  Vec i, f, o, g;
  Vec c, tanh_c, h;
};

inline LstmState lstm_step(const LstmCellParams& p, const Vec& x, const LstmState& prev,
                           LstmStepCache* cache = nullptr) {
  const std::size_t m = p.hidden_dim();
  if (x.size() != p.input_dim())
    throw errors::dimension("lstm_step: x has length " + std::to_string(x.size()) +
                            ", cell input dim is " + std::to_string(p.input_dim()));
  if (prev.h.size() != m || prev.c.size() != m)
    throw errors::dimension("lstm_step: state has length " + std::to_string(prev.h.size()) +
                            ", cell hidden dim is " + std::to_string(m));

  Vec ai = matvec(p.w_i.value, x, "lstm_step");
  Vec af = matvec(p.w_f.value, x, "lstm_step");
  Vec ao = matvec(p.w_o.value, x, "lstm_step");
  Vec ag = matvec(p.w_g.value, x, "lstm_step");
  matvec_add(p.u_i.value, prev.h, ai, "lstm_step");
  matvec_add(p.u_f.value, prev.h, af, "lstm_step");
  matvec_add(p.u_o.value, prev.h, ao, "lstm_step");
  matvec_add(p.u_g.value, prev.h, ag, "lstm_step");

  LstmState next(m);
  Vec gate_i(m), gate_f(m), gate_o(m), gate_g(m), tanh_c(m);
  for (std::size_t k = 0; k < m; ++k) {
    gate_i[k] = sigmoid(ai[k] + p.b_i.value(k, 0));
    gate_f[k] = sigmoid(af[k] + p.b_f.value(k, 0));
    gate_o[k] = sigmoid(ao[k] + p.b_o.value(k, 0));
    gate_g[k] = std::tanh(ag[k] + p.b_g.value(k, 0));
    next.c[k] = gate_f[k] * prev.c[k] + gate_i[k] * gate_g[k];
    tanh_c[k] = tanh_act(next.c[k]);
    next.h[k] = gate_o[k] * tanh_c[k];
  }

  if (cache) {
    cache->x = x;
    cache->h_prev = prev.h;
    cache->c_prev = prev.c;
    cache->i = std::move(gate_i);
    cache->f = std::move(gate_f);
    cache->o = std::move(gate_o);
    cache->g = std::move(gate_g);
    cache->c = next.c;
    cache->tanh_c = std::move(tanh_c);
    cache->h = next.h;
  }
  return next;
}

/// Backward through one step. dh and dc are the gradients arriving at this
/// step's outputs (recurrent contributions from t+1 already folded in by the
/// caller). Emits the gradients w.r.t. the previous state and returns dx.
/// Parameter gradients are accumulated scaled by grad_scale unless
/// accumulate_param_grads is false (used for the frozen cell, whose weights
/// never receive an update but whose input gradient must still flow).
inline Vec lstm_step_backward(LstmCellParams& p, const LstmStepCache& cache, const Vec& dh,
                              const Vec& dc_in, Vec& dh_prev_out, Vec& dc_prev_out,
                              double grad_scale = 1.0, bool accumulate_param_grads = true) {
  const std::size_t m = p.hidden_dim();
  Vec da_i(m), da_f(m), da_o(m), da_g(m);
  dc_prev_out.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double i = cache.i[k], f = cache.f[k], o = cache.o[k], g = cache.g[k];
    const double tc = cache.tanh_c[k];
    const double d_o = dh[k] * tc;
    const double dc = dc_in[k] + dh[k] * o * (1.0 - tc * tc);
    const double d_i = dc * g;
    const double d_g = dc * i;
    const double d_f = dc * cache.c_prev[k];
    dc_prev_out[k] = dc * f;
    da_i[k] = d_i * i * (1.0 - i);
    da_f[k] = d_f * f * (1.0 - f);
    da_o[k] = d_o * o * (1.0 - o);
    da_g[k] = d_g * (1.0 - g * g);
  }

  if (accumulate_param_grads) {
    outer_add(p.w_i.grad, da_i, cache.x, grad_scale);
    outer_add(p.w_f.grad, da_f, cache.x, grad_scale);
    outer_add(p.w_o.grad, da_o, cache.x, grad_scale);
    outer_add(p.w_g.grad, da_g, cache.x, grad_scale);
    outer_add(p.u_i.grad, da_i, cache.h_prev, grad_scale);
    outer_add(p.u_f.grad, da_f, cache.h_prev, grad_scale);
    outer_add(p.u_o.grad, da_o, cache.h_prev, grad_scale);
    outer_add(p.u_g.grad, da_g, cache.h_prev, grad_scale);
    for (std::size_t k = 0; k < m; ++k) {
      p.b_i.grad(k, 0) += grad_scale * da_i[k];
      p.b_f.grad(k, 0) += grad_scale * da_f[k];
      p.b_o.grad(k, 0) += grad_scale * da_o[k];
      p.b_g.grad(k, 0) += grad_scale * da_g[k];
    }
  }

  dh_prev_out.assign(m, 0.0);
  matvec_transpose_add(p.u_i.value, da_i, dh_prev_out, "lstm_step_backward");
  matvec_transpose_add(p.u_f.value, da_f, dh_prev_out, "lstm_step_backward");
  matvec_transpose_add(p.u_o.value, da_o, dh_prev_out, "lstm_step_backward");
  matvec_transpose_add(p.u_g.value, da_g, dh_prev_out, "lstm_step_backward");

  Vec dx(p.input_dim(), 0.0);
  matvec_transpose_add(p.w_i.value, da_i, dx, "lstm_step_backward");
  matvec_transpose_add(p.w_f.value, da_f, dx, "lstm_step_backward");
  matvec_transpose_add(p.w_o.value, da_o, dx, "lstm_step_backward");
  matvec_transpose_add(p.w_g.value, da_g, dx, "lstm_step_backward");
  return dx;
}

/// Runs a whole window from zero state, recording per-step caches.
struct LstmSequenceCache {
  std::vector<LstmStepCache> steps;
};

inline void lstm_run(const LstmCellParams& p, const std::vector<Vec>& xs,
                     std::vector<Vec>& h_seq, std::vector<Vec>& c_seq,
                     LstmSequenceCache* cache = nullptr) {
  LstmState state(p.hidden_dim());
  h_seq.clear();
  c_seq.clear();
  h_seq.reserve(xs.size());
  c_seq.reserve(xs.size());
  if (cache) cache->steps.resize(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    state = lstm_step(p, xs[t], state, cache ? &cache->steps[t] : nullptr);
    h_seq.push_back(state.h);
    c_seq.push_back(state.c);
  }
}

/// Backpropagation through time over one window. dh_ext[t] / dc_ext[t] are
/// the loss gradients injected at step t (either may be empty meaning zero).
/// Returns dx per step; accumulates parameter gradients scaled by grad_scale.
inline std::vector<Vec> lstm_backward(LstmCellParams& p, const LstmSequenceCache& cache,
                                      const std::vector<Vec>& dh_ext,
                                      const std::vector<Vec>& dc_ext,
                                      double grad_scale = 1.0,
                                      bool accumulate_param_grads = true) {
  const std::size_t steps = cache.steps.size();
  const std::size_t m = p.hidden_dim();
  std::vector<Vec> dxs(steps);
  Vec dh_carry(m, 0.0), dc_carry(m, 0.0);
  for (std::size_t t = steps; t-- > 0;) {
    Vec dh = dh_carry;
    Vec dc = dc_carry;
    if (!dh_ext.empty() && !dh_ext[t].empty()) axpy(dh, dh_ext[t]);
    if (!dc_ext.empty() && !dc_ext[t].empty()) axpy(dc, dc_ext[t]);
    dxs[t] = lstm_step_backward(p, cache.steps[t], dh, dc, dh_carry, dc_carry, grad_scale,
                                accumulate_param_grads);
  }
  return dxs;
}

}  // namespace unkadf
