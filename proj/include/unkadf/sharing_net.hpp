#pragma once

#include <string>
#include <vector>

#include "unkadf/artifact.hpp"
#include "unkadf/dense.hpp"
#include "unkadf/errors.hpp"
#include "unkadf/lstm.hpp"
#include "unkadf/matrix.hpp"

namespace unkadf {

struct LossTerms {
  double total = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
};

/// Target-side network. The raw demand row is encoded twice (individual and
/// sharing parts), each part runs through its own LSTM, and the frozen
/// source cell consumes the sharing part in parallel so the alignment loss
/// can pull lstm_h toward the source patterns. Decoder and frozen cell are
/// optional so the ablation variants can drop them.
struct SharingNet {
  DenseParams encoder_i;  // K x N_P, individual part
  DenseParams encoder_h;  // K x N_P, sharing part
  LstmCellParams lstm_i;  // input K, hidden m
  LstmCellParams lstm_h;
  DenseParams predictor;  // N_P x 2m on [h_PI ; h_PH]
  bool has_decoder = false;
  DenseParams decoder;  // N_P x 2K on [X_PI ; X_PH]
  bool has_lstm_a = false;
  LstmCellParams lstm_a;  // frozen, loaded from the artifact

  SharingNet() = default;

  /// Draw order is part of the determinism contract: the five parameters
  /// shared by every variant first, the decoder last, so dropping the
  /// decoder or the frozen cell does not shift the initialization stream of
  /// the remaining weights.
  SharingNet(std::size_t n_p, std::size_t k, std::size_t m, bool with_decoder,
             const PretrainedArtifact* artifact, Rng& rng)
      : encoder_i("encoder_I", k, n_p, rng),
        encoder_h("encoder_H", k, n_p, rng),
        lstm_i("lstm_I", k, m, rng),
        lstm_h("lstm_H", k, m, rng),
        predictor("predictor", n_p, 2 * m, rng),
        has_decoder(with_decoder) {
    if (with_decoder) decoder = DenseParams("decoder", n_p, 2 * k, rng);
    if (artifact != nullptr) {
      if (artifact->embed_dim != static_cast<int>(k) ||
          artifact->hidden_dim != static_cast<int>(m)) {
        throw errors::incompatible_artifact(
            "artifact has K=" + std::to_string(artifact->embed_dim) + " m=" +
            std::to_string(artifact->hidden_dim) + ", run configured K=" + std::to_string(k) +
            " m=" + std::to_string(m));
      }
      has_lstm_a = true;
      lstm_a = artifact->lstm_a;
      lstm_a.set_frozen(true);
    }
  }

  std::size_t stations() const { return encoder_i.in_dim(); }
  std::size_t embed_dim() const { return encoder_i.out_dim(); }
  std::size_t hidden_dim() const { return lstm_i.hidden_dim(); }

  /// Learnable parameters plus (last) the frozen cell, which the optimizer
  /// skips but the frozen-invariance check wants to see.
  std::vector<Param*> params() {
    std::vector<Param*> out = encoder_i.params();
    for (Param* p : encoder_h.params()) out.push_back(p);
    for (Param* p : lstm_i.params()) out.push_back(p);
    for (Param* p : lstm_h.params()) out.push_back(p);
    for (Param* p : predictor.params()) out.push_back(p);
    if (has_decoder) {
      for (Param* p : decoder.params()) out.push_back(p);
    }
    if (has_lstm_a) {
      for (Param* p : lstm_a.params()) out.push_back(p);
    }
    return out;
  }
};

struct SharingForward {
  Matrix predictions;      // tau x N_P
  Matrix reconstructions;  // tau x N_P, empty without a decoder
  Matrix c_ph_seq;         // tau x m
  Matrix c_ps_seq;         // tau x m, empty without the frozen cell
  std::vector<Vec> enc_i, enc_h;
  std::vector<Vec> concat_h;  // [h_PI ; h_PH] per step
  std::vector<Vec> concat_x;  // [X_PI ; X_PH] per step
  LstmSequenceCache lstm_i_cache, lstm_h_cache, lstm_a_cache;
};

/// All three recurrences keep independent states, zero-initialized at the
/// window start; the frozen cell reads the sharing part X_PH.
inline SharingForward sharing_forward(const SharingNet& net, const Matrix& window) {
  if (window.cols() != net.stations()) {
    throw errors::dimension("sharing_forward: window has " + std::to_string(window.cols()) +
                            " stations, net expects " + std::to_string(net.stations()));
  }
  const std::size_t tau = window.rows();
  const std::size_t m = net.hidden_dim();

  SharingForward fwd;
  fwd.enc_i.reserve(tau);
  fwd.enc_h.reserve(tau);
  for (std::size_t t = 0; t < tau; ++t) {
    fwd.enc_i.push_back(dense_forward(net.encoder_i, window.row(t)));
    fwd.enc_h.push_back(dense_forward(net.encoder_h, window.row(t)));
  }

  std::vector<Vec> h_i, c_i, h_h, c_h;
  lstm_run(net.lstm_i, fwd.enc_i, h_i, c_i, &fwd.lstm_i_cache);
  lstm_run(net.lstm_h, fwd.enc_h, h_h, c_h, &fwd.lstm_h_cache);

  fwd.predictions = Matrix(tau, net.stations());
  fwd.c_ph_seq = Matrix(tau, m);
  fwd.concat_h.reserve(tau);
  fwd.concat_x.reserve(tau);
  for (std::size_t t = 0; t < tau; ++t) {
    fwd.concat_h.push_back(concat(h_i[t], h_h[t]));
    fwd.predictions.set_row(t, dense_forward(net.predictor, fwd.concat_h[t]));
    fwd.c_ph_seq.set_row(t, c_h[t]);
  }

  if (net.has_decoder) {
    fwd.reconstructions = Matrix(tau, net.stations());
    for (std::size_t t = 0; t < tau; ++t) {
      fwd.concat_x.push_back(concat(fwd.enc_i[t], fwd.enc_h[t]));
      fwd.reconstructions.set_row(t, dense_forward(net.decoder, fwd.concat_x[t]));
    }
  }

  if (net.has_lstm_a) {
    std::vector<Vec> h_a, c_a;
    lstm_run(net.lstm_a, fwd.enc_h, h_a, c_a, &fwd.lstm_a_cache);
    fwd.c_ps_seq = Matrix(tau, m);
    for (std::size_t t = 0; t < tau; ++t) fwd.c_ps_seq.set_row(t, c_a[t]);
  }
  return fwd;
}

/// L1 prediction error, gamma-weighted L2 reconstruction error, beta-weighted
/// L3 cell alignment, each an element-averaged mean squared error. Absent
/// components contribute exact zeros.
inline LossTerms unkadf_loss(const SharingForward& fwd, const Matrix& inputs, const Matrix& targets,
                             double gamma, double beta) {
  if (gamma < 0.0 || beta < 0.0) {
    throw errors::config("gamma and beta must be non-negative, got gamma=" +
                         std::to_string(gamma) + " beta=" + std::to_string(beta));
  }
  LossTerms terms;
  terms.l1 = mse(fwd.predictions, targets);
  if (fwd.reconstructions.size() > 0) terms.l2 = mse(fwd.reconstructions, inputs);
  if (fwd.c_ps_seq.size() > 0) terms.l3 = mse(fwd.c_ph_seq, fwd.c_ps_seq);
  terms.total = terms.l1 + gamma * terms.l2 + beta * terms.l3;
  return terms;
}

/// Accumulates gradients of the weighted loss for one window. The frozen
/// cell's weights receive no gradient, but the L3 signal still flows through
/// it into encoder_h (that path is the whole point of the alignment).
inline void sharing_backward(SharingNet& net, const SharingForward& fwd, const Matrix& inputs,
                             const Matrix& targets, double gamma, double beta,
                             double grad_scale = 1.0) {
  const std::size_t tau = inputs.rows();
  const std::size_t m = net.hidden_dim();
  const std::size_t k = net.embed_dim();
  const double denom_pred = static_cast<double>(fwd.predictions.size());

  std::vector<Vec> dh_i(tau), dh_h(tau);
  std::vector<Vec> d_enc_i(tau, Vec(k, 0.0)), d_enc_h(tau, Vec(k, 0.0));
  for (std::size_t t = 0; t < tau; ++t) {
    Vec dpred(net.stations());
    for (std::size_t j = 0; j < dpred.size(); ++j) {
      dpred[j] = 2.0 * (fwd.predictions(t, j) - targets(t, j)) / denom_pred;
    }
    const Vec d_concat =
        dense_backward(net.predictor, fwd.concat_h[t], fwd.predictions.row(t), dpred, grad_scale);
    dh_i[t].assign(d_concat.begin(), d_concat.begin() + m);
    dh_h[t].assign(d_concat.begin() + m, d_concat.end());
  }

  if (net.has_decoder && gamma != 0.0) {
    const double denom_rec = static_cast<double>(fwd.reconstructions.size());
    for (std::size_t t = 0; t < tau; ++t) {
      Vec drec(net.stations());
      for (std::size_t j = 0; j < drec.size(); ++j) {
        drec[j] = gamma * 2.0 * (fwd.reconstructions(t, j) - inputs(t, j)) / denom_rec;
      }
      const Vec d_concat = dense_backward(net.decoder, fwd.concat_x[t],
                                          fwd.reconstructions.row(t), drec, grad_scale);
      for (std::size_t i = 0; i < k; ++i) {
        d_enc_i[t][i] += d_concat[i];
        d_enc_h[t][i] += d_concat[k + i];
      }
    }
  }

  std::vector<Vec> dc_ph(tau), dc_ps(tau);
  const bool align = net.has_lstm_a && beta != 0.0;
  if (align) {
    const double denom_cell = static_cast<double>(fwd.c_ph_seq.size());
    for (std::size_t t = 0; t < tau; ++t) {
      dc_ph[t].assign(m, 0.0);
      dc_ps[t].assign(m, 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        const double d = beta * 2.0 * (fwd.c_ph_seq(t, j) - fwd.c_ps_seq(t, j)) / denom_cell;
        dc_ph[t][j] = d;
        dc_ps[t][j] = -d;
      }
    }
  }

  const std::vector<Vec> dx_i =
      lstm_backward(net.lstm_i, fwd.lstm_i_cache, dh_i, {}, grad_scale);
  const std::vector<Vec> dx_h =
      lstm_backward(net.lstm_h, fwd.lstm_h_cache, dh_h, align ? dc_ph : std::vector<Vec>{},
                    grad_scale);
  for (std::size_t t = 0; t < tau; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      d_enc_i[t][i] += dx_i[t][i];
      d_enc_h[t][i] += dx_h[t][i];
    }
  }

  if (align) {
    const std::vector<Vec> dx_a = lstm_backward(net.lstm_a, fwd.lstm_a_cache, {}, dc_ps,
                                                grad_scale, /*accumulate_param_grads=*/false);
    for (std::size_t t = 0; t < tau; ++t) {
      for (std::size_t i = 0; i < k; ++i) d_enc_h[t][i] += dx_a[t][i];
    }
  }

  for (std::size_t t = 0; t < tau; ++t) {
    dense_backward(net.encoder_i, inputs.row(t), fwd.enc_i[t], d_enc_i[t], grad_scale);
    dense_backward(net.encoder_h, inputs.row(t), fwd.enc_h[t], d_enc_h[t], grad_scale);
  }
}

}  // namespace unkadf
