#pragma once

#include <string>
#include <vector>

#include "unkadf/artifact.hpp"
#include "unkadf/dense.hpp"
#include "unkadf/errors.hpp"
#include "unkadf/lstm.hpp"
#include "unkadf/matrix.hpp"

namespace unkadf {

/// Source-side network: encoder to K dims, the adaptable LSTM cell, a
/// prediction head back to station space, and a reconstruction decoder.
/// Everything is trainable; only lstm_a leaves the institution afterwards.
struct PretrainNet {
  DenseParams encoder;    // K x N_S
  LstmCellParams lstm_a;  // input K, hidden m
  DenseParams predictor;  // N_S x m
  DenseParams decoder;    // N_S x K

  PretrainNet() = default;

  PretrainNet(std::size_t n_s, std::size_t k, std::size_t m, Rng& rng)
      : encoder("encoder", k, n_s, rng),
        lstm_a("lstm_A", k, m, rng),
        predictor("predictor", n_s, m, rng),
        decoder("decoder", n_s, k, rng) {}

  std::size_t stations() const { return encoder.in_dim(); }
  std::size_t embed_dim() const { return encoder.out_dim(); }
  std::size_t hidden_dim() const { return lstm_a.hidden_dim(); }

  std::vector<Param*> params() {
    std::vector<Param*> out = encoder.params();
    for (Param* p : lstm_a.params()) out.push_back(p);
    for (Param* p : predictor.params()) out.push_back(p);
    for (Param* p : decoder.params()) out.push_back(p);
    return out;
  }
};

struct PretrainForward {
  Matrix predictions;      // tau x N_S, one-step-ahead per window position
  Matrix reconstructions;  // tau x N_S
  std::vector<Vec> encoded;
  std::vector<LstmState> states;
  LstmSequenceCache lstm_cache;
};

/// Teacher-forced pass over one window: every step consumes the ground-truth
/// row, never a previous prediction.
inline PretrainForward pretrain_forward(const PretrainNet& net, const Matrix& window) {
  if (window.cols() != net.stations()) {
    throw errors::dimension("pretrain_forward: window has " + std::to_string(window.cols()) +
                            " stations, net expects " + std::to_string(net.stations()));
  }
  const std::size_t tau = window.rows();
  PretrainForward fwd;
  fwd.predictions = Matrix(tau, net.stations());
  fwd.reconstructions = Matrix(tau, net.stations());
  fwd.encoded.reserve(tau);

  std::vector<Vec> h_seq, c_seq;
  for (std::size_t t = 0; t < tau; ++t) fwd.encoded.push_back(dense_forward(net.encoder, window.row(t)));
  lstm_run(net.lstm_a, fwd.encoded, h_seq, c_seq, &fwd.lstm_cache);

  fwd.states.reserve(tau);
  for (std::size_t t = 0; t < tau; ++t) {
    LstmState s;
    s.h = h_seq[t];
    s.c = c_seq[t];
    fwd.states.push_back(std::move(s));
    fwd.predictions.set_row(t, dense_forward(net.predictor, h_seq[t]));
    fwd.reconstructions.set_row(t, dense_forward(net.decoder, fwd.encoded[t]));
  }
  return fwd;
}

/// Prediction error against the shifted targets plus reconstruction error
/// against the raw inputs, both as element-averaged mean squared error.
inline double pretrain_loss(const Matrix& predictions, const Matrix& reconstructions,
                            const Matrix& targets, const Matrix& inputs) {
  return mse(predictions, targets) + mse(reconstructions, inputs);
}

/// Accumulates gradients of pretrain_loss for one window into net's params,
/// scaled by grad_scale (1/batch for batch averaging).
inline void pretrain_backward(PretrainNet& net, const PretrainForward& fwd, const Matrix& inputs,
                              const Matrix& targets, double grad_scale = 1.0) {
  const std::size_t tau = inputs.rows();
  const double denom = static_cast<double>(fwd.predictions.size());

  std::vector<Vec> dh_ext(tau);
  std::vector<Vec> dc_ext;  // no direct cell-state loss here
  std::vector<Vec> d_encoded(tau);
  for (std::size_t t = 0; t < tau; ++t) {
    Vec dpred(net.stations());
    for (std::size_t j = 0; j < dpred.size(); ++j) {
      dpred[j] = 2.0 * (fwd.predictions(t, j) - targets(t, j)) / denom;
    }
    dh_ext[t] = dense_backward(net.predictor, fwd.states[t].h, fwd.predictions.row(t), dpred,
                               grad_scale);

    Vec drec(net.stations());
    for (std::size_t j = 0; j < drec.size(); ++j) {
      drec[j] = 2.0 * (fwd.reconstructions(t, j) - inputs(t, j)) / denom;
    }
    d_encoded[t] = dense_backward(net.decoder, fwd.encoded[t], fwd.reconstructions.row(t), drec,
                                  grad_scale);
  }

  const std::vector<Vec> dx = lstm_backward(net.lstm_a, fwd.lstm_cache, dh_ext, dc_ext, grad_scale);
  for (std::size_t t = 0; t < tau; ++t) {
    for (std::size_t k = 0; k < d_encoded[t].size(); ++k) d_encoded[t][k] += dx[t][k];
    dense_backward(net.encoder, inputs.row(t), fwd.encoded[t], d_encoded[t], grad_scale);
  }
}

/// Extracts the shareable artifact: lstm_a plus dims and metadata, nothing
/// else crosses the boundary.
inline PretrainedArtifact make_artifact(const PretrainNet& net, const ArtifactMetadata& metadata) {
  PretrainedArtifact a;
  a.embed_dim = static_cast<int>(net.embed_dim());
  a.hidden_dim = static_cast<int>(net.hidden_dim());
  a.lstm_a = net.lstm_a;
  a.metadata = metadata;
  return a;
}

inline std::string save_artifact(const PretrainNet& net, const ArtifactMetadata& metadata,
                                 const std::string& path) {
  return save_artifact(make_artifact(net, metadata), path);
}

}  // namespace unkadf
