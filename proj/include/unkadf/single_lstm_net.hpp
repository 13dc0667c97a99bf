#pragma once

#include <string>
#include <vector>

#include "unkadf/artifact.hpp"
#include "unkadf/dense.hpp"
#include "unkadf/errors.hpp"
#include "unkadf/lstm.hpp"
#include "unkadf/matrix.hpp"

namespace unkadf {

/// Plain recurrent baseline: raw demand rows straight into one LSTM, then a
/// dense head back to station space. No encoder, no auxiliary losses.
struct SingleLstmNet {
  LstmCellParams lstm;    // input N_P, hidden m
  DenseParams predictor;  // N_P x m

  SingleLstmNet() = default;

  SingleLstmNet(std::size_t n_p, std::size_t m, Rng& rng)
      : lstm("lstm", n_p, m, rng), predictor("predictor", n_p, m, rng) {}

  std::size_t stations() const { return lstm.input_dim(); }
  std::size_t hidden_dim() const { return lstm.hidden_dim(); }

  std::vector<Param*> params() {
    std::vector<Param*> out = lstm.params();
    for (Param* p : predictor.params()) out.push_back(p);
    return out;
  }
};

struct SingleLstmForward {
  Matrix predictions;  // tau x N_P
  std::vector<Vec> states_h;
  LstmSequenceCache lstm_cache;
};

inline SingleLstmForward single_lstm_forward(const SingleLstmNet& net, const Matrix& window) {
  if (window.cols() != net.stations()) {
    throw errors::dimension("single_lstm_forward: window has " + std::to_string(window.cols()) +
                            " stations, net expects " + std::to_string(net.stations()));
  }
  const std::size_t tau = window.rows();
  std::vector<Vec> xs;
  xs.reserve(tau);
  for (std::size_t t = 0; t < tau; ++t) xs.push_back(window.row(t));

  SingleLstmForward fwd;
  std::vector<Vec> c_seq;
  lstm_run(net.lstm, xs, fwd.states_h, c_seq, &fwd.lstm_cache);
  fwd.predictions = Matrix(tau, net.stations());
  for (std::size_t t = 0; t < tau; ++t) {
    fwd.predictions.set_row(t, dense_forward(net.predictor, fwd.states_h[t]));
  }
  return fwd;
}

/// Accumulates gradients of the element-averaged squared prediction error.
inline void single_lstm_backward(SingleLstmNet& net, const SingleLstmForward& fwd,
                                 const Matrix& targets, double grad_scale = 1.0) {
  const std::size_t tau = targets.rows();
  const double denom = static_cast<double>(fwd.predictions.size());
  std::vector<Vec> dh(tau);
  for (std::size_t t = 0; t < tau; ++t) {
    Vec dpred(net.stations());
    for (std::size_t j = 0; j < dpred.size(); ++j) {
      dpred[j] = 2.0 * (fwd.predictions(t, j) - targets(t, j)) / denom;
    }
    dh[t] = dense_backward(net.predictor, fwd.states_h[t], fwd.predictions.row(t), dpred,
                           grad_scale);
  }
  lstm_backward(net.lstm, fwd.lstm_cache, dh, {}, grad_scale);
}

/// Transfer baseline: the pretrained cell is copied in as a warm start and
/// then trained like any other weight. Encoder and predictor start fresh.
struct FineTuneNet {
  DenseParams encoder;  // K x N_P
  LstmCellParams lstm;  // input K, hidden m, copied from the artifact
  DenseParams predictor;  // N_P x m

  FineTuneNet() = default;

  FineTuneNet(std::size_t n_p, std::size_t k, std::size_t m, const PretrainedArtifact& artifact,
              Rng& rng)
      : encoder("encoder", k, n_p, rng), predictor("predictor", n_p, m, rng) {
    if (artifact.embed_dim != static_cast<int>(k) || artifact.hidden_dim != static_cast<int>(m)) {
      throw errors::incompatible_artifact(
          "artifact has K=" + std::to_string(artifact.embed_dim) + " m=" +
          std::to_string(artifact.hidden_dim) + ", run configured K=" + std::to_string(k) +
          " m=" + std::to_string(m));
    }
    lstm = artifact.lstm_a;
    lstm.set_frozen(false);
  }

  std::size_t stations() const { return encoder.in_dim(); }
  std::size_t embed_dim() const { return encoder.out_dim(); }
  std::size_t hidden_dim() const { return lstm.hidden_dim(); }

  std::vector<Param*> params() {
    std::vector<Param*> out = encoder.params();
    for (Param* p : lstm.params()) out.push_back(p);
    for (Param* p : predictor.params()) out.push_back(p);
    return out;
  }
};

struct FineTuneForward {
  Matrix predictions;  // tau x N_P
  std::vector<Vec> encoded;
  std::vector<Vec> states_h;
  LstmSequenceCache lstm_cache;
};

inline FineTuneForward finetune_forward(const FineTuneNet& net, const Matrix& window) {
  if (window.cols() != net.stations()) {
    throw errors::dimension("finetune_forward: window has " + std::to_string(window.cols()) +
                            " stations, net expects " + std::to_string(net.stations()));
  }
  const std::size_t tau = window.rows();
  FineTuneForward fwd;
  fwd.encoded.reserve(tau);
  for (std::size_t t = 0; t < tau; ++t) {
    fwd.encoded.push_back(dense_forward(net.encoder, window.row(t)));
  }
  std::vector<Vec> c_seq;
  lstm_run(net.lstm, fwd.encoded, fwd.states_h, c_seq, &fwd.lstm_cache);
  fwd.predictions = Matrix(tau, net.stations());
  for (std::size_t t = 0; t < tau; ++t) {
    fwd.predictions.set_row(t, dense_forward(net.predictor, fwd.states_h[t]));
  }
  return fwd;
}

inline void finetune_backward(FineTuneNet& net, const FineTuneForward& fwd, const Matrix& inputs,
                              const Matrix& targets, double grad_scale = 1.0) {
  const std::size_t tau = targets.rows();
  const double denom = static_cast<double>(fwd.predictions.size());
  std::vector<Vec> dh(tau);
  for (std::size_t t = 0; t < tau; ++t) {
    Vec dpred(net.stations());
    for (std::size_t j = 0; j < dpred.size(); ++j) {
      dpred[j] = 2.0 * (fwd.predictions(t, j) - targets(t, j)) / denom;
    }
    dh[t] = dense_backward(net.predictor, fwd.states_h[t], fwd.predictions.row(t), dpred,
                           grad_scale);
  }
  const std::vector<Vec> dx = lstm_backward(net.lstm, fwd.lstm_cache, dh, {}, grad_scale);
  for (std::size_t t = 0; t < tau; ++t) {
    dense_backward(net.encoder, inputs.row(t), fwd.encoded[t], dx[t], grad_scale);
  }
}

}  // namespace unkadf
