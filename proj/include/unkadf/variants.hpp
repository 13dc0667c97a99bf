#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unkadf/artifact.hpp"
#include "unkadf/errors.hpp"
#include "unkadf/matrix.hpp"
#include "unkadf/sharing_net.hpp"
#include "unkadf/single_lstm_net.hpp"

namespace unkadf {

enum class VariantKind {
  Lstm,
  EncoderLstm,
  EncoderDecoder,
  EncoderAdaptation,
  UnKadf,
  FineTune,
  Ha,
  Lr,
};

inline const char* variant_name(VariantKind kind) {
  switch (kind) {
    case VariantKind::Lstm: return "lstm";
    case VariantKind::EncoderLstm: return "encoder-lstm";
    case VariantKind::EncoderDecoder: return "encoder-decoder";
    case VariantKind::EncoderAdaptation: return "encoder-adaptation";
    case VariantKind::UnKadf: return "unkadf";
    case VariantKind::FineTune: return "finetune";
    case VariantKind::Ha: return "ha";
    case VariantKind::Lr: return "lr";
  }
  return "unknown";
}

inline VariantKind parse_variant(const std::string& name) {
  for (VariantKind kind :
       {VariantKind::Lstm, VariantKind::EncoderLstm, VariantKind::EncoderDecoder,
        VariantKind::EncoderAdaptation, VariantKind::UnKadf, VariantKind::FineTune,
        VariantKind::Ha, VariantKind::Lr}) {
    if (name == variant_name(kind)) return kind;
  }
  throw errors::config("unknown variant '" + name +
                       "', expected one of lstm, encoder-lstm, encoder-decoder, "
                       "encoder-adaptation, unkadf, finetune, ha, lr");
}

inline bool variant_is_neural(VariantKind kind) {
  return kind != VariantKind::Ha && kind != VariantKind::Lr;
}

inline bool variant_needs_artifact(VariantKind kind) {
  return kind == VariantKind::EncoderAdaptation || kind == VariantKind::UnKadf ||
         kind == VariantKind::FineTune;
}

/// One neural model behind a uniform train/predict surface so the harness
/// does not branch on architecture. Exactly one of the three members is
/// engaged, chosen by the kind.
struct VariantModel {
  VariantKind kind = VariantKind::Lstm;
  std::optional<SingleLstmNet> single;
  std::optional<FineTuneNet> finetune;
  std::optional<SharingNet> sharing;

  static VariantModel build(VariantKind kind, std::size_t n_p, std::size_t k, std::size_t m,
                            const PretrainedArtifact* artifact, Rng& rng) {
    if (!variant_is_neural(kind)) {
      throw errors::config(std::string("variant '") + variant_name(kind) +
                           "' is a classical baseline, not a trainable network");
    }
    if (variant_needs_artifact(kind) && artifact == nullptr) {
      throw errors::config(std::string("variant '") + variant_name(kind) +
                           "' requires a pretrained artifact");
    }
    VariantModel model;
    model.kind = kind;
    switch (kind) {
      case VariantKind::Lstm:
        model.single.emplace(n_p, m, rng);
        break;
      case VariantKind::FineTune:
        model.finetune.emplace(n_p, k, m, *artifact, rng);
        break;
      case VariantKind::EncoderLstm:
        model.sharing.emplace(n_p, k, m, /*with_decoder=*/false, nullptr, rng);
        break;
      case VariantKind::EncoderDecoder:
        model.sharing.emplace(n_p, k, m, /*with_decoder=*/true, nullptr, rng);
        break;
      case VariantKind::EncoderAdaptation:
        model.sharing.emplace(n_p, k, m, /*with_decoder=*/false, artifact, rng);
        break;
      case VariantKind::UnKadf:
        model.sharing.emplace(n_p, k, m, /*with_decoder=*/true, artifact, rng);
        break;
      default:
        break;
    }
    return model;
  }

  std::vector<Param*> params() {
    if (single) return single->params();
    if (finetune) return finetune->params();
    return sharing->params();
  }

  /// Forward pass plus loss, no gradient side effects.
  LossTerms evaluate(const Matrix& inputs, const Matrix& targets, double gamma,
                     double beta) const {
    LossTerms terms;
    if (single) {
      terms.l1 = mse(single_lstm_forward(*single, inputs).predictions, targets);
      terms.total = terms.l1;
    } else if (finetune) {
      terms.l1 = mse(finetune_forward(*finetune, inputs).predictions, targets);
      terms.total = terms.l1;
    } else {
      terms = unkadf_loss(sharing_forward(*sharing, inputs), inputs, targets, gamma, beta);
    }
    return terms;
  }

  /// Forward pass plus gradient accumulation; returns the loss terms of the
  /// forward pass.
  LossTerms train_step_accumulate(const Matrix& inputs, const Matrix& targets, double gamma,
                                  double beta, double grad_scale) {
    LossTerms terms;
    if (single) {
      const SingleLstmForward fwd = single_lstm_forward(*single, inputs);
      terms.l1 = mse(fwd.predictions, targets);
      terms.total = terms.l1;
      single_lstm_backward(*single, fwd, targets, grad_scale);
    } else if (finetune) {
      const FineTuneForward fwd = finetune_forward(*finetune, inputs);
      terms.l1 = mse(fwd.predictions, targets);
      terms.total = terms.l1;
      finetune_backward(*finetune, fwd, inputs, targets, grad_scale);
    } else {
      const SharingForward fwd = sharing_forward(*sharing, inputs);
      terms = unkadf_loss(fwd, inputs, targets, gamma, beta);
      sharing_backward(*sharing, fwd, inputs, targets, gamma, beta, grad_scale);
    }
    return terms;
  }

  /// Full teacher-forced prediction sequence for one window.
  Matrix predict(const Matrix& inputs) const {
    if (single) return single_lstm_forward(*single, inputs).predictions;
    if (finetune) return finetune_forward(*finetune, inputs).predictions;
    return sharing_forward(*sharing, inputs).predictions;
  }

  /// Prediction emitted at the final window position, the one-step-ahead
  /// forecast used for evaluation.
  Vec predict_last(const Matrix& inputs) const {
    const Matrix preds = predict(inputs);
    return preds.row(preds.rows() - 1);
  }

  const LstmCellParams* frozen_cell() const {
    if (sharing && sharing->has_lstm_a) return &sharing->lstm_a;
    return nullptr;
  }
};

}  // namespace unkadf
