#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "unkadf/adam.hpp"
#include "unkadf/artifact.hpp"
#include "unkadf/baselines.hpp"
#include "unkadf/demand.hpp"
#include "unkadf/errors.hpp"
#include "unkadf/metrics.hpp"
#include "unkadf/pretrain_net.hpp"
#include "unkadf/scaler.hpp"
#include "unkadf/variants.hpp"
#include "unkadf/window.hpp"

namespace unkadf {

struct RunConfig {
  VariantKind variant = VariantKind::UnKadf;
  int tau = 12;
  int batch_size = 64;
  double lr = 0.0001;
  int epochs = 1000;
  int k = 64;
  int m = 64;
  double gamma = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  SplitFractions splits;
  double zero_threshold = 0.6;
  int patience = 20;

  void validate() const {
    if (tau < 1) throw errors::config("tau must be >= 1, got " + std::to_string(tau));
    if (epochs < 1) throw errors::config("epochs must be >= 1, got " + std::to_string(epochs));
    if (batch_size < 1)
      throw errors::config("batch size must be >= 1, got " + std::to_string(batch_size));
    if (!(lr > 0.0) || !std::isfinite(lr))
      throw errors::config("learning rate must be positive and finite");
    if (k < 1 || m < 1)
      throw errors::config("embedding and hidden sizes must be >= 1, got k=" + std::to_string(k) +
                           " m=" + std::to_string(m));
    if (gamma < 0.0 || beta < 0.0)
      throw errors::config("gamma and beta must be non-negative");
    if (patience < 1)
      throw errors::config("patience must be >= 1, got " + std::to_string(patience));
    if (!(zero_threshold > 0.0) || zero_threshold > 1.0)
      throw errors::config("zero-filter threshold must lie in (0, 1]");
  }
};

struct EpochTrace {
  int epoch = 0;
  double total = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  double val_loss = 0.0;
};

struct RunResult {
  RunConfig config;
  std::vector<EpochTrace> trace;
  int epochs_run = 0;
  int best_epoch = -1;
  double best_val_loss = std::numeric_limits<double>::quiet_NaN();
  double final_train_loss = std::numeric_limits<double>::quiet_NaN();
  int stations_kept = 0;
  MetricReport test_report;
  // Filled by callers that time runs (the CLI); deliberately absent from the
  // serialized report so identical inputs produce identical report bytes.
  double duration_seconds = 0.0;
};

namespace detail {

/// Preprocessing shared by every run: station filter, chronological split,
/// train-fitted scaler, windows per split, and the raw one-step-ahead actual
/// for each test window (the evaluation targets).
struct PreparedData {
  DataSplits splits;
  MinMaxScaler scaler;
  WindowBatch train_w, val_w, test_w;
  Matrix test_actual;
  std::size_t stations = 0;
};

inline PreparedData prepare(const DemandMatrix& data, const RunConfig& cfg) {
  PreparedData p;
  const DemandMatrix filtered = filter_stations(data, cfg.zero_threshold);
  p.splits = chronological_split(filtered, cfg.splits, cfg.tau);
  p.scaler = MinMaxScaler::fit(p.splits.train.values);
  p.train_w = make_windows(p.scaler.apply(p.splits.train.values), cfg.tau);
  p.val_w = make_windows(p.scaler.apply(p.splits.val.values), cfg.tau);
  p.test_w = make_windows(p.scaler.apply(p.splits.test.values), cfg.tau);
  p.stations = static_cast<std::size_t>(filtered.stations());

  p.test_actual = Matrix(p.test_w.inputs.size(), p.stations);
  for (std::size_t w = 0; w < p.test_w.inputs.size(); ++w) {
    p.test_actual.set_row(w, p.splits.test.values.row(w + static_cast<std::size_t>(cfg.tau)));
  }
  return p;
}

/// Uniform training surface over the pretrain network and the adaptation
/// variants so one loop serves both.
struct ModelHooks {
  std::function<LossTerms(const Matrix&, const Matrix&, double)> accumulate;
  std::function<LossTerms(const Matrix&, const Matrix&)> evaluate;
  std::function<Vec(const Matrix&)> predict_last;
  std::vector<Param*> params;
  const LstmCellParams* frozen = nullptr;
  const PretrainedArtifact* frozen_source = nullptr;
};

inline void check_frozen(const ModelHooks& hooks, int epoch) {
  if (hooks.frozen != nullptr && hooks.frozen_source != nullptr &&
      !hooks.frozen->bitwise_equal(hooks.frozen_source->lstm_a)) {
    throw errors::numerical("frozen cell changed during epoch " + std::to_string(epoch));
  }
}

/// Mini-batch training with seeded shuffling, validation-based early
/// stopping, and in-memory best-validation checkpointing. Validation tracks
/// the unweighted prediction term only, so checkpoint selection targets
/// forecasting quality and stays comparable across runs whose gamma and beta
/// weight the auxiliary terms differently. The shuffle stream is forked from
/// the seed rather than from the initialization draws, so architectures that
/// consume different numbers of init draws still see the same batch order.
inline void train_loop(const RunConfig& cfg, const PreparedData& data, ModelHooks& hooks,
                       RunResult& result) {
  AdamOptimizer opt(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});
  Rng shuffle_rng = Rng(cfg.seed).fork(1);

  const std::size_t n_train = data.train_w.inputs.size();
  std::vector<std::size_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_values;
  int bad_epochs = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double sum_total = 0.0, sum_l1 = 0.0, sum_l2 = 0.0, sum_l3 = 0.0;
    for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
      const std::size_t stop = std::min(n_train, start + static_cast<std::size_t>(cfg.batch_size));
      zero_grads(hooks.params);
      const double grad_scale = 1.0 / static_cast<double>(stop - start);
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t w = order[b];
        const LossTerms terms =
            hooks.accumulate(data.train_w.inputs[w], data.train_w.targets[w], grad_scale);
        sum_total += terms.total;
        sum_l1 += terms.l1;
        sum_l2 += terms.l2;
        sum_l3 += terms.l3;
      }
      opt.step(hooks.params);
    }

    double val_sum = 0.0;
    for (std::size_t w = 0; w < data.val_w.inputs.size(); ++w) {
      val_sum += hooks.evaluate(data.val_w.inputs[w], data.val_w.targets[w]).l1;
    }
    const double denom = static_cast<double>(n_train);
    const double val_loss = val_sum / static_cast<double>(data.val_w.inputs.size());

    EpochTrace row;
    row.epoch = epoch;
    row.total = sum_total / denom;
    row.l1 = sum_l1 / denom;
    row.l2 = sum_l2 / denom;
    row.l3 = sum_l3 / denom;
    row.val_loss = val_loss;
    if (!std::isfinite(row.total) || !std::isfinite(val_loss)) {
      throw errors::numerical("training diverged at epoch " + std::to_string(epoch) +
                              ": train loss " + std::to_string(row.total) + ", validation loss " +
                              std::to_string(val_loss));
    }
    check_frozen(hooks, epoch);
    result.trace.push_back(row);
    result.epochs_run = epoch + 1;

    if (val_loss < best_val) {
      best_val = val_loss;
      result.best_epoch = epoch;
      bad_epochs = 0;
      best_values.clear();
      best_values.reserve(hooks.params.size());
      for (const Param* p : hooks.params) best_values.push_back(p->value);
    } else if (++bad_epochs >= cfg.patience) {
      break;
    }
  }

  for (std::size_t i = 0; i < hooks.params.size(); ++i) hooks.params[i]->value = best_values[i];
  check_frozen(hooks, result.epochs_run);
  result.best_val_loss = best_val;
  result.final_train_loss = result.trace.back().total;
}

inline MetricReport evaluate_test_windows(const PreparedData& data,
                                          const std::function<Vec(const Matrix&)>& predict_last) {
  Matrix preds(data.test_w.inputs.size(), data.stations);
  for (std::size_t w = 0; w < data.test_w.inputs.size(); ++w) {
    preds.set_row(w, data.scaler.invert_row(predict_last(data.test_w.inputs[w])));
  }
  return evaluate_metrics(preds, data.test_actual, MaskPolicy::demand());
}

}  // namespace detail

struct PretrainRun {
  RunResult result;
  PretrainedArtifact artifact;
  PretrainNet net;
};

/// Trains the source network and extracts the shareable artifact from the
/// best-validation weights.
inline PretrainRun run_pretrain(const DemandMatrix& data, const RunConfig& cfg,
                                const ArtifactMetadata& metadata = {}) {
  cfg.validate();
  const detail::PreparedData prepared = detail::prepare(data, cfg);

  PretrainRun out;
  Rng root(cfg.seed);
  out.net = PretrainNet(prepared.stations, cfg.k, cfg.m, root);
  PretrainNet& net = out.net;

  detail::ModelHooks hooks;
  hooks.params = net.params();
  hooks.accumulate = [&net](const Matrix& inputs, const Matrix& targets, double grad_scale) {
    const PretrainForward fwd = pretrain_forward(net, inputs);
    LossTerms terms;
    terms.l1 = mse(fwd.predictions, targets);
    terms.l2 = mse(fwd.reconstructions, inputs);
    terms.total = terms.l1 + terms.l2;
    pretrain_backward(net, fwd, inputs, targets, grad_scale);
    return terms;
  };
  hooks.evaluate = [&net](const Matrix& inputs, const Matrix& targets) {
    const PretrainForward fwd = pretrain_forward(net, inputs);
    LossTerms terms;
    terms.l1 = mse(fwd.predictions, targets);
    terms.l2 = mse(fwd.reconstructions, inputs);
    terms.total = terms.l1 + terms.l2;
    return terms;
  };
  hooks.predict_last = [&net](const Matrix& inputs) {
    const PretrainForward fwd = pretrain_forward(net, inputs);
    return fwd.predictions.row(fwd.predictions.rows() - 1);
  };

  out.result.config = cfg;
  out.result.stations_kept = static_cast<int>(prepared.stations);
  detail::train_loop(cfg, prepared, hooks, out.result);
  out.result.test_report = detail::evaluate_test_windows(prepared, hooks.predict_last);
  out.artifact = make_artifact(net, metadata);
  return out;
}

struct TrainedRun {
  RunResult result;
  std::optional<VariantModel> model;
};

/// Runs one variant end to end: neural kinds share the training loop, the
/// classical baselines skip it. HA and LR operate on raw demand directly
/// (both are equivariant under the per-station affine scaling, so
/// normalize-then-invert would change nothing).
inline TrainedRun run_variant(const DemandMatrix& data, const RunConfig& cfg,
                              const PretrainedArtifact* artifact) {
  cfg.validate();
  const detail::PreparedData prepared = detail::prepare(data, cfg);

  TrainedRun out;
  out.result.config = cfg;
  out.result.stations_kept = static_cast<int>(prepared.stations);

  if (cfg.variant == VariantKind::Ha) {
    const std::size_t test_offset = static_cast<std::size_t>(prepared.splits.train.steps()) +
                                    static_cast<std::size_t>(prepared.splits.val.steps());
    std::vector<std::size_t> query_times;
    query_times.reserve(prepared.test_w.inputs.size());
    for (std::size_t w = 0; w < prepared.test_w.inputs.size(); ++w) {
      query_times.push_back(test_offset + w + static_cast<std::size_t>(cfg.tau));
    }
    const Matrix preds = ha_forecast(prepared.splits.train.values, 0, query_times);
    out.result.test_report = evaluate_metrics(preds, prepared.test_actual, MaskPolicy::demand());
    return out;
  }
  if (cfg.variant == VariantKind::Lr) {
    const WindowBatch train_raw = make_windows(prepared.splits.train.values, cfg.tau);
    const WindowBatch test_raw = make_windows(prepared.splits.test.values, cfg.tau);
    const Matrix preds = lr_fit_forecast(train_raw, test_raw);
    out.result.test_report = evaluate_metrics(preds, prepared.test_actual, MaskPolicy::demand());
    return out;
  }

  Rng root(cfg.seed);
  out.model = VariantModel::build(cfg.variant, prepared.stations, cfg.k, cfg.m, artifact, root);
  VariantModel& model = *out.model;

  detail::ModelHooks hooks;
  hooks.params = model.params();
  hooks.frozen = model.frozen_cell();
  hooks.frozen_source = hooks.frozen != nullptr ? artifact : nullptr;
  hooks.accumulate = [&model, &cfg](const Matrix& inputs, const Matrix& targets,
                                    double grad_scale) {
    return model.train_step_accumulate(inputs, targets, cfg.gamma, cfg.beta, grad_scale);
  };
  hooks.evaluate = [&model, &cfg](const Matrix& inputs, const Matrix& targets) {
    return model.evaluate(inputs, targets, cfg.gamma, cfg.beta);
  };
  hooks.predict_last = [&model](const Matrix& inputs) { return model.predict_last(inputs); };

  detail::train_loop(cfg, prepared, hooks, out.result);
  out.result.test_report = detail::evaluate_test_windows(prepared, hooks.predict_last);
  return out;
}

/// Adaptation entry point: always the full sharing network against a loaded
/// artifact; the signature admits no source data.
inline TrainedRun run_adapt(const DemandMatrix& target_data, const PretrainedArtifact& artifact,
                            const RunConfig& cfg) {
  RunConfig adapted = cfg;
  adapted.variant = VariantKind::UnKadf;
  return run_variant(target_data, adapted, &artifact);
}

struct SweepPoint {
  double gamma = 0.0;
  double beta = 0.0;
  RunResult result;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // grid order: gamma outer, beta inner
  std::size_t best_index = 0;
  double best_gamma = 0.0;
  double best_beta = 0.0;
  double test_mae_std = 0.0;
  double test_mae_median = 0.0;
};

/// Full grid of adaptation runs. Each grid point trains with its own derived
/// seed (base seed + grid index); selection is the argmin of best validation
/// loss, ties resolved by grid order. The reported spread statistic is the
/// population standard deviation of test MAE across the grid.
inline SweepResult sweep(const DemandMatrix& data, const PretrainedArtifact& artifact,
                         const RunConfig& base, const std::vector<double>& gammas,
                         const std::vector<double>& betas, int jobs = 1) {
  if (gammas.empty() || betas.empty()) {
    throw errors::config("sweep ranges must be non-empty");
  }
  base.validate();

  SweepResult result;
  const std::size_t n = gammas.size() * betas.size();
  result.points.resize(n);

  std::vector<std::exception_ptr> failures(n);
  const auto run_point = [&](std::size_t i) {
    RunConfig cfg = base;
    cfg.gamma = gammas[i / betas.size()];
    cfg.beta = betas[i % betas.size()];
    cfg.seed = base.seed + i;
    result.points[i].gamma = cfg.gamma;
    result.points[i].beta = cfg.beta;
    try {
      result.points[i].result = run_adapt(data, artifact, cfg).result;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  if (jobs <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          run_point(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> maes;
  maes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RunResult& r = result.points[i].result;
    if (r.best_val_loss < best_val) {
      best_val = r.best_val_loss;
      result.best_index = i;
    }
    maes.push_back(r.test_report.mae.require());
  }
  result.best_gamma = result.points[result.best_index].gamma;
  result.best_beta = result.points[result.best_index].beta;

  double mean = 0.0;
  for (double v : maes) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : maes) var += (v - mean) * (v - mean);
  result.test_mae_std = std::sqrt(var / static_cast<double>(n));

  std::vector<double> sorted = maes;
  std::sort(sorted.begin(), sorted.end());
  result.test_mae_median = (n % 2 == 1)
                               ? sorted[n / 2]
                               : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return result;
}

}  // namespace unkadf
