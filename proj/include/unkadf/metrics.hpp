#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>

#include "unkadf/errors.hpp"
#include "unkadf/matrix.hpp"
#include "unkadf/pearson.hpp"

namespace unkadf {

/// Which metrics drop points whose actual value is zero. MAPE and oPNBI are
/// masked unconditionally (their formulas divide by the actual); the demand
/// policy masks nothing else, the speed policy extends the mask to MAE, RMSE
/// and PNBI because a zero speed reading is an anomaly rather than a value.
struct MaskPolicy {
  std::string name = "demand";
  std::set<std::string> mask_zero_actuals_for{"mape", "opnbi"};

  static MaskPolicy demand() { return MaskPolicy{}; }

  static MaskPolicy speed() {
    return MaskPolicy{"speed", {"mape", "opnbi", "mae", "rmse", "pnbi"}};
  }

  bool masks_zero_actuals(const std::string& metric) const {
    if (metric == "mape" || metric == "opnbi") return true;
    return mask_zero_actuals_for.count(metric) > 0;
  }
};

/// One metric outcome. A metric whose every point is masked (or that is
/// undefined on the given data) carries no value; require() raises the
/// corresponding error instead of returning a stand-in number.
struct MetricValue {
  std::string name;
  std::optional<double> value;
  int used_points = 0;
  int masked_points = 0;
  std::string unavailable_reason;  // error class, set only when value is empty

  double require() const {
    if (value) return *value;
    if (unavailable_reason == "undefined-metric") {
      throw errors::undefined_metric(name + " is undefined on this data");
    }
    throw errors::empty_evaluation(name + ": every point is masked");
  }
};

namespace detail {

inline MetricValue available_metric(std::string name, double value, int used, int masked) {
  MetricValue m;
  m.name = std::move(name);
  m.value = value;
  m.used_points = used;
  m.masked_points = masked;
  return m;
}

inline MetricValue unavailable_metric(std::string name, std::string reason, int masked) {
  MetricValue m;
  m.name = std::move(name);
  m.masked_points = masked;
  m.unavailable_reason = std::move(reason);
  return m;
}

inline void check_eval_shapes(const Matrix& pred, const Matrix& actual) {
  if (!pred.same_shape(actual)) {
    throw errors::dimension("prediction " + shape_str(pred) + " vs actual " + shape_str(actual));
  }
  if (pred.size() == 0) throw errors::empty_evaluation("no points to evaluate");
}

}  // namespace detail

struct PointErrorMetrics {
  MetricValue mae, rmse, mape, smape;
};

inline PointErrorMetrics point_error_metrics(const Matrix& pred, const Matrix& actual,
                                             const MaskPolicy& policy = MaskPolicy::demand()) {
  detail::check_eval_shapes(pred, actual);
  const bool mask_mae = policy.masks_zero_actuals("mae");
  const bool mask_rmse = policy.masks_zero_actuals("rmse");

  double sum_abs = 0.0, sum_sq = 0.0, sum_ape = 0.0, sum_sape = 0.0;
  int n_mae = 0, n_rmse = 0, n_mape = 0, n_smape = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double p = pred.data()[k];
    const double a = actual.data()[k];
    const double abs_err = std::abs(p - a);
    if (!(mask_mae && a == 0.0)) {
      sum_abs += abs_err;
      ++n_mae;
    }
    if (!(mask_rmse && a == 0.0)) {
      sum_sq += (p - a) * (p - a);
      ++n_rmse;
    }
    if (a != 0.0) {
      sum_ape += abs_err / std::abs(a);
      ++n_mape;
    }
    if (std::abs(p) + std::abs(a) != 0.0) {
      sum_sape += abs_err / (std::abs(p) + std::abs(a));
      ++n_smape;
    }
  }

  const int total = static_cast<int>(pred.size());
  PointErrorMetrics out;
  out.mae = n_mae ? detail::available_metric("mae", sum_abs / n_mae, n_mae, total - n_mae)
                  : detail::unavailable_metric("mae", "empty-evaluation", total);
  out.rmse = n_rmse ? detail::available_metric("rmse", std::sqrt(sum_sq / n_rmse), n_rmse, total - n_rmse)
                    : detail::unavailable_metric("rmse", "empty-evaluation", total);
  out.mape = n_mape ? detail::available_metric("mape", sum_ape / n_mape, n_mape, total - n_mape)
                    : detail::unavailable_metric("mape", "empty-evaluation", total);
  out.smape = n_smape ? detail::available_metric("smape", sum_sape / n_smape, n_smape, total - n_smape)
                      : detail::unavailable_metric("smape", "empty-evaluation", total);
  return out;
}

struct RelativeMetrics {
  MetricValue rrse, r2, corr;
  int corr_skipped_series = 0;
};

inline RelativeMetrics relative_metrics(const Matrix& pred, const Matrix& actual) {
  detail::check_eval_shapes(pred, actual);
  const int total = static_cast<int>(pred.size());

  double mean_actual = 0.0;
  for (std::size_t k = 0; k < actual.size(); ++k) mean_actual += actual.data()[k];
  mean_actual /= total;

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t k = 0; k < actual.size(); ++k) {
    const double d = pred.data()[k] - actual.data()[k];
    ss_res += d * d;
    const double c = actual.data()[k] - mean_actual;
    ss_tot += c * c;
  }

  RelativeMetrics out;
  if (ss_tot == 0.0) {
    out.rrse = detail::unavailable_metric("rrse", "undefined-metric", total);
    out.r2 = detail::unavailable_metric("r2", "undefined-metric", total);
  } else {
    const double ratio = ss_res / ss_tot;
    out.rrse = detail::available_metric("rrse", std::sqrt(ratio), total, 0);
    out.r2 = detail::available_metric("r2", 1.0 - ratio, total, 0);
  }

  double corr_sum = 0.0;
  int defined = 0;
  for (int j = 0; j < actual.cols(); ++j) {
    const double r = pearson(pred, j, actual, j);
    if (std::isnan(r)) {
      ++out.corr_skipped_series;
    } else {
      corr_sum += r;
      ++defined;
    }
  }
  out.corr = defined
                 ? detail::available_metric("corr", corr_sum / defined, defined, out.corr_skipped_series)
                 : detail::unavailable_metric("corr", "undefined-metric", out.corr_skipped_series);
  return out;
}

struct BiasMetrics {
  MetricValue pnbi, opnbi;
};

inline BiasMetrics bias_metrics(const Matrix& pred, const Matrix& actual,
                                const MaskPolicy& policy = MaskPolicy::demand()) {
  detail::check_eval_shapes(pred, actual);
  const bool mask_pnbi = policy.masks_zero_actuals("pnbi");

  int positives = 0, n_pnbi = 0, n_opnbi = 0;
  double sum_ratio = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double p = pred.data()[k];
    const double a = actual.data()[k];
    if (!(mask_pnbi && a == 0.0)) {
      if (p - a > 0.0) ++positives;
      ++n_pnbi;
    }
    if (a != 0.0) {
      sum_ratio += (p + a) / (2.0 * a);
      ++n_opnbi;
    }
  }

  const int total = static_cast<int>(pred.size());
  BiasMetrics out;
  out.pnbi = n_pnbi ? detail::available_metric("pnbi", static_cast<double>(positives) / n_pnbi,
                                               n_pnbi, total - n_pnbi)
                    : detail::unavailable_metric("pnbi", "empty-evaluation", total);
  out.opnbi = n_opnbi ? detail::available_metric("opnbi", sum_ratio / n_opnbi, n_opnbi, total - n_opnbi)
                      : detail::unavailable_metric("opnbi", "empty-evaluation", total);
  return out;
}

struct MetricReport {
  MetricValue mae, rmse, mape, smape, rrse, r2, corr, pnbi, opnbi;
  int corr_skipped_series = 0;
  std::string policy_name;

  std::vector<const MetricValue*> all() const {
    return {&mae, &rmse, &mape, &smape, &rrse, &r2, &corr, &pnbi, &opnbi};
  }
};

inline MetricReport evaluate_metrics(const Matrix& pred, const Matrix& actual,
                                     const MaskPolicy& policy = MaskPolicy::demand()) {
  const PointErrorMetrics pe = point_error_metrics(pred, actual, policy);
  const RelativeMetrics rel = relative_metrics(pred, actual);
  const BiasMetrics bias = bias_metrics(pred, actual, policy);
  MetricReport r;
  r.mae = pe.mae;
  r.rmse = pe.rmse;
  r.mape = pe.mape;
  r.smape = pe.smape;
  r.rrse = rel.rrse;
  r.r2 = rel.r2;
  r.corr = rel.corr;
  r.pnbi = bias.pnbi;
  r.opnbi = bias.opnbi;
  r.corr_skipped_series = rel.corr_skipped_series;
  r.policy_name = policy.name;
  return r;
}

/// Growth percentage of a candidate score over a reference score; positive
/// means the candidate improved on the reference.
inline double improvement_pct(double candidate, double reference) {
  if (!(reference > 0.0)) {
    throw errors::config("improvement reference must be positive, got " + std::to_string(reference));
  }
  return (reference - candidate) / reference * 100.0;
}

/// Flat key-value serialization consumed by the CLI report emitter.
inline std::string to_key_value(const MetricReport& r) {
  std::string out = "policy=" + r.policy_name + "\n";
  char buf[64];
  for (const MetricValue* m : r.all()) {
    if (m->value) {
      std::snprintf(buf, sizeof(buf), "%.17g", *m->value);
      out += m->name + "=" + buf + "\n";
    } else {
      out += m->name + "=unavailable:" + m->unavailable_reason + "\n";
    }
    out += m->name + "_used=" + std::to_string(m->used_points) + "\n";
    out += m->name + "_masked=" + std::to_string(m->masked_points) + "\n";
  }
  out += "corr_skipped_series=" + std::to_string(r.corr_skipped_series) + "\n";
  return out;
}

}  // namespace unkadf
