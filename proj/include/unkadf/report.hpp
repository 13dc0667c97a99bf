#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "unkadf/errors.hpp"
#include "unkadf/metrics.hpp"
#include "unkadf/trainer.hpp"
#include "unkadf/variants.hpp"

namespace unkadf {

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Key-value report for one run: config echo, training summary, then the test
/// metric block. Wall-clock duration is deliberately omitted so the same
/// (data, config, seed) always serializes to the same bytes; callers that
/// want timing print it to the terminal instead.
inline std::string run_report_text(const RunResult& r, const std::string& model_label = "") {
  const RunConfig& c = r.config;
  std::string out;
  out += "model=" + (model_label.empty() ? std::string(variant_name(c.variant)) : model_label) +
         "\n";
  out += "tau=" + std::to_string(c.tau) + "\n";
  out += "batch_size=" + std::to_string(c.batch_size) + "\n";
  out += "lr=" + detail::fmt_g17(c.lr) + "\n";
  out += "epochs=" + std::to_string(c.epochs) + "\n";
  out += "epochs_run=" + std::to_string(r.epochs_run) + "\n";
  out += "k=" + std::to_string(c.k) + "\n";
  out += "m=" + std::to_string(c.m) + "\n";
  out += "gamma=" + detail::fmt_g17(c.gamma) + "\n";
  out += "beta=" + detail::fmt_g17(c.beta) + "\n";
  out += "seed=" + std::to_string(c.seed) + "\n";
  out += "train_fraction=" + detail::fmt_g17(c.splits.train) + "\n";
  out += "val_fraction=" + detail::fmt_g17(c.splits.val) + "\n";
  out += "test_fraction=" + detail::fmt_g17(c.splits.test) + "\n";
  out += "zero_threshold=" + detail::fmt_g17(c.zero_threshold) + "\n";
  out += "patience=" + std::to_string(c.patience) + "\n";
  out += "stations_kept=" + std::to_string(r.stations_kept) + "\n";
  if (!r.trace.empty()) {
    out += "best_epoch=" + std::to_string(r.best_epoch) + "\n";
    out += "best_val_loss=" + detail::fmt_g17(r.best_val_loss) + "\n";
    out += "final_train_loss=" + detail::fmt_g17(r.final_train_loss) + "\n";
  }
  out += to_key_value(r.test_report);
  return out;
}

inline std::string trace_csv_text(const RunResult& r) {
  std::string out = "epoch,total,l1,l2,l3,val_loss\n";
  for (const EpochTrace& e : r.trace) {
    out += std::to_string(e.epoch) + "," + detail::fmt_g17(e.total) + "," +
           detail::fmt_g17(e.l1) + "," + detail::fmt_g17(e.l2) + "," + detail::fmt_g17(e.l3) +
           "," + detail::fmt_g17(e.val_loss) + "\n";
  }
  return out;
}

inline std::string sweep_report_text(const SweepResult& s) {
  std::string out;
  out += "grid_points=" + std::to_string(s.points.size()) + "\n";
  out += "best_index=" + std::to_string(s.best_index) + "\n";
  out += "best_gamma=" + detail::fmt_g17(s.best_gamma) + "\n";
  out += "best_beta=" + detail::fmt_g17(s.best_beta) + "\n";
  out += "best_val_loss=" + detail::fmt_g17(s.points[s.best_index].result.best_val_loss) + "\n";
  out += "test_mae_std=" + detail::fmt_g17(s.test_mae_std) + "\n";
  out += "test_mae_median=" + detail::fmt_g17(s.test_mae_median) + "\n";
  return out;
}

/// Per-point sweep summary, one CSV row per grid point in grid order.
inline std::string sweep_csv_text(const SweepResult& s) {
  std::string out = "index,gamma,beta,best_val_loss,test_mae\n";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const SweepPoint& p = s.points[i];
    out += std::to_string(i) + "," + detail::fmt_g17(p.gamma) + "," + detail::fmt_g17(p.beta) +
           "," + detail::fmt_g17(p.result.best_val_loss) + "," +
           detail::fmt_g17(p.result.test_report.mae.require()) + "\n";
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw errors::io("cannot open for writing: " + path);
  out << text;
  if (!out) throw errors::io("write failed: " + path);
}

}  // namespace unkadf
