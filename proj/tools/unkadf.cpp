#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "unkadf/artifact.hpp"
#include "unkadf/demand.hpp"
#include "unkadf/errors.hpp"
#include "unkadf/gradcheck.hpp"
#include "unkadf/metrics.hpp"
#include "unkadf/pearson.hpp"
#include "unkadf/pretrain_net.hpp"
#include "unkadf/report.hpp"
#include "unkadf/rng.hpp"
#include "unkadf/sharing_net.hpp"
#include "unkadf/synth.hpp"
#include "unkadf/trainer.hpp"
#include "unkadf/variants.hpp"

namespace fs = std::filesystem;

namespace unkadf::cli {

struct ModePairWeights {
  double gamma = 0.0;
  double beta = 0.0;
};

/// Published loss-weight settings per target:source mode pair.
inline const std::map<std::string, ModePairWeights>& mode_pair_table() {
  static const std::map<std::string, ModePairWeights> table{
      {"bus:train", {0.4, 1.0}},      {"bus:lightrail", {1.0, 0.4}},
      {"bus:ferry", {0.5, 0.1}},      {"train:bus", {0.6, 0.7}},
      {"train:lightrail", {0.6, 0.9}}, {"train:ferry", {0.4, 0.7}},
      {"lightrail:bus", {0.9, 0.3}},  {"lightrail:train", {0.3, 0.1}},
      {"lightrail:ferry", {1.0, 0.6}}, {"ferry:bus", {0.1, 0.6}},
      {"ferry:train", {0.6, 0.6}},    {"ferry:lightrail", {0.5, 0.6}},
  };
  return table;
}

ModePairWeights lookup_mode_pair(const std::string& pair) {
  const auto it = mode_pair_table().find(pair);
  if (it == mode_pair_table().end()) {
    throw errors::usage("unknown mode pair '" + pair +
                        "'; expected target:source over bus, train, lightrail, ferry");
  }
  return it->second;
}

double parse_double(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw errors::usage(flag + ": not a number: '" + text + "'");
  }
}

/// Accepts a single value "0.4" or an inclusive range "0.1:1.0:0.1".
std::vector<double> parse_range(const std::string& text, const std::string& flag) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    if (colon == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, colon - start));
    start = colon + 1;
  }
  if (parts.size() == 1) return {parse_double(parts[0], flag)};
  if (parts.size() != 3) {
    throw errors::usage(flag + ": expected VALUE or START:STOP:STEP, got '" + text + "'");
  }
  const double lo = parse_double(parts[0], flag);
  const double hi = parse_double(parts[1], flag);
  const double step = parse_double(parts[2], flag);
  if (!(step > 0.0)) throw errors::usage(flag + ": step must be positive");
  if (hi < lo) throw errors::usage(flag + ": range stop is below start");
  std::vector<double> values;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + step * 1e-6) break;
    values.push_back(v);
  }
  return values;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw errors::io("cannot create directory " + dir + ": " + ec.message());
}

/// Training flags shared by pretrain, adapt, baseline, and sweep. k and m
/// stay -1 when not given so artifact-bearing commands can default them to
/// the artifact's dimensions.
struct TrainFlags {
  std::string data;
  int tau = 12;
  int batch = 64;
  int epochs = 1000;
  int k = -1;
  int m = -1;
  int patience = 20;
  double lr = 0.0001;
  std::uint64_t seed = 0;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--data", f.data, "Demand CSV (header of station ids, one row per hour)")
      ->required();
  cmd->add_option("--tau", f.tau, "Input window length");
  cmd->add_option("--batch", f.batch, "Mini-batch size");
  cmd->add_option("--epochs", f.epochs, "Maximum training epochs");
  cmd->add_option("--k", f.k, "Embedding size");
  cmd->add_option("--m", f.m, "LSTM hidden size");
  cmd->add_option("--patience", f.patience, "Early-stopping patience on validation loss");
  cmd->add_option("--lr", f.lr, "Adam learning rate");
  cmd->add_option("--seed", f.seed, "Run seed");
}

RunConfig to_config(const TrainFlags& f, VariantKind kind, double gamma, double beta,
                    int default_k, int default_m) {
  RunConfig cfg;
  cfg.variant = kind;
  cfg.tau = f.tau;
  cfg.batch_size = f.batch;
  cfg.epochs = f.epochs;
  cfg.k = f.k > 0 ? f.k : default_k;
  cfg.m = f.m > 0 ? f.m : default_m;
  cfg.patience = f.patience;
  cfg.lr = f.lr;
  cfg.seed = f.seed;
  cfg.gamma = gamma;
  cfg.beta = beta;
  return cfg;
}

void emit_run_outputs(const RunResult& result, const std::string& label,
                      const std::string& report_dir, const std::string& trace_path) {
  const std::string report = run_report_text(result, label);
  std::cout << report;
  if (!report_dir.empty()) {
    ensure_dir(report_dir);
    write_text_file(report_dir + "/run_report.txt", report);
    write_text_file(report_dir + "/trace.csv", trace_csv_text(result));
  }
  if (!trace_path.empty()) write_text_file(trace_path, trace_csv_text(result));
}

struct SynthFlags {
  int modes = -1;
  std::string stations = "8,6";
  int steps = 2184;
  double share = 0.9;
  std::uint64_t seed = 7;
  std::string out;
};

void cmd_synth(const SynthFlags& f) {
  std::vector<int> counts;
  std::size_t start = 0;
  while (start <= f.stations.size()) {
    const std::size_t comma = f.stations.find(',', start);
    const std::string piece =
        f.stations.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      const int n = std::stoi(piece, &used);
      if (used != piece.size() || n < 1) throw std::invalid_argument(piece);
      counts.push_back(n);
    } catch (const std::exception&) {
      throw errors::usage("--stations: bad station count '" + piece + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (f.modes >= 0 && static_cast<std::size_t>(f.modes) != counts.size()) {
    throw errors::usage("--modes " + std::to_string(f.modes) + " disagrees with --stations list of " +
                        std::to_string(counts.size()) + " counts");
  }
  if (!(f.share >= 0.0 && f.share <= 1.0)) {
    throw errors::usage("--share must be in [0, 1], got " + detail::fmt_g17(f.share));
  }
  if (f.steps < 48) throw errors::usage("--steps must be >= 48");

  SynthConfig cfg;
  cfg.mode_station_counts = counts;
  cfg.total_steps = f.steps;
  cfg.share = f.share;
  cfg.seed = f.seed;
  const std::vector<DemandMatrix> modes = synth_generate(cfg);

  ensure_dir(f.out);
  for (std::size_t d = 0; d < modes.size(); ++d) {
    const std::string path = f.out + "/mode_" + std::to_string(d) + ".csv";
    save_demand_csv(modes[d], path);
    std::cout << "wrote=" << path << "\n";
  }
}

struct PretrainFlags {
  TrainFlags train;
  std::string out;
  std::string report_dir;
  std::string trace_path;
};

void cmd_pretrain(const PretrainFlags& f) {
  const DemandMatrix data = load_demand_csv(f.train.data);
  const RunConfig cfg = to_config(f.train, VariantKind::UnKadf, 0.0, 0.0, 64, 64);

  ArtifactMetadata metadata;
  metadata.set("k", std::to_string(cfg.k));
  metadata.set("m", std::to_string(cfg.m));
  metadata.set("tau", std::to_string(cfg.tau));
  metadata.set("epochs", std::to_string(cfg.epochs));
  metadata.set("batch_size", std::to_string(cfg.batch_size));
  metadata.set("lr", detail::fmt_g17(cfg.lr));
  metadata.set("seed", std::to_string(cfg.seed));

  const PretrainRun run = run_pretrain(data, cfg, metadata);
  const std::string checksum = save_artifact(run.artifact, f.out);
  std::cout << "artifact=" << f.out << "\n";
  std::cout << "checksum=" << checksum << "\n";
  emit_run_outputs(run.result, "pretrain", f.report_dir, f.trace_path);
}

struct AdaptFlags {
  TrainFlags train;
  std::string pretrained;
  std::string mode_pair;
  double gamma = 0.0;
  double beta = 0.0;
  bool gamma_set = false;
  bool beta_set = false;
  std::string report_dir;
  std::string trace_path;
};

void cmd_adapt(const AdaptFlags& f) {
  double gamma = f.gamma;
  double beta = f.beta;
  if (!f.mode_pair.empty()) {
    const ModePairWeights w = lookup_mode_pair(f.mode_pair);
    if (!f.gamma_set) gamma = w.gamma;
    if (!f.beta_set) beta = w.beta;
  } else if (!f.gamma_set || !f.beta_set) {
    throw errors::usage("adapt needs --gamma and --beta, or --mode-pair target:source");
  }

  const DemandMatrix data = load_demand_csv(f.train.data);
  const PretrainedArtifact artifact = load_artifact(f.pretrained);
  const RunConfig cfg = to_config(f.train, VariantKind::UnKadf, gamma, beta, artifact.embed_dim,
                                  artifact.hidden_dim);
  const TrainedRun run = run_adapt(data, artifact, cfg);
  emit_run_outputs(run.result, "", f.report_dir, f.trace_path);
}

struct BaselineFlags {
  TrainFlags train;
  std::string model;
  std::string pretrained;
  double gamma = 0.0;
  double beta = 0.0;
  std::string report_dir;
  std::string trace_path;
};

void cmd_baseline(const BaselineFlags& f) {
  if (f.model == "unkadf") {
    throw errors::usage("the full model runs through the adapt subcommand");
  }
  const VariantKind kind = parse_variant(f.model);
  if (variant_needs_artifact(kind) && f.pretrained.empty()) {
    throw errors::usage("--model " + f.model + " needs --pretrained");
  }

  const DemandMatrix data = load_demand_csv(f.train.data);
  PretrainedArtifact artifact;
  const bool with_artifact = !f.pretrained.empty();
  if (with_artifact) artifact = load_artifact(f.pretrained);

  const int default_k = with_artifact ? artifact.embed_dim : 64;
  const int default_m = with_artifact ? artifact.hidden_dim : 64;
  const RunConfig cfg = to_config(f.train, kind, f.gamma, f.beta, default_k, default_m);
  const TrainedRun run = run_variant(data, cfg, with_artifact ? &artifact : nullptr);
  emit_run_outputs(run.result, "", f.report_dir, f.trace_path);
}

struct SweepFlags {
  TrainFlags train;
  std::string pretrained;
  std::string gamma_range;
  std::string beta_range;
  int jobs = 1;
  std::string out_dir;
};

void cmd_sweep(const SweepFlags& f) {
  const std::vector<double> gammas = parse_range(f.gamma_range, "--gamma");
  const std::vector<double> betas = parse_range(f.beta_range, "--beta");
  if (f.jobs < 1) throw errors::usage("--jobs must be >= 1");

  const DemandMatrix data = load_demand_csv(f.train.data);
  const PretrainedArtifact artifact = load_artifact(f.pretrained);
  const RunConfig base = to_config(f.train, VariantKind::UnKadf, 0.0, 0.0, artifact.embed_dim,
                                   artifact.hidden_dim);
  const SweepResult result = sweep(data, artifact, base, gammas, betas, f.jobs);

  const std::string summary = sweep_report_text(result);
  std::cout << summary;
  if (!f.out_dir.empty()) {
    ensure_dir(f.out_dir);
    write_text_file(f.out_dir + "/sweep_summary.txt", summary);
    write_text_file(f.out_dir + "/sweep.csv", sweep_csv_text(result));
  }
}

struct EvalFlags {
  std::string pred;
  std::string actual;
  bool mask_zeros_all = false;
};

void cmd_eval(const EvalFlags& f) {
  const DemandMatrix pred = load_demand_csv(f.pred);
  const DemandMatrix actual = load_demand_csv(f.actual);
  const MaskPolicy policy = f.mask_zeros_all ? MaskPolicy::speed() : MaskPolicy::demand();
  const MetricReport report = evaluate_metrics(pred.values, actual.values, policy);
  std::cout << to_key_value(report);
}

struct CorrelateFlags {
  std::string a;
  std::string b;
  std::string out;
};

void cmd_correlate(const CorrelateFlags& f) {
  const DemandMatrix a = load_demand_csv(f.a);
  const DemandMatrix b = load_demand_csv(f.b);
  const Matrix p = pearson_matrix(a.values, b.values);

  std::string csv = "station";
  for (int j = 0; j < b.stations(); ++j) csv += "," + b.station_ids[j];
  csv += "\n";
  for (int i = 0; i < a.stations(); ++i) {
    csv += a.station_ids[i];
    for (int j = 0; j < b.stations(); ++j) {
      csv += "," + detail::fmt_g17(p(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    }
    csv += "\n";
  }
  write_text_file(f.out, csv);

  const CorrelationSummary s = summarize_correlations(p);
  std::cout << "matrix=" << f.out << "\n";
  std::cout << "defined_pairs=" << s.defined_pairs << "\n";
  std::cout << "undefined_pairs=" << s.undefined_pairs << "\n";
  char line[64];
  for (int k = 0; k < 20; ++k) {
    std::snprintf(line, sizeof(line), "bin[%.1f,%.1f%c=%d\n", CorrelationSummary::bin_low(k),
                  CorrelationSummary::bin_low(k) + 0.1, k == 19 ? ']' : ')', s.bin_counts[k]);
    std::cout << line;
  }
  std::snprintf(line, sizeof(line), "fraction_above_0.8=%.17g\n", s.fraction_above(0.8, p));
  std::cout << line;
}

Matrix random_window(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix w(rows, cols);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t j = 0; j < cols; ++j) w(t, j) = rng.uniform(0.05, 0.95);
  }
  return w;
}

/// Finite-difference verification of the analytic gradients on the tiny
/// reference configuration (N=4, K=3, m=5, tau=3, batch of 2), covering the
/// pre-training loss and the full three-term adaptation loss.
void cmd_gradcheck() {
  constexpr double kTol = 1e-5;
  constexpr std::size_t kN = 4, kK = 3, kM = 5, kTau = 3, kBatch = 2;

  Rng rng(1234);
  std::vector<Matrix> inputs, targets;
  for (std::size_t w = 0; w < kBatch; ++w) {
    inputs.push_back(random_window(kTau, kN, rng));
    targets.push_back(random_window(kTau, kN, rng));
  }

  bool all_passed = true;
  const auto report = [&](const std::string& name, const GradCheckResult& res) {
    const bool ok = res.passed(kTol);
    all_passed = all_passed && ok;
    std::cout << "gradcheck " << name << ": max_rel_error=" << detail::fmt_g17(res.max_rel_error)
              << " " << (ok ? "PASS" : "FAIL") << "\n";
  };

  {
    PretrainNet net(kN, kK, kM, rng);
    const std::vector<Param*> params = net.params();
    const auto loss_value = [&]() {
      double acc = 0.0;
      for (std::size_t w = 0; w < kBatch; ++w) {
        const PretrainForward fwd = pretrain_forward(net, inputs[w]);
        acc += mse(fwd.predictions, targets[w]) + mse(fwd.reconstructions, inputs[w]);
      }
      return acc / static_cast<double>(kBatch);
    };
    zero_grads(params);
    for (std::size_t w = 0; w < kBatch; ++w) {
      pretrain_backward(net, pretrain_forward(net, inputs[w]), inputs[w], targets[w],
                        1.0 / static_cast<double>(kBatch));
    }
    report("pretrain", grad_check(loss_value, params));
  }

  {
    Rng art_rng(77);
    const PretrainedArtifact artifact = make_artifact(PretrainNet(kN, kK, kM, art_rng), {});
    SharingNet net(kN, kK, kM, true, &artifact, rng);
    const std::vector<Param*> params = net.params();
    const double gamma = 0.4, beta = 0.7;
    const auto loss_value = [&]() {
      double acc = 0.0;
      for (std::size_t w = 0; w < kBatch; ++w) {
        const SharingForward fwd = sharing_forward(net, inputs[w]);
        acc += unkadf_loss(fwd, inputs[w], targets[w], gamma, beta).total;
      }
      return acc / static_cast<double>(kBatch);
    };
    zero_grads(params);
    for (std::size_t w = 0; w < kBatch; ++w) {
      const SharingForward fwd = sharing_forward(net, inputs[w]);
      sharing_backward(net, fwd, inputs[w], targets[w], gamma, beta,
                       1.0 / static_cast<double>(kBatch));
    }
    report("sharing", grad_check(loss_value, params));
  }

  if (!all_passed) throw errors::numerical("gradient check failed");
  std::cout << "gradcheck: PASS\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Un-Kadf: pretrain on a source transport mode, share the model, adapt to a target "
               "mode without source data"};
  app.require_subcommand(1);

  auto synth_flags = std::make_shared<SynthFlags>();
  CLI::App* synth = app.add_subcommand("synth", "Generate correlated synthetic demand CSVs");
  synth->add_option("--modes", synth_flags->modes, "Number of modes (checked against --stations)");
  synth->add_option("--stations", synth_flags->stations, "Comma-separated station counts");
  synth->add_option("--steps", synth_flags->steps, "Time steps (hours)");
  synth->add_option("--share", synth_flags->share, "Cross-mode shared-signal weight in [0, 1]");
  synth->add_option("--seed", synth_flags->seed, "Generator seed");
  synth->add_option("--out", synth_flags->out, "Output directory")->required();
  synth->callback([synth_flags] { cmd_synth(*synth_flags); });

  auto pre_flags = std::make_shared<PretrainFlags>();
  CLI::App* pretrain = app.add_subcommand("pretrain", "Train the source network, save the artifact");
  add_train_flags(pretrain, pre_flags->train);
  pretrain->add_option("--out", pre_flags->out, "Artifact output path (.ukadf)")->required();
  pretrain->add_option("--report", pre_flags->report_dir, "Directory for report + loss trace");
  pretrain->add_option("--dump-trace-csv", pre_flags->trace_path, "Write the loss trace CSV here");
  pretrain->callback([pre_flags] { cmd_pretrain(*pre_flags); });

  auto adapt_flags = std::make_shared<AdaptFlags>();
  CLI::App* adapt = app.add_subcommand("adapt", "Adapt to target data against a shared artifact");
  add_train_flags(adapt, adapt_flags->train);
  adapt->add_option("--pretrained", adapt_flags->pretrained, "Shared artifact path")->required();
  CLI::Option* gopt = adapt->add_option("--gamma", adapt_flags->gamma, "Reconstruction weight");
  CLI::Option* bopt = adapt->add_option("--beta", adapt_flags->beta, "Alignment weight");
  adapt->add_option("--mode-pair", adapt_flags->mode_pair,
                    "target:source label with published gamma/beta defaults");
  adapt->add_option("--report", adapt_flags->report_dir, "Directory for report + loss trace");
  adapt->add_option("--dump-trace-csv", adapt_flags->trace_path, "Write the loss trace CSV here");
  adapt->callback([adapt_flags, gopt, bopt] {
    adapt_flags->gamma_set = gopt->count() > 0;
    adapt_flags->beta_set = bopt->count() > 0;
    cmd_adapt(*adapt_flags);
  });

  auto base_flags = std::make_shared<BaselineFlags>();
  CLI::App* baseline = app.add_subcommand("baseline", "Run an ablation variant or classical model");
  add_train_flags(baseline, base_flags->train);
  baseline
      ->add_option("--model", base_flags->model,
                   "lstm|encoder-lstm|encoder-decoder|encoder-adaptation|finetune|ha|lr")
      ->required();
  baseline->add_option("--pretrained", base_flags->pretrained, "Shared artifact path");
  baseline->add_option("--gamma", base_flags->gamma, "Reconstruction weight");
  baseline->add_option("--beta", base_flags->beta, "Alignment weight");
  baseline->add_option("--report", base_flags->report_dir, "Directory for report + loss trace");
  baseline->add_option("--dump-trace-csv", base_flags->trace_path, "Write the loss trace CSV here");
  baseline->callback([base_flags] { cmd_baseline(*base_flags); });

  auto sweep_flags = std::make_shared<SweepFlags>();
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Grid sweep over gamma/beta loss weights");
  add_train_flags(sweep_cmd, sweep_flags->train);
  sweep_cmd->add_option("--pretrained", sweep_flags->pretrained, "Shared artifact path")
      ->required();
  sweep_cmd->add_option("--gamma", sweep_flags->gamma_range, "VALUE or START:STOP:STEP")
      ->required();
  sweep_cmd->add_option("--beta", sweep_flags->beta_range, "VALUE or START:STOP:STEP")->required();
  sweep_cmd->add_option("--jobs", sweep_flags->jobs, "Parallel runs");
  sweep_cmd->add_option("--out", sweep_flags->out_dir, "Directory for sweep summary + CSV");
  sweep_cmd->callback([sweep_flags] { cmd_sweep(*sweep_flags); });

  auto eval_flags = std::make_shared<EvalFlags>();
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a prediction CSV against an actual CSV");
  eval_cmd->add_option("--pred", eval_flags->pred, "Predictions CSV")->required();
  eval_cmd->add_option("--actual", eval_flags->actual, "Actuals CSV")->required();
  eval_cmd->add_flag("--mask-zeros-all", eval_flags->mask_zeros_all,
                     "Mask zero actuals for every maskable metric");
  eval_cmd->callback([eval_flags] { cmd_eval(*eval_flags); });

  auto corr_flags = std::make_shared<CorrelateFlags>();
  CLI::App* correlate = app.add_subcommand("correlate", "Station-pair Pearson correlation matrix");
  correlate->add_option("--a", corr_flags->a, "First demand CSV")->required();
  correlate->add_option("--b", corr_flags->b, "Second demand CSV")->required();
  correlate->add_option("--out", corr_flags->out, "Output matrix CSV")->required();
  correlate->callback([corr_flags] { cmd_correlate(*corr_flags); });

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Verify analytic gradients numerically");
  gradcheck->callback([] { cmd_gradcheck(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.error_class() << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace unkadf::cli

int main(int argc, char** argv) { return unkadf::cli::run(argc, argv); }
