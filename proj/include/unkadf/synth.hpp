#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "unkadf/demand.hpp"
#include "unkadf/errors.hpp"
#include "unkadf/rng.hpp"

namespace unkadf {

/// Generator settings for correlated multimodal demand. `share` blends a
/// daily/weekly factor common to all modes against per-station AR(1) noise;
/// at share=1 every station is a scaled copy of the same seasonal curve, at
/// share=0 the modes are independent.
struct SynthConfig {
  std::vector<int> mode_station_counts{8, 6};
  int total_steps = 2184;  // 91 days of hourly counts
  double share = 0.9;
  double ar_coefficient = 0.7;
  double noise_std = 1.0;
  double scale = 50.0;  // passengers per unit of the latent signal
  std::uint64_t seed = 0;
};

inline void validate(const SynthConfig& cfg) {
  if (cfg.mode_station_counts.empty()) throw errors::config("at least one mode is required");
  for (int n : cfg.mode_station_counts) {
    if (n < 1) throw errors::config("station counts must be >= 1, got " + std::to_string(n));
  }
  if (cfg.total_steps < 48) {
    throw errors::config("total steps must be >= 48, got " + std::to_string(cfg.total_steps));
  }
  if (!(cfg.share >= 0.0 && cfg.share <= 1.0)) {
    throw errors::config("share must be in [0, 1], got " + std::to_string(cfg.share));
  }
  if (!(cfg.ar_coefficient >= 0.0 && cfg.ar_coefficient < 1.0)) {
    throw errors::config("AR coefficient must be in [0, 1), got " +
                         std::to_string(cfg.ar_coefficient));
  }
  if (!(cfg.noise_std >= 0.0)) throw errors::config("noise std must be >= 0");
  if (!(cfg.scale > 0.0)) throw errors::config("scale must be > 0");
}

/// Shared seasonal factor: a daily sine whose amplitude breathes on a weekly
/// cycle.
inline double seasonal_factor(int t) {
  const double two_pi = 2.0 * 3.14159265358979323846;
  return 1.0 + std::sin(two_pi * t / 24.0) * (1.0 + 0.2 * std::sin(two_pi * t / 168.0));
}

/// One DemandMatrix per mode, deterministic given the config. Each mode draws
/// from its own forked stream, so editing one mode's station count leaves the
/// other modes' series untouched.
inline std::vector<DemandMatrix> synth_generate(const SynthConfig& cfg) {
  validate(cfg);
  const Rng root(cfg.seed);
  // Innovations scaled so the stationary AR(1) process has unit variance.
  const double innovation_std = std::sqrt(1.0 - cfg.ar_coefficient * cfg.ar_coefficient);

  std::vector<DemandMatrix> modes;
  for (std::size_t d = 0; d < cfg.mode_station_counts.size(); ++d) {
    Rng rng = root.fork(static_cast<std::uint64_t>(d));
    const int n = cfg.mode_station_counts[d];

    DemandMatrix mode;
    mode.values = Matrix(cfg.total_steps, n);
    for (int i = 0; i < n; ++i) {
      mode.station_ids.push_back("m" + std::to_string(d) + "s" + std::to_string(i));
      const double loading = rng.uniform(0.5, 1.5);
      double u = rng.normal();
      for (int t = 0; t < cfg.total_steps; ++t) {
        if (t > 0) u = cfg.ar_coefficient * u + innovation_std * rng.normal();
        const double latent = cfg.share * loading * seasonal_factor(t) + (1.0 - cfg.share) * u;
        const double noisy = cfg.scale * latent + cfg.noise_std * rng.normal();
        mode.values(t, i) = std::max(0.0, std::round(noisy));
      }
    }
    modes.push_back(std::move(mode));
  }
  return modes;
}

}  // namespace unkadf
