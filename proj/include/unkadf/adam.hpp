#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "unkadf/param.hpp"

namespace unkadf {

struct AdamConfig {
  double lr = 0.0001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Frozen parameters are skipped entirely: their
/// values stay bitwise identical and their moment slots are never touched.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  std::uint64_t steps_taken() const { return t_; }

  void step(const std::vector<Param*>& params) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (Param* p : params) {
      if (p->frozen) continue;
      double* v = p->value.data();
      const double* g = p->grad.data();
      double* m1 = p->m1.data();
      double* m2 = p->m2.data();
      const std::size_t n = p->value.size();
      for (std::size_t k = 0; k < n; ++k) {
        m1[k] = cfg_.beta1 * m1[k] + (1.0 - cfg_.beta1) * g[k];
        m2[k] = cfg_.beta2 * m2[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
        const double mhat = m1[k] / bc1;
        const double vhat = m2[k] / bc2;
        v[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

 private:
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
};

}  // namespace unkadf
