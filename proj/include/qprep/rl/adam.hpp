#pragma once

#include <cstdint>

#include "qprep/core/types.hpp"

namespace qprep::rl {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-3;
  /// Global gradient-norm clip; <= 0 disables.
  double clip_norm = 80.0;
};

/// Scales `grad` in place so that its norm is at most max_norm. Returns the
/// norm before clipping.
double clip_gradient_norm(RealVector& grad, double max_norm);

class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index size, const AdamConfig& cfg);

  /// Clips `grad` (in place) and applies one bias-corrected update.
  /// Returns the pre-clip gradient norm.
  double step(RealVector& params, RealVector& grad);

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return t_; }
  const RealVector& first_moment() const { return m_; }
  const RealVector& second_moment() const { return v_; }
  void restore(std::int64_t t, RealVector m, RealVector v);

 private:
  AdamConfig cfg_{};
  std::int64_t t_ = 0;
  RealVector m_, v_;
};

}  // namespace qprep::rl
