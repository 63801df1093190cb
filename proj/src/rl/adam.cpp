#include "qprep/rl/adam.hpp"

#include <cmath>

#include "qprep/core/error.hpp"

namespace qprep::rl {

double clip_gradient_norm(RealVector& grad, double max_norm) {
  const double norm = grad.norm();
  if (!std::isfinite(norm)) throw NumericalError("numerical health: non-finite gradient norm");
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
  return norm;
}

Adam::Adam(Eigen::Index size, const AdamConfig& cfg)
    : cfg_(cfg), m_(RealVector::Zero(size)), v_(RealVector::Zero(size)) {
  QPREP_REQUIRE(cfg.learning_rate > 0.0 && cfg.epsilon > 0.0, "Adam: learning rate and epsilon must be positive");
  QPREP_REQUIRE(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 && cfg.beta2 < 1.0,
                "Adam: betas must lie in [0, 1)");
}

double Adam::step(RealVector& params, RealVector& grad) {
  QPREP_REQUIRE(params.size() == m_.size() && grad.size() == m_.size(), "Adam::step: size mismatch");
  const double norm = clip_gradient_norm(grad, cfg_.clip_norm);
  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
  return norm;
}

void Adam::restore(std::int64_t t, RealVector m, RealVector v) {
  QPREP_REQUIRE(m.size() == m_.size() && v.size() == v_.size() && t >= 0, "Adam::restore: state mismatch");
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace qprep::rl
