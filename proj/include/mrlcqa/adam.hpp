#pragma once

#include <Eigen/Dense>

namespace mrlcqa {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam on a flat parameter vector, stepping along the gradient (ascent).
class Adam {
 public:
  Adam(Eigen::Index size, AdamConfig cfg) : cfg_(cfg), m_(Eigen::VectorXd::Zero(size)), v_(m_) {}

  void ascend(Eigen::VectorXd& theta, const Eigen::VectorXd& grad);
  void descend(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) { ascend(theta, -grad); }

  long steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace mrlcqa
