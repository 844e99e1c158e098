#pragma once

#include <span>

#include <Eigen/Dense>

#include "ccasgnn/baselines/features.hpp"
#include "ccasgnn/data/cascade.hpp"

namespace ccasgnn::baselines {

/// y ≈ intercept + x · weights.
struct LinearFit {
  double intercept = 0.0;
  Eigen::VectorXd weights;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// Closed-form ridge regression. Solves
///   (Z^T Z + P) [b; w] = Z^T y,  Z = [1 | X],  P = diag(0, ridge, ..., ridge),
/// so the intercept is never shrunk. With ridge = 0 and a rank-deficient X
/// this throws NumericalError.
LinearFit fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge = 1e-6);

/// Infinity norm of the normal-equation residual of `fit`.
double normal_equation_residual(const LinearFit& fit, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                double ridge);

/// Feature-Linear: standardized cascade features, ridge regression on the
/// log2 growth target.
struct FeatureLinear {
  FeatureScaler scaler;
  LinearFit fit;

  static FeatureLinear train(std::span<const data::CascadeGraph> cascades, double ridge = 1e-6);
  double predict(const data::CascadeGraph& cascade) const;
};

}  // namespace ccasgnn::baselines
