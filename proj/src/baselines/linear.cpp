#include "ccasgnn/baselines/linear.hpp"

#include "ccasgnn/errors.hpp"

namespace ccasgnn::baselines {

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z(x.rows(), x.cols() + 1);
  z.col(0).setOnes();
  z.rightCols(x.cols()) = x;
  return z;
}

Eigen::MatrixXd penalty(Eigen::Index p, double ridge) {
  Eigen::VectorXd d = Eigen::VectorXd::Constant(p, ridge);
  d(0) = 0.0;
  return d.asDiagonal();
}

}  // namespace

Eigen::VectorXd LinearFit::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights.size()) {
    throw DimensionError("LinearFit::predict: expected " + std::to_string(weights.size()) +
                         " columns, got " + std::to_string(x.cols()));
  }
  return (x * weights).array() + intercept;
}

LinearFit fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge) {
  if (x.rows() < 2) throw ContractViolation("fit_linear: need at least 2 samples");
  if (x.rows() != y.size()) throw DimensionError("fit_linear: X and y have different row counts");
  if (ridge < 0.0) throw ContractViolation("fit_linear: ridge must be nonnegative");

  const Eigen::MatrixXd z = with_intercept(x);
  const Eigen::MatrixXd a = z.transpose() * z + penalty(z.cols(), ridge);
  const Eigen::VectorXd b = z.transpose() * y;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  // Duplicated columns leave a pivot at rounding level, just above Eigen's
  // default cut-off, so unpenalized systems get a looser one.
  if (ridge == 0.0) qr.setThreshold(1e-12);
  if (qr.rank() < a.cols()) {
    throw NumericalError("fit_linear: normal equations are singular (rank " + std::to_string(qr.rank()) +
                         " of " + std::to_string(a.cols()) + "); use ridge > 0");
  }
  const Eigen::VectorXd coef = qr.solve(b);
  if (!coef.allFinite()) throw NumericalError("fit_linear: non-finite solution; use ridge > 0");

  LinearFit fit;
  fit.intercept = coef(0);
  fit.weights = coef.tail(x.cols());
  return fit;
}

double normal_equation_residual(const LinearFit& fit, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                double ridge) {
  const Eigen::MatrixXd z = with_intercept(x);
  Eigen::VectorXd coef(z.cols());
  coef << fit.intercept, fit.weights;
  const Eigen::VectorXd r = (z.transpose() * z + penalty(z.cols(), ridge)) * coef - z.transpose() * y;
  return r.lpNorm<Eigen::Infinity>();
}

FeatureLinear FeatureLinear::train(std::span<const data::CascadeGraph> cascades, double ridge) {
  const Eigen::MatrixXd x = feature_matrix(cascades);
  FeatureLinear m;
  m.scaler = FeatureScaler::fit(x);
  m.fit = fit_linear(m.scaler.apply(x), log_targets(cascades), ridge);
  return m;
}

double FeatureLinear::predict(const data::CascadeGraph& cascade) const {
  const Eigen::MatrixXd x = extract_features(cascade).as_row();
  return fit.predict(scaler.apply(x))(0);
}

}  // namespace ccasgnn::baselines
