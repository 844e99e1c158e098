#pragma once

#include <algorithm>
#include <cmath>

#include "ccasgnn/numcore/tape.hpp"

namespace ccasgnn::numcore {

/// Central differences of a scalar function with respect to every entry of
/// `x`. `x` is perturbed in place and restored before returning.
template <typename Scalar, typename Fn>
MatrixX<Scalar> central_difference(MatrixX<Scalar>& x, Fn&& f, Scalar step) {
  MatrixX<Scalar> out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Scalar saved = x(i, j);
      x(i, j) = saved + step;
      const Scalar up = f();
      x(i, j) = saved - step;
      const Scalar down = f();
      x(i, j) = saved;
      out(i, j) = (up - down) / (Scalar(2) * step);
    }
  }
  return out;
}

/// Worst mismatch between analytic and numeric derivatives. Entries where
/// both magnitudes fall below `floor` are judged by absolute difference
/// against the floor; all others by relative difference against rel_tol.
template <typename Scalar>
struct GradientComparison {
  Scalar worst_relative = Scalar(0);
  Scalar worst_absolute = Scalar(0);
  bool passed = true;
};

template <typename Scalar>
GradientComparison<Scalar> compare_gradients(const MatrixX<Scalar>& analytic,
                                             const MatrixX<Scalar>& numeric, Scalar rel_tol,
                                             Scalar floor) {
  GradientComparison<Scalar> cmp;
  for (Eigen::Index k = 0; k < analytic.size(); ++k) {
    const Scalar a = analytic.data()[k];
    const Scalar n = numeric.data()[k];
    const Scalar diff = std::abs(a - n);
    const Scalar scale = std::max(std::abs(a), std::abs(n));
    if (scale < floor) {
      cmp.worst_absolute = std::max(cmp.worst_absolute, diff);
      if (diff >= floor) cmp.passed = false;
    } else {
      cmp.worst_relative = std::max(cmp.worst_relative, diff / scale);
      if (diff / scale >= rel_tol) cmp.passed = false;
    }
  }
  return cmp;
}

}  // namespace ccasgnn::numcore
