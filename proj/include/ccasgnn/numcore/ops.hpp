#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ccasgnn/numcore/tape.hpp"

namespace ccasgnn::numcore {

using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Scalar>
BasicTape<Scalar>& common_tape(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b,
                               const char* op) {
  if (&a.tape() != &b.tape()) {
    throw ContractViolation(std::string(op) + ": operands recorded on different tapes");
  }
  return a.tape();
}

template <typename Scalar>
void require_same_shape(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b,
                        const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.value()) +
                         " vs " + shape_string(b.value()));
  }
}

}  // namespace detail

template <typename Scalar>
BasicNodeRef<Scalar> matmul(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b) {
  auto& t = detail::common_tape(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: shape mismatch " + shape_string(a.value()) + " vs " +
                         shape_string(b.value()));
  }
  MatrixX<Scalar> out = a.value() * b.value();
  return t.record(OpKind::kMatMul, std::move(out), {a, b},
                  [a, b](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                    if (tp.requires_grad(a)) tp.accumulate(a, g * tp.value(b).transpose());
                    if (tp.requires_grad(b)) tp.accumulate(b, tp.value(a).transpose() * g);
                  });
}

template <typename Scalar>
BasicNodeRef<Scalar> add(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b) {
  auto& t = detail::common_tape(a, b, "add");
  detail::require_same_shape(a, b, "add");
  MatrixX<Scalar> out = a.value() + b.value();
  return t.record(OpKind::kAdd, std::move(out), {a, b},
                  [a, b](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                    tp.accumulate(a, g);
                    tp.accumulate(b, g);
                  });
}

template <typename Scalar>
BasicNodeRef<Scalar> sub(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b) {
  auto& t = detail::common_tape(a, b, "sub");
  detail::require_same_shape(a, b, "sub");
  MatrixX<Scalar> out = a.value() - b.value();
  return t.record(OpKind::kSub, std::move(out), {a, b},
                  [a, b](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                    tp.accumulate(a, g);
                    tp.accumulate(b, -g);
                  });
}

/// Elementwise product.
template <typename Scalar>
BasicNodeRef<Scalar> hadamard(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b) {
  auto& t = detail::common_tape(a, b, "hadamard");
  detail::require_same_shape(a, b, "hadamard");
  MatrixX<Scalar> out = a.value().cwiseProduct(b.value());
  return t.record(OpKind::kHadamard, std::move(out), {a, b},
                  [a, b](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                    if (tp.requires_grad(a)) tp.accumulate(a, g.cwiseProduct(tp.value(b)));
                    if (tp.requires_grad(b)) tp.accumulate(b, g.cwiseProduct(tp.value(a)));
                  });
}

template <typename Scalar>
BasicNodeRef<Scalar> scale(const BasicNodeRef<Scalar>& a, Scalar s) {
  MatrixX<Scalar> out = s * a.value();
  return a.tape().record(OpKind::kScale, std::move(out), {a},
                         [a, s](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           tp.accumulate(a, s * g);
                         });
}

template <typename Scalar>
BasicNodeRef<Scalar> operator+(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b) {
  return add(a, b);
}
template <typename Scalar>
BasicNodeRef<Scalar> operator-(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b) {
  return sub(a, b);
}
template <typename Scalar>
BasicNodeRef<Scalar> operator*(Scalar s, const BasicNodeRef<Scalar>& a) {
  return scale(a, s);
}

/// Subgradient at 0 is 1.
template <typename Scalar>
BasicNodeRef<Scalar> relu(const BasicNodeRef<Scalar>& x) {
  MatrixX<Scalar> out = x.value().cwiseMax(Scalar(0));
  return x.tape().record(OpKind::kRelu, std::move(out), {x},
                         [x](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           const auto& v = tp.value(x);
                           tp.accumulate(x, (v.array() >= Scalar(0)).select(g, Scalar(0)));
                         });
}

/// x for x >= 0, slope * x otherwise; derivative at 0 is 1.
template <typename Scalar>
BasicNodeRef<Scalar> leaky_relu(const BasicNodeRef<Scalar>& x, Scalar slope) {
  if (!(slope > Scalar(0) && slope < Scalar(1))) {
    throw ContractViolation("leaky_relu: slope must lie in (0,1)");
  }
  const auto& v = x.value();
  MatrixX<Scalar> out = (v.array() >= Scalar(0)).select(v, slope * v);
  return x.tape().record(OpKind::kLeakyRelu, std::move(out), {x},
                         [x, slope](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           const auto& in = tp.value(x);
                           tp.accumulate(x, (in.array() >= Scalar(0)).select(g, slope * g));
                         });
}

/// exp(x) - 1 below zero, identity above.
template <typename Scalar>
BasicNodeRef<Scalar> elu(const BasicNodeRef<Scalar>& x) {
  const auto& v = x.value();
  MatrixX<Scalar> out = (v.array() >= Scalar(0)).select(v, v.array().exp() - Scalar(1));
  return x.tape().record(
      OpKind::kElu, std::move(out), {x}, [x](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
        const auto& in = tp.value(x);
        MatrixX<Scalar> d = (in.array() >= Scalar(0)).select(MatrixX<Scalar>::Ones(in.rows(), in.cols()),
                                                             in.array().exp().matrix());
        tp.accumulate(x, g.cwiseProduct(d));
      });
}

namespace detail {

template <typename Scalar>
MatrixX<Scalar> softmax_rows(const MatrixX<Scalar>& x, const BoolMask* mask) {
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    Scalar mx = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (mask == nullptr || (*mask)(r, c)) mx = std::max(mx, x(r, c));
    }
    Scalar total = Scalar(0);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (mask == nullptr || (*mask)(r, c)) {
        out(r, c) = std::exp(x(r, c) - mx);
        total += out(r, c);
      }
    }
    out.row(r) /= total;
  }
  return out;
}

}  // namespace detail

/// Softmax along each row with per-row max subtraction.
template <typename Scalar>
BasicNodeRef<Scalar> row_softmax(const BasicNodeRef<Scalar>& x) {
  MatrixX<Scalar> out = detail::softmax_rows<Scalar>(x.value(), nullptr);
  MatrixX<Scalar> y = out;
  return x.tape().record(OpKind::kRowSoftmax, std::move(out), {x},
                         [x, y = std::move(y)](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           MatrixX<Scalar> gy = g.cwiseProduct(y);
                           auto dots = gy.rowwise().sum();
                           tp.accumulate(x, gy - y.cwiseProduct(dots.replicate(1, y.cols())));
                         });
}

/// Row softmax restricted to entries where `mask` is true; the rest are 0.
/// Every row must keep at least one entry.
template <typename Scalar>
BasicNodeRef<Scalar> masked_row_softmax(const BasicNodeRef<Scalar>& x, const BoolMask& mask) {
  if (mask.rows() != x.rows() || mask.cols() != x.cols()) {
    throw DimensionError("masked_row_softmax: mask " + shape_string(mask) + " vs input " +
                         shape_string(x.value()));
  }
  for (Eigen::Index r = 0; r < mask.rows(); ++r) {
    if (!mask.row(r).any()) throw ContractViolation("masked_row_softmax: empty row in mask");
  }
  MatrixX<Scalar> out = detail::softmax_rows<Scalar>(x.value(), &mask);
  MatrixX<Scalar> y = out;
  return x.tape().record(OpKind::kRowSoftmax, std::move(out), {x},
                         [x, y = std::move(y)](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           MatrixX<Scalar> gy = g.cwiseProduct(y);
                           auto dots = gy.rowwise().sum();
                           tp.accumulate(x, gy - y.cwiseProduct(dots.replicate(1, y.cols())));
                         });
}

template <typename Scalar>
BasicNodeRef<Scalar> concat_cols(const BasicNodeRef<Scalar>& a, const BasicNodeRef<Scalar>& b) {
  auto& t = detail::common_tape(a, b, "concat_cols");
  if (a.rows() != b.rows()) {
    throw DimensionError("concat_cols: row mismatch " + shape_string(a.value()) + " vs " +
                         shape_string(b.value()));
  }
  const Eigen::Index ca = a.cols();
  const Eigen::Index cb = b.cols();
  MatrixX<Scalar> out(a.rows(), ca + cb);
  out << a.value(), b.value();
  return t.record(OpKind::kConcatCols, std::move(out), {a, b},
                  [a, b, ca, cb](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                    tp.accumulate(a, g.leftCols(ca));
                    tp.accumulate(b, g.rightCols(cb));
                  });
}

/// Rows [start, start + count).
template <typename Scalar>
BasicNodeRef<Scalar> slice_rows(const BasicNodeRef<Scalar>& x, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > x.rows()) {
    throw DimensionError("slice_rows: rows [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") out of " + shape_string(x.value()));
  }
  MatrixX<Scalar> out = x.value().middleRows(start, count);
  const Eigen::Index rows = x.rows();
  return x.tape().record(OpKind::kSliceRows, std::move(out), {x},
                         [x, start, count, rows](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           MatrixX<Scalar> full = MatrixX<Scalar>::Zero(rows, g.cols());
                           full.middleRows(start, count) = g;
                           tp.accumulate(x, full);
                         });
}

/// Column means, n x m -> 1 x m.
template <typename Scalar>
BasicNodeRef<Scalar> mean_rows(const BasicNodeRef<Scalar>& x) {
  if (x.rows() == 0) throw DimensionError("mean_rows: no rows");
  MatrixX<Scalar> out = x.value().colwise().mean();
  const Eigen::Index n = x.rows();
  return x.tape().record(OpKind::kMeanRows, std::move(out), {x},
                         [x, n](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           tp.accumulate(x, (g / Scalar(n)).replicate(n, 1));
                         });
}

template <typename Scalar>
BasicNodeRef<Scalar> sum(const BasicNodeRef<Scalar>& x) {
  MatrixX<Scalar> out = MatrixX<Scalar>::Constant(1, 1, x.value().sum());
  const Eigen::Index r = x.rows();
  const Eigen::Index c = x.cols();
  return x.tape().record(OpKind::kSum, std::move(out), {x},
                         [x, r, c](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           tp.accumulate(x, MatrixX<Scalar>::Constant(r, c, g(0, 0)));
                         });
}

/// Elementwise base-2 logarithm; entries must be positive.
template <typename Scalar>
BasicNodeRef<Scalar> log2(const BasicNodeRef<Scalar>& x) {
  if ((x.value().array() <= Scalar(0)).any()) {
    throw ContractViolation("log2: non-positive entry");
  }
  MatrixX<Scalar> out = x.value().array().log() / std::numbers::ln2_v<Scalar>;
  return x.tape().record(OpKind::kLog2, std::move(out), {x},
                         [x](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           const auto& in = tp.value(x);
                           tp.accumulate(x, g.cwiseQuotient(in * std::numbers::ln2_v<Scalar>));
                         });
}

template <typename Scalar>
BasicNodeRef<Scalar> transpose(const BasicNodeRef<Scalar>& x) {
  MatrixX<Scalar> out = x.value().transpose();
  return x.tape().record(OpKind::kTranspose, std::move(out), {x},
                         [x](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                           tp.accumulate(x, g.transpose());
                         });
}

/// x (n x m) plus row (1 x m) added to every row.
template <typename Scalar>
BasicNodeRef<Scalar> add_row_broadcast(const BasicNodeRef<Scalar>& x, const BasicNodeRef<Scalar>& row) {
  auto& t = detail::common_tape(x, row, "add_row_broadcast");
  if (row.rows() != 1 || row.cols() != x.cols()) {
    throw DimensionError("add_row_broadcast: " + shape_string(x.value()) + " vs row " +
                         shape_string(row.value()));
  }
  MatrixX<Scalar> out = x.value().rowwise() + row.value().row(0);
  return t.record(OpKind::kAddRowBroadcast, std::move(out), {x, row},
                  [x, row](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                    tp.accumulate(x, g);
                    if (tp.requires_grad(row)) tp.accumulate(row, g.colwise().sum());
                  });
}

/// out(i, j) = col(i) + row(j) for col n x 1 and row 1 x m.
template <typename Scalar>
BasicNodeRef<Scalar> outer_add(const BasicNodeRef<Scalar>& col, const BasicNodeRef<Scalar>& row) {
  auto& t = detail::common_tape(col, row, "outer_add");
  if (col.cols() != 1 || row.rows() != 1) {
    throw DimensionError("outer_add: expected column and row, got " + shape_string(col.value()) +
                         " and " + shape_string(row.value()));
  }
  const Eigen::Index n = col.rows();
  const Eigen::Index m = row.cols();
  MatrixX<Scalar> out = col.value().replicate(1, m) + row.value().replicate(n, 1);
  return t.record(OpKind::kOuterAdd, std::move(out), {col, row},
                  [col, row](BasicTape<Scalar>& tp, const MatrixX<Scalar>& g) {
                    if (tp.requires_grad(col)) tp.accumulate(col, g.rowwise().sum());
                    if (tp.requires_grad(row)) tp.accumulate(row, g.colwise().sum());
                  });
}

}  // namespace ccasgnn::numcore
