#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ccasgnn/errors.hpp"
#include "ccasgnn/numcore/finite_difference.hpp"
#include "ccasgnn/numcore/ops.hpp"
#include "ccasgnn/numcore/tape.hpp"

namespace {

using namespace ccasgnn;
using namespace ccasgnn::numcore;

using Build = std::function<NodeRef(Tape&, const std::vector<NodeRef>&)>;

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  return m;
}

// Keeps entries at least `gap` away from zero so kinks are not straddled.
Matrix away_from_zero(Matrix m, double gap = 0.05) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    double& v = m.data()[k];
    if (std::abs(v) < gap) v = v < 0 ? v - gap : v + gap;
  }
  return m;
}

// Checks every input's tape gradient of sum(out ∘ R), R random, against
// central differences at step 1e-5.
void expect_gradients(const std::vector<Matrix>& inputs, const Build& build, double rel_tol,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tape tape;
  std::vector<NodeRef> leaves;
  for (const Matrix& x : inputs) leaves.push_back(tape.parameter(x));
  const NodeRef out = build(tape, leaves);
  const Matrix weights = random_matrix(out.rows(), out.cols(), rng);
  tape.backward(sum(hadamard(out, tape.constant(weights))));

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::vector<Matrix> perturbed = inputs;
    auto objective = [&] {
      Tape t;
      std::vector<NodeRef> refs;
      for (const Matrix& x : perturbed) refs.push_back(t.constant(x));
      return build(t, refs).value().cwiseProduct(weights).sum();
    };
    const Matrix numeric = central_difference(perturbed[i], objective, 1e-5);
    const auto cmp = compare_gradients<double>(tape.grad(leaves[i]), numeric, rel_tol, 1e-8);
    EXPECT_TRUE(cmp.passed) << "input " << i << " worst relative " << cmp.worst_relative << " worst absolute "
                            << cmp.worst_absolute;
  }
}

struct Dims {
  Eigen::Index r, k, c;
};

Dims random_dims(std::mt19937_64& rng) {
  std::uniform_int_distribution<Eigen::Index> d(1, 8);
  return {d(rng), d(rng), d(rng)};
}

constexpr int kSeeds = 10;

TEST(MatMul, IdentityLeavesMatrixUnchanged) {
  Tape t;
  const Matrix m = (Matrix(2, 2) << 3, -1, 2, 5).finished();
  EXPECT_EQ(matmul(t.constant(Matrix::Identity(2, 2)), t.constant(m)).value(), m);
}

TEST(MatMul, HandComputedProduct) {
  Tape t;
  const Matrix a = (Matrix(2, 2) << 1, 2, 3, 4).finished();
  const Matrix b = (Matrix(2, 1) << 1, 1).finished();
  const Matrix expected = (Matrix(2, 1) << 3, 7).finished();
  EXPECT_EQ(matmul(t.constant(a), t.constant(b)).value(), expected);
}

TEST(MatMul, ShapeMismatchNamesBothShapes) {
  Tape t;
  try {
    matmul(t.constant(Matrix::Zero(2, 3)), t.constant(Matrix::Zero(2, 3)));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2x3"), std::string::npos) << what;
  }
}

TEST(MatMul, GradientOfSumOfProduct) {
  for (int s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(100 + s);
    const Dims d = random_dims(rng);
    const Matrix a = random_matrix(d.r, d.k, rng);
    const Matrix b = random_matrix(d.k, d.c, rng);
    Tape t;
    const NodeRef ra = t.parameter(a);
    const NodeRef rb = t.parameter(b);
    t.backward(sum(matmul(ra, rb)));
    Matrix x = a;
    const Matrix numeric = central_difference(x, [&] { return (x * b).sum(); }, 1e-5);
    EXPECT_TRUE(compare_gradients<double>(t.grad(ra), numeric, 1e-6, 1e-8).passed);
    // dL/da = g b^T with g all ones.
    EXPECT_TRUE(t.grad(ra).isApprox(Matrix::Ones(d.r, d.c) * b.transpose(), 1e-12));
    EXPECT_TRUE(t.grad(rb).isApprox(a.transpose() * Matrix::Ones(d.r, d.c), 1e-12));
  }
}

TEST(FiniteDifference, MatMul) {
  for (int s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(200 + s);
    const Dims d = random_dims(rng);
    expect_gradients({random_matrix(d.r, d.k, rng), random_matrix(d.k, d.c, rng)},
                     [](Tape&, const auto& x) { return matmul(x[0], x[1]); }, 1e-6, s);
  }
}

TEST(FiniteDifference, Elementwise) {
  for (int s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(300 + s);
    const Dims d = random_dims(rng);
    const Matrix a = random_matrix(d.r, d.c, rng);
    const Matrix b = random_matrix(d.r, d.c, rng);
    expect_gradients({a, b}, [](Tape&, const auto& x) { return add(x[0], x[1]); }, 1e-6, s);
    expect_gradients({a, b}, [](Tape&, const auto& x) { return sub(x[0], x[1]); }, 1e-6, s);
    expect_gradients({a, b}, [](Tape&, const auto& x) { return hadamard(x[0], x[1]); }, 1e-6, s);
    expect_gradients({a}, [](Tape&, const auto& x) { return scale(x[0], -2.5); }, 1e-6, s);
    expect_gradients({a}, [](Tape&, const auto& x) { return transpose(x[0]); }, 1e-6, s);
    expect_gradients({a}, [](Tape&, const auto& x) { return mean_rows(x[0]); }, 1e-6, s);
    expect_gradients({a}, [](Tape&, const auto& x) { return sum(x[0]); }, 1e-6, s);
  }
}

TEST(FiniteDifference, Activations) {
  for (int s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(400 + s);
    const Dims d = random_dims(rng);
    const Matrix a = away_from_zero(random_matrix(d.r, d.c, rng, -2.0, 2.0));
    expect_gradients({a}, [](Tape&, const auto& x) { return relu(x[0]); }, 1e-6, s);
    expect_gradients({a}, [](Tape&, const auto& x) { return leaky_relu(x[0], 0.2); }, 1e-6, s);
    expect_gradients({a}, [](Tape&, const auto& x) { return elu(x[0]); }, 1e-6, s);
    const Matrix positive = random_matrix(d.r, d.c, rng, 0.5, 3.0);
    expect_gradients({positive}, [](Tape&, const auto& x) { return log2(x[0]); }, 1e-6, s);
  }
}

TEST(FiniteDifference, Softmax) {
  for (int s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(500 + s);
    const Dims d = random_dims(rng);
    const Matrix a = random_matrix(d.r, d.c, rng, -3.0, 3.0);
    expect_gradients({a}, [](Tape&, const auto& x) { return row_softmax(x[0]); }, 1e-4, s);
    BoolMask mask = random_matrix(d.r, d.c, rng).array() > 0.0;
    for (Eigen::Index i = 0; i < d.r; ++i) mask(i, i % d.c) = true;
    expect_gradients({a}, [&](Tape&, const auto& x) { return masked_row_softmax(x[0], mask); }, 1e-4, s);
  }
}

TEST(FiniteDifference, StructuralOps) {
  for (int s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(600 + s);
    const Dims d = random_dims(rng);
    const Matrix a = random_matrix(d.r, d.k, rng);
    const Matrix b = random_matrix(d.r, d.c, rng);
    expect_gradients({a, b}, [](Tape&, const auto& x) { return concat_cols(x[0], x[1]); }, 1e-6, s);
    const Eigen::Index start = d.r / 2;
    expect_gradients({a}, [&](Tape&, const auto& x) { return slice_rows(x[0], start, d.r - start); }, 1e-6, s);
    const Matrix row = random_matrix(1, d.k, rng);
    expect_gradients({a, row}, [](Tape&, const auto& x) { return add_row_broadcast(x[0], x[1]); }, 1e-6, s);
    const Matrix col = random_matrix(d.r, 1, rng);
    const Matrix row2 = random_matrix(1, d.c, rng);
    expect_gradients({col, row2}, [](Tape&, const auto& x) { return outer_add(x[0], x[1]); }, 1e-6, s);
  }
}

TEST(Softmax, UniformRow) {
  Tape t;
  const Matrix y = row_softmax(t.constant(Matrix::Zero(1, 3))).value();
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(y(0, j), 1.0 / 3.0, 1e-15);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  Tape t;
  const Matrix y = row_softmax(t.constant(Matrix::Constant(1, 2, 1000.0))).value();
  EXPECT_DOUBLE_EQ(y(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(y(0, 1), 0.5);
}

TEST(Softmax, TwoLogits) {
  Tape t;
  const Matrix y = row_softmax(t.constant((Matrix(1, 2) << 1, 2).finished())).value();
  const double e = std::exp(1.0);
  EXPECT_NEAR(y(0, 0), 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(y(0, 1), e / (1.0 + e), 1e-15);
}

TEST(Softmax, RowsSumToOneAndArePositive) {
  std::mt19937_64 rng(7);
  for (int s = 0; s < 50; ++s) {
    Tape t;
    const Matrix y = row_softmax(t.constant(random_matrix(6, 6, rng, -30.0, 30.0))).value();
    for (Eigen::Index i = 0; i < y.rows(); ++i) EXPECT_NEAR(y.row(i).sum(), 1.0, 1e-9);
    EXPECT_TRUE((y.array() > 0.0).all());
  }
}

TEST(Softmax, MaskedRowWithoutEntriesIsRejected) {
  Tape t;
  BoolMask mask = BoolMask::Constant(2, 2, true);
  mask.row(1).setConstant(false);
  EXPECT_THROW(masked_row_softmax(t.constant(Matrix::Zero(2, 2)), mask), ContractViolation);
}

TEST(LeakyRelu, ScalarExamples) {
  Tape t;
  EXPECT_EQ(leaky_relu(t.scalar_constant(5.0), 0.2).item(), 5.0);
  EXPECT_DOUBLE_EQ(leaky_relu(t.scalar_constant(-5.0), 0.2).item(), -1.0);
  EXPECT_EQ(leaky_relu(t.scalar_constant(0.0), 0.2).item(), 0.0);
}

TEST(LeakyRelu, KinkUsesRightDerivative) {
  Tape t;
  const NodeRef x = t.scalar_parameter(0.0);
  t.backward(leaky_relu(x, 0.2));
  EXPECT_EQ(t.grad(x)(0, 0), 1.0);
  Tape u;
  const NodeRef y = u.scalar_parameter(0.0);
  u.backward(relu(y));
  EXPECT_EQ(u.grad(y)(0, 0), 1.0);
}

TEST(LeakyRelu, SlopeOutsideUnitIntervalIsRejected) {
  Tape t;
  EXPECT_THROW(leaky_relu(t.scalar_constant(1.0), 1.5), ContractViolation);
  EXPECT_THROW(leaky_relu(t.scalar_constant(1.0), 0.0), ContractViolation);
}

TEST(ConcatCols, Shapes) {
  Tape t;
  const NodeRef a = t.constant(Matrix::Ones(4, 3));
  EXPECT_EQ(concat_cols(a, t.constant(Matrix::Zero(4, 2))).cols(), 5);
  EXPECT_EQ(concat_cols(a, t.constant(Matrix::Zero(4, 0))).value(), a.value());
  EXPECT_THROW(concat_cols(a, t.constant(Matrix::Zero(3, 2))), DimensionError);
}

TEST(ConcatCols, GradientRoutesByBlock) {
  Tape t;
  const NodeRef a = t.parameter(Matrix::Ones(2, 3));
  const NodeRef b = t.parameter(Matrix::Ones(2, 2));
  Matrix upstream(2, 5);
  upstream << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  t.backward(sum(hadamard(concat_cols(a, b), t.constant(upstream))));
  EXPECT_EQ(t.grad(a), upstream.leftCols(3));
  EXPECT_EQ(t.grad(b), upstream.rightCols(2));
}

TEST(Backward, SumGivesOnes) {
  Tape t;
  const NodeRef w = t.parameter(Matrix::Random(3, 4));
  t.backward(sum(w));
  EXPECT_EQ(t.grad(w), Matrix::Ones(3, 4));
}

TEST(Backward, SumOfSquaresGivesTwiceValue) {
  Tape t;
  const Matrix v = (Matrix(2, 2) << 1, -2, 0.5, 3).finished();
  const NodeRef w = t.parameter(v);
  t.backward(sum(hadamard(w, w)));
  EXPECT_EQ(t.grad(w), 2.0 * v);
}

TEST(Backward, NonScalarLossIsRejected) {
  Tape t;
  const NodeRef w = t.parameter(Matrix::Ones(2, 2));
  EXPECT_THROW(t.backward(w), ContractViolation);
}

TEST(Backward, SharedNodeSumsPathGradients) {
  std::mt19937_64 rng(11);
  const Matrix x0 = random_matrix(3, 3, rng);
  const Matrix m1 = random_matrix(3, 3, rng);
  const Matrix m2 = random_matrix(3, 3, rng);

  auto path = [&](Tape& t, const NodeRef& x, const Matrix& m) { return sum(elu(matmul(x, t.constant(m)))); };

  Tape both;
  const NodeRef x = both.parameter(x0);
  both.backward(add(path(both, x, m1), path(both, x, m2)));

  Tape first;
  const NodeRef x1 = first.parameter(x0);
  first.backward(path(first, x1, m1));
  Tape second;
  const NodeRef x2 = second.parameter(x0);
  second.backward(path(second, x2, m2));

  EXPECT_TRUE(both.grad(x).isApprox(first.grad(x1) + second.grad(x2), 1e-14));
}

TEST(Backward, RepeatedBackwardResetsGradients) {
  Tape t;
  const NodeRef w = t.parameter(Matrix::Ones(2, 2));
  const NodeRef loss = sum(w);
  t.backward(loss);
  t.backward(loss);
  EXPECT_EQ(t.grad(w), Matrix::Ones(2, 2));
}

TEST(Tape, RefsFromAnotherTapeAreRejected) {
  Tape a;
  Tape b;
  EXPECT_THROW(add(a.constant(Matrix::Ones(1, 1)), b.constant(Matrix::Ones(1, 1))), ContractViolation);
}

TEST(Log2, NonPositiveInputIsRejected) {
  Tape t;
  EXPECT_THROW(log2(t.scalar_constant(0.0)), ContractViolation);
}

TEST(Determinism, IdenticalInputsGiveBitIdenticalOutputs) {
  auto run = [] {
    std::mt19937_64 rng(99);
    Tape t;
    const NodeRef a = t.parameter(random_matrix(5, 4, rng));
    const NodeRef b = t.parameter(random_matrix(4, 6, rng));
    const NodeRef y = row_softmax(leaky_relu(matmul(a, b), 0.2));
    t.backward(sum(hadamard(y, y)));
    return std::pair{y.value(), t.grad(a)};
  };
  const auto [y1, g1] = run();
  const auto [y2, g2] = run();
  EXPECT_EQ(y1, y2);
  EXPECT_EQ(g1, g2);
}

TEST(FaultInjection, CorruptedRuleIsDetected) {
  std::mt19937_64 rng(3);
  const Matrix a = random_matrix(3, 4, rng);
  const Matrix b = random_matrix(4, 2, rng);
  Tape t;
  t.corrupt_rule(OpKind::kMatMul);
  const NodeRef ra = t.parameter(a);
  t.backward(sum(matmul(ra, t.constant(b))));
  Matrix x = a;
  const Matrix numeric = central_difference(x, [&] { return (x * b).sum(); }, 1e-5);
  EXPECT_FALSE(compare_gradients<double>(t.grad(ra), numeric, 1e-4, 1e-8).passed);
}

}  // namespace
