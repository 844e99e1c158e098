#include "ccasgnn/numcore/tape.hpp"

#include <array>
#include <utility>

namespace ccasgnn::numcore {
namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 18> kOpNames{{
    {OpKind::kLeaf, "leaf"},
    {OpKind::kMatMul, "matmul"},
    {OpKind::kAdd, "add"},
    {OpKind::kSub, "sub"},
    {OpKind::kHadamard, "hadamard"},
    {OpKind::kScale, "scale"},
    {OpKind::kRelu, "relu"},
    {OpKind::kLeakyRelu, "leaky_relu"},
    {OpKind::kElu, "elu"},
    {OpKind::kRowSoftmax, "row_softmax"},
    {OpKind::kConcatCols, "concat_cols"},
    {OpKind::kSliceRows, "slice_rows"},
    {OpKind::kMeanRows, "mean_rows"},
    {OpKind::kSum, "sum"},
    {OpKind::kLog2, "log2"},
    {OpKind::kTranspose, "transpose"},
    {OpKind::kAddRowBroadcast, "add_row_broadcast"},
    {OpKind::kOuterAdd, "outer_add"},
}};

}  // namespace

std::string_view op_name(OpKind op) {
  for (const auto& [kind, name] : kOpNames) {
    if (kind == op) return name;
  }
  return "unknown";
}

std::optional<OpKind> op_from_name(std::string_view name) {
  for (const auto& [kind, n] : kOpNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

}  // namespace ccasgnn::numcore
