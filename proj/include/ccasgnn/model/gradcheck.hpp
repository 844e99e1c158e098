#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccasgnn/data/cascade.hpp"
#include "ccasgnn/model/ccasgnn.hpp"
#include "ccasgnn/numcore/tape.hpp"

namespace ccasgnn::model {

struct GradcheckOptions {
  double step = 1e-5;
  double rel_tol = 1e-4;
  /// Entries with both |analytic| and |numeric| below this are compared
  /// absolutely against it.
  double abs_floor = 1e-8;
  /// Fault injection: corrupt the backward rule of one op kind.
  std::optional<numcore::OpKind> corrupt;
};

struct GradcheckGroup {
  std::string name;
  double worst_relative = 0.0;
  double worst_absolute = 0.0;
  bool passed = true;
};

struct GradcheckReport {
  std::vector<GradcheckGroup> groups;
  bool passed = true;
  double worst_relative = 0.0;
  double seconds = 0.0;
  std::vector<std::string> failures() const;
};

/// Random 6-node tree-shaped cascade with Gaussian features.
data::CascadeGraph gradcheck_cascade(int feature_dim, std::uint64_t seed, int nodes = 6);

/// Compares tape gradients of both training objectives (weighted head loss
/// and fusion loss) against central differences, one group per parameter.
GradcheckReport gradcheck(const data::CascadeGraph& cascade, const ModelParams& params,
                          const ModelConfig& config, const GradcheckOptions& options = {});

}  // namespace ccasgnn::model
