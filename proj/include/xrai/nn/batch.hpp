#pragma once

#include "xrai/errors.hpp"
#include "xrai/nn/tensor.hpp"

namespace xrai::nn {

/// Paired inputs/targets, one sample per row.
struct Batch {
  Matrix inputs;
  Matrix targets;

  Eigen::Index size() const { return inputs.rows(); }

  void validate() const {
    if (inputs.rows() < 1) throw DimensionError("batch must contain at least one row");
    if (inputs.rows() != targets.rows()) {
      throw DimensionError("batch inputs and targets have different row counts");
    }
  }
};

}  // namespace xrai::nn
