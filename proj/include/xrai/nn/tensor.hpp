#pragma once

#include <Eigen/Dense>

namespace xrai::nn {

// Row-major so that one sample per row maps onto contiguous memory.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

}  // namespace xrai::nn
