#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace degen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Index = Eigen::Index;

}  // namespace degen
