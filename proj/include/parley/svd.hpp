#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace parley {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct TruncatedSvd {
    Eigen::MatrixXd U;   // n x k
    Eigen::VectorXd S;   // k
    Eigen::MatrixXd V;   // m x k
};

// Rank-k truncated SVD. Small problems go through a dense decomposition
// (exact); larger ones through a seeded randomized range finder with power
// iterations, accurate far beyond what an NMF initialization needs.
TruncatedSvd truncated_svd(const SparseRowMatrix& X, int k);

}  // namespace parley
