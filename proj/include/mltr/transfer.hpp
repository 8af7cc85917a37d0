#pragma once

#include "mltr/types.hpp"

#include <Eigen/Dense>
#include <vector>

namespace mltr {

// Row-orthonormal block-averaging restriction. Each coarse index owns a
// disjoint set of fine indices, all sharing the weight 1/sqrt(m) where m
// is the block size, so R*R^T = I and the prolongation R^T preserves
// Euclidean norms. Stored matrix-free as block index lists.
class TransferOp {
  public:
    enum class Kind { Avg1D, Tensor2D, Generic };

    int n_fine = 0;
    int n_coarse = 0;
    Kind kind = Kind::Generic;
    std::vector<std::vector<int>> blocks;  // blocks[j] = fine indices of coarse dof j
    std::vector<double> weights;           // weights[j] = 1/sqrt(blocks[j].size())

    Vec restrict(const Vec& x) const;   // R x
    Vec prolong(const Vec& y) const;    // R^T y

    // True when every block has the same size (and hence weight). The
    // composed transfers used for deeper hierarchies require this.
    bool uniform() const;

    // Dense representation, for small-size test oracles.
    Eigen::MatrixXd dense() const;

    void validate() const;  // disjointness, weights, dimensions
};

// Pairwise averaging, entries 1/sqrt(2) on (2j, 2j+1). n_fine must be even.
TransferOp build_avg_1d(int n_fine);

// Kronecker product of two 1D m-block averagings on an n x n grid stored
// row-major (index = iy*n + ix). Each coarse dof owns an m x m block with
// weight 1/m. m must divide n_fine_1d.
TransferOp build_tensor_2d(int n_fine_1d, int m);

// Generic operator from explicit blocks; weights are set to 1/sqrt(m).
TransferOp build_generic(int n_fine, std::vector<std::vector<int>> blocks);

// The product outer*inner as a single block-averaging operator, where
// inner: n_fine -> n_mid and outer: n_mid -> n_coarse. Requires uniform
// weights on both factors so the product is again block-averaging.
TransferOp compose(const TransferOp& outer, const TransferOp& inner);

}  // namespace mltr
