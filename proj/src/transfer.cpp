#include "mltr/transfer.hpp"

#include <cmath>
#include <set>

namespace mltr {

Vec TransferOp::restrict(const Vec& x) const {
    if (x.size() != n_fine) throw std::invalid_argument("restrict: dimension mismatch");
    Vec y(n_coarse);
    for (int j = 0; j < n_coarse; ++j) {
        double s = 0.0;
        for (int p : blocks[j]) s += x[p];
        y[j] = weights[j] * s;
    }
    return y;
}

Vec TransferOp::prolong(const Vec& y) const {
    if (y.size() != n_coarse) throw std::invalid_argument("prolong: dimension mismatch");
    Vec x = Vec::Zero(n_fine);
    for (int j = 0; j < n_coarse; ++j) {
        const double wy = weights[j] * y[j];
        for (int p : blocks[j]) x[p] = wy;
    }
    return x;
}

bool TransferOp::uniform() const {
    if (blocks.empty()) return true;
    const size_t m = blocks[0].size();
    for (const auto& b : blocks)
        if (b.size() != m) return false;
    return true;
}

Eigen::MatrixXd TransferOp::dense() const {
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n_coarse, n_fine);
    for (int j = 0; j < n_coarse; ++j)
        for (int p : blocks[j]) R(j, p) = weights[j];
    return R;
}

void TransferOp::validate() const {
    if ((int)blocks.size() != n_coarse || (int)weights.size() != n_coarse)
        throw std::logic_error("TransferOp: block metadata size mismatch");
    std::set<int> seen;
    for (int j = 0; j < n_coarse; ++j) {
        const auto& b = blocks[j];
        if (b.empty()) throw std::logic_error("TransferOp: empty block");
        for (int p : b) {
            if (p < 0 || p >= n_fine) throw std::logic_error("TransferOp: index out of range");
            if (!seen.insert(p).second) throw std::logic_error("TransferOp: overlapping blocks");
        }
        const double w = 1.0 / std::sqrt((double)b.size());
        if (std::abs(weights[j] - w) > 1e-15)
            throw std::logic_error("TransferOp: weight is not 1/sqrt(block size)");
    }
}

TransferOp build_avg_1d(int n_fine) {
    if (n_fine <= 0 || n_fine % 2 != 0)
        throw std::invalid_argument("build_avg_1d: n_fine must be even and positive");
    TransferOp R;
    R.n_fine = n_fine;
    R.n_coarse = n_fine / 2;
    R.kind = TransferOp::Kind::Avg1D;
    R.blocks.resize(R.n_coarse);
    R.weights.assign(R.n_coarse, 1.0 / std::sqrt(2.0));
    for (int j = 0; j < R.n_coarse; ++j) R.blocks[j] = {2 * j, 2 * j + 1};
    return R;
}

TransferOp build_tensor_2d(int n_fine_1d, int m) {
    if (n_fine_1d <= 0 || m <= 0 || n_fine_1d % m != 0)
        throw std::invalid_argument("build_tensor_2d: m must divide n_fine_1d");
    const int nc = n_fine_1d / m;
    TransferOp R;
    R.n_fine = n_fine_1d * n_fine_1d;
    R.n_coarse = nc * nc;
    R.kind = TransferOp::Kind::Tensor2D;
    R.blocks.resize(R.n_coarse);
    R.weights.assign(R.n_coarse, 1.0 / (double)m);
    for (int jy = 0; jy < nc; ++jy)
        for (int jx = 0; jx < nc; ++jx) {
            auto& b = R.blocks[jy * nc + jx];
            b.reserve(m * m);
            for (int dy = 0; dy < m; ++dy)
                for (int dx = 0; dx < m; ++dx)
                    b.push_back((jy * m + dy) * n_fine_1d + (jx * m + dx));
        }
    return R;
}

TransferOp build_generic(int n_fine, std::vector<std::vector<int>> blocks) {
    TransferOp R;
    R.n_fine = n_fine;
    R.n_coarse = (int)blocks.size();
    R.kind = TransferOp::Kind::Generic;
    R.weights.resize(R.n_coarse);
    for (int j = 0; j < R.n_coarse; ++j)
        R.weights[j] = 1.0 / std::sqrt((double)blocks[j].size());
    R.blocks = std::move(blocks);
    R.validate();
    return R;
}

TransferOp compose(const TransferOp& outer, const TransferOp& inner) {
    if (outer.n_fine != inner.n_coarse)
        throw std::invalid_argument("compose: inner/outer dimension mismatch");
    if (!outer.uniform() || !inner.uniform())
        throw std::invalid_argument("compose: requires uniform block sizes");
    TransferOp R;
    R.n_fine = inner.n_fine;
    R.n_coarse = outer.n_coarse;
    R.kind = TransferOp::Kind::Generic;
    R.blocks.resize(R.n_coarse);
    R.weights.resize(R.n_coarse);
    for (int j = 0; j < R.n_coarse; ++j) {
        auto& b = R.blocks[j];
        for (int p : outer.blocks[j])
            for (int q : inner.blocks[p]) b.push_back(q);
        R.weights[j] = 1.0 / std::sqrt((double)b.size());
    }
    R.validate();
    return R;
}

}  // namespace mltr
