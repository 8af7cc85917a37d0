#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mltr/transfer.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace mltr;

TEST_CASE("pairwise averaging basics") {
    TransferOp R = build_avg_1d(4);
    CHECK(R.n_coarse == 2);

    Vec ones = Vec::Ones(4);
    Vec y = R.restrict(ones);
    CHECK(y[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    Vec ab(2);
    ab << 3.0, -1.5;
    TransferOp R2 = build_avg_1d(2);
    Vec yab = R2.restrict(ab);
    REQUIRE(yab.size() == 1);
    CHECK(yab[0] == doctest::Approx((3.0 - 1.5) / std::sqrt(2.0)).epsilon(1e-15));

    Vec yc(2);
    yc << std::sqrt(2.0), 0.0;
    Vec up = R.prolong(yc);
    CHECK(up[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(up[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(up[2] == 0.0);
    CHECK(up[3] == 0.0);
}

TEST_CASE("odd sizes are rejected") {
    CHECK_THROWS(build_avg_1d(5));
    CHECK_THROWS(build_avg_1d(0));
    CHECK_THROWS(build_tensor_2d(6, 4));
}

static double max_abs_dev_from_identity(const TransferOp& R) {
    // matrix-free R R^T by sweeping coarse unit vectors
    double worst = 0.0;
    for (int j = 0; j < R.n_coarse; ++j) {
        Vec e = Vec::Zero(R.n_coarse);
        e[j] = 1.0;
        Vec col = R.restrict(R.prolong(e));
        for (int i = 0; i < R.n_coarse; ++i) {
            const double want = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(col[i] - want));
        }
    }
    return worst;
}

TEST_CASE("row orthonormality") {
    CHECK(max_abs_dev_from_identity(build_avg_1d(4)) <= 1e-12);
    CHECK(max_abs_dev_from_identity(build_avg_1d(64)) <= 1e-12);
    CHECK(max_abs_dev_from_identity(build_tensor_2d(8, 2)) <= 1e-12);
    CHECK(max_abs_dev_from_identity(build_tensor_2d(9, 3)) <= 1e-12);
}

TEST_CASE("tensor product blocks") {
    TransferOp R = build_tensor_2d(2, 2);
    Vec ones = Vec::Ones(4);
    Vec y = R.restrict(ones);
    REQUIRE(y.size() == 1);
    CHECK(y[0] == doctest::Approx(2.0).epsilon(1e-15));

    // a field constant per 2x2 block restricts to m*v per coarse dof
    TransferOp R4 = build_tensor_2d(4, 2);
    Vec x(16);
    double vals[4] = {0.5, -1.0, 2.0, 3.0};
    for (int jy = 0; jy < 4; ++jy)
        for (int jx = 0; jx < 4; ++jx) x[jy * 4 + jx] = vals[(jy / 2) * 2 + (jx / 2)];
    Vec yc = R4.restrict(x);
    Eigen::MatrixXd D = R4.dense();
    Vec yd = D * x;
    for (int j = 0; j < 4; ++j) {
        CHECK(yc[j] == doctest::Approx(2.0 * vals[j]).epsilon(1e-14));
        CHECK(yc[j] == doctest::Approx(yd[j]).epsilon(1e-14));
    }
}

TEST_CASE("matrix-free application matches dense") {
    std::mt19937_64 rng(77);
    for (const TransferOp& R : {build_avg_1d(12), build_tensor_2d(6, 2), build_tensor_2d(9, 3)}) {
        Eigen::MatrixXd D = R.dense();
        for (int t = 0; t < 5; ++t) {
            Vec x = oracle::random_vec(R.n_fine, rng);
            Vec y = oracle::random_vec(R.n_coarse, rng);
            CHECK((R.restrict(x) - D * x).lpNorm<Eigen::Infinity>() <= 1e-13);
            CHECK((R.prolong(y) - D.transpose() * y).lpNorm<Eigen::Infinity>() <= 1e-13);
        }
    }
}

TEST_CASE("prolongation preserves norms and round-trips") {
    std::mt19937_64 rng(5);
    TransferOp R = build_avg_1d(32);
    for (int t = 0; t < 10; ++t) {
        Vec s = oracle::random_vec(R.n_coarse, rng);
        CHECK(std::abs(R.prolong(s).norm() - s.norm()) <= 1e-12 * (1.0 + s.norm()));
        CHECK((R.restrict(R.prolong(s)) - s).lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + s.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("block disjointness") {
    for (const TransferOp& R : {build_avg_1d(16), build_tensor_2d(8, 2)}) {
        CHECK_NOTHROW(R.validate());
        std::vector<int> owner(R.n_fine, -1);
        for (int j = 0; j < R.n_coarse; ++j)
            for (int p : R.blocks[j]) {
                CHECK(owner[p] == -1);
                owner[p] = j;
            }
    }
}

TEST_CASE("composition equals the dense product") {
    std::mt19937_64 rng(9);
    TransferOp inner = build_avg_1d(16);
    TransferOp outer = build_avg_1d(8);
    TransferOp T = compose(outer, inner);
    CHECK(T.n_fine == 16);
    CHECK(T.n_coarse == 4);
    Eigen::MatrixXd D = outer.dense() * inner.dense();
    for (int t = 0; t < 5; ++t) {
        Vec x = oracle::random_vec(16, rng);
        CHECK((T.restrict(x) - D * x).lpNorm<Eigen::Infinity>() <= 1e-13);
    }
    CHECK(max_abs_dev_from_identity(T) <= 1e-12);

    TransferOp T2 = compose(build_tensor_2d(4, 2), build_tensor_2d(8, 2));
    Eigen::MatrixXd D2 = build_tensor_2d(4, 2).dense() * build_tensor_2d(8, 2).dense();
    Vec x2 = oracle::random_vec(64, rng);
    CHECK((T2.restrict(x2) - D2 * x2).lpNorm<Eigen::Infinity>() <= 1e-13);
}
