#pragma once

#include "mltr/problems.hpp"

namespace mltr {

// Convex toy problem: 0.5 x^T (I + c*Lap) x - b^T x + beta ||x||_1 with a
// 1D Laplacian coupling and a seeded right-hand side. Coarse levels are
// Galerkin pullbacks through pairwise-averaging transfers, which for a
// quadratic is exact.
struct QuadL1Problem {
    int n = 64;  // even, and divisible by 2^(levels-1)
    double beta = 0.1;
    double coupling = 0.25;
    unsigned seed = 1;
};

SmoothObjective quadl1_objective(const QuadL1Problem& p);

ProblemBuild build_quadl1(const QuadL1Problem& p, int levels);

}  // namespace mltr
