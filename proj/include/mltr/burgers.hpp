#pragma once

#include "mltr/problems.hpp"

#include <memory>

namespace mltr {

// Distributed control of a steady viscous Burgers equation on (0,1):
//   -nu u'' + u u' = z + g,  u(0) = 0, u(1) = -1,
// P1 finite elements for the state, piecewise-constant control per cell.
// The objective tracks a target u_d(x) = -x^2 plus synthetic noise, with
// an L2 control penalty; the nonsmooth term is a cell-measure-weighted
// L1 norm handled by the solver's prox machinery.
//
// The manufactured source g(x) = 2(nu + x^3) makes u = -x^2 the exact
// solution of the clean z = 0 problem.
struct BurgersParams {
    int n = 2048;          // cells on the finest level
    double nu = 0.08;
    double alpha = 1e-4;   // L2 control weight
    double beta = 1e-2;    // L1 weight (per unit length)
    unsigned seed = 0;

    // target noise: piecewise-constant steps, smooth bumps, salt-and-pepper
    int step_pieces_min = 3;
    int step_pieces_max = 6;
    double step_amp = 0.05;
    int bump_count = 3;
    double bump_width_min = 0.05;
    double bump_width_max = 0.15;
    double bump_amp = 0.05;
    double salt_prob = 0.005;
    double salt_amp = 0.2;

    // state solver; tol 0 picks 1e-13 * sqrt(n)
    double newton_tol = 0.0;
    int newton_maxit = 50;
};

double burgers_source(double x, double nu);

// Noisy tracking target at the n+1 nodes of an n-cell grid. Boundary
// nodes carry the exact values 0 and -1.
Vec burgers_target(const BurgersParams& p);

// One discretization level: state solve, tracking objective, adjoint
// gradient and Gauss-Newton curvature in the physical control variable.
class BurgersLevel {
  public:
    BurgersLevel(int n, const BurgersParams& p, Vec target);

    int n() const { return n_; }
    double h() const { return h_; }

    // state at the n+1 nodes for the physical control z (n cells)
    const Vec& state(const Vec& z) const;
    double state_residual_norm(const Vec& z) const;

    double objective(const Vec& z) const;
    Vec gradient(const Vec& z) const;
    Vec gn_hessvec(const Vec& z, const Vec& v) const;

  private:
    struct Tridiag {
        Vec lower, diag, upper;  // interior Jacobian bands
    };
    struct Cache {
        Vec z;
        Vec u;        // all nodes
        Tridiag jac;  // at u
        bool valid = false;
    };

    Vec residual(const Vec& u, const Vec& bvec) const;
    Tridiag jacobian(const Vec& u) const;
    Vec rhs_vector(const Vec& z) const;
    void ensure_state(const Vec& z) const;

    int n_;
    double h_, nu_, alpha_;
    double tol_;
    int maxit_;
    Vec target_;
    Vec gload_;  // source load per interior node
    mutable Cache cache_;
};

ProblemBuild build_burgers(const BurgersParams& p, int levels);

}  // namespace mltr
