#pragma once

#include "mltr/problems.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <memory>

namespace mltr {

// Distributed control of a semilinear elliptic equation on the unit square:
//   -Delta u + u^3 = z,  u = 0 on the boundary,
// P1 finite elements on a uniform criss-cross (SW-NE) triangulation with a
// lumped mass matrix, piecewise-constant control per cell. The objective
// tracks a constant target w = -1 (optionally perturbed by Gaussian noise)
// with an L2 control penalty; the nonsmooth term combines a cell-measure
// L1 weight with box bounds on the control.
struct SemilinearParams {
    int n = 64;            // cells per side on the finest level
    double alpha = 1e-4;   // L2 control weight
    double beta = 0.05;    // L1 weight (per unit area)
    double zlo = -25.0;    // control bounds
    double zhi = 25.0;
    double target_noise = 0.0;  // std dev of nodewise target perturbation
    unsigned seed = 0;

    // state solver; tol 0 picks 1e-13 * n
    double newton_tol = 0.0;
    int newton_maxit = 30;
};

// Lumped P1 mass over the full (n+1)^2 node grid, row-major iy*(n+1)+ix.
// Entries are (adjacent triangle area)/3; they sum to the domain area.
Vec semilinear_lumped_mass(int n);

// Tracking target at all nodes. Interior nodes are -1 plus optional noise,
// boundary nodes are exactly -1.
Vec semilinear_target(const SemilinearParams& p);

// One discretization level: state solve, tracking objective, adjoint
// gradient and Gauss-Newton curvature in the physical control variable.
// Controls live on the n^2 cells (row-major cy*n+cx), states on the
// (n-1)^2 interior nodes.
class SemilinearLevel {
  public:
    SemilinearLevel(int n, const SemilinearParams& p, Vec target);

    int n() const { return n_; }
    double h() const { return h_; }

    // interior state for the physical control z (n^2 cells)
    const Vec& state(const Vec& z) const;
    double state_residual_norm(const Vec& z) const;

    double objective(const Vec& z) const;
    Vec gradient(const Vec& z) const;
    Vec gn_hessvec(const Vec& z, const Vec& v) const;

  private:
    struct Cache {
        Vec z;
        Vec u;  // interior nodes
        bool valid = false;
    };

    Vec residual(const Vec& u, const Vec& bz) const;
    Vec control_load(const Vec& z) const;        // B z on the interior nodes
    Vec control_load_t(const Vec& lam) const;    // B^T lam on the cells
    void factorize_at(const Vec& u) const;       // K + 3 diag(m u^2)
    void ensure_state(const Vec& z) const;

    int n_;
    double h_, alpha_;
    double tol_;
    int maxit_;
    Vec target_int_;   // target at the interior nodes
    Vec mass_int_;     // lumped mass at the interior nodes
    double boundary_track_;  // tracking contribution of the fixed boundary
    Eigen::SparseMatrix<double> stiff_;
    mutable Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
    mutable Cache cache_;
};

ProblemBuild build_semilinear(const SemilinearParams& p, int levels);

}  // namespace mltr
