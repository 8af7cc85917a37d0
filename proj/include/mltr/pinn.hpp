#pragma once

#include "mltr/problems.hpp"

#include <vector>

namespace mltr {

// Physics-informed training of a single-hidden-layer sigmoid network for
// a diffusion equation with a smooth variable coefficient on the unit
// square:
//   -div(kappa grad u) = g,  u = 0 on the boundary.
// The loss is the mean squared strong-form residual on an interior
// collocation grid plus the mean squared network value on the boundary
// points; the nonsmooth term is a plain L1 penalty on all weights.
//
// The forcing g is manufactured so that u(x,y) = x(1-x)y(1-y) *
// (1 + 0.25 sin(2 pi x) sin(2 pi y) + 0.1 x y) solves the equation.
//
// Parameters are packed as [wx_0, wy_0, ..., wx_{m-1}, wy_{m-1},
// b_0..b_{m-1}, c_0..c_{m-1}] for m hidden units with N = sum_k c_k
// sigma(wx_k x + wy_k y + b_k), plus one trailing output bias when
// enabled. Coarse levels are Galerkin pullbacks through pairwise
// averaging of this flat vector.
struct PinnParams {
    int width = 60;
    int grid = 32;          // collocation grid points per side, boundary included
    double beta = 1e-4;     // L1 weight
    unsigned seed = 0;      // init: all parameters U(-0.5, 0.5)
    bool output_bias = false;
};

// diffusion coefficient and its partials
double pinn_kappa(double x, double y);
double pinn_kappa_x(double x, double y);
double pinn_kappa_y(double x, double y);

// manufactured solution and the forcing it induces
double pinn_exact(double x, double y);
double pinn_forcing(double x, double y);

class PinnProblem {
  public:
    explicit PinnProblem(const PinnParams& p);

    int n() const { return n_; }
    Vec initial_theta() const;

    double value(const Vec& theta) const;
    Vec gradient(const Vec& theta) const;
    Vec hessvec(const Vec& theta, const Vec& v) const;  // exact Hessian product

    double network(const Vec& theta, double x, double y) const;
    double residual_at(const Vec& theta, double x, double y) const;

  private:
    struct Point {
        double x, y;
        double kap, kx, ky, g;  // coefficient data; used on interior points
        bool interior;
    };

    static Point make_point(double x, double y);
    template <class S>
    S residual_core(const std::vector<S>& th, const Point& pt) const;
    template <class S>
    S network_core(const std::vector<S>& th, double x, double y) const;
    template <class S>
    std::vector<S> grad_impl(const std::vector<S>& th) const;

    PinnParams prm_;
    int n_;
    double w_int_, w_bd_;  // 1/#interior, 1/#boundary
    std::vector<Point> pts_;
};

ProblemBuild build_pinn(const PinnParams& p, int levels);

}  // namespace mltr
