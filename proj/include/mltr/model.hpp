#pragma once

#include "mltr/prox.hpp"
#include "mltr/transfer.hpp"
#include "mltr/types.hpp"

namespace mltr {

// Quadratic-plus-phi model around an anchor: g and the curvature closure
// B are frozen; f0 is the smooth value at the anchor.
struct TaylorModel {
    Vec x;      // anchor
    Vec g;      // smooth model gradient at the anchor
    std::function<Vec(const Vec&)> B;  // v -> B v
    double f0 = 0.0;
};

// m(x) - m(x+s) = -<g,s> - 0.5 <Bs,s> + phi(x) - phi(x+s).
// Returns -inf when x+s leaves dom phi.
double taylor_decrease(const TaylorModel& model, const ProxFunction& phi, const Vec& s);

// Gradient-corrected coarse smooth model
//   y -> f_coarse(y) + <v, y - x_coarse0>,  v = R*fine_grad - grad f_coarse(x_coarse0),
// so that its gradient at the entry point x_coarse0 equals R*fine_grad.
// Shares f_coarse's counters; the correction itself costs nothing extra.
SmoothObjective build_coarse_model(const Vec& fine_grad, const TransferOp& R,
                                   const SmoothObjective& f_coarse, const Vec& x_coarse0);

// Central-difference curvature closure built from a raw (uncounted)
// gradient; step sqrt(eps)*(1+||x||)/||v||.
std::function<Vec(const Vec&, const Vec&)> fd_hessvec(std::function<Vec(const Vec&)> grad_raw);

// Gauss-Newton curvature J^T J v + alpha_reg v from the two Jacobian
// actions of a least-squares residual.
std::function<Vec(const Vec&)> gauss_newton_hessvec(std::function<Vec(const Vec&)> J_apply,
                                                    std::function<Vec(const Vec&)> Jt_apply,
                                                    double alpha_reg);

// Max relative mismatch between the analytic directional derivative and
// a central difference of value() over ndir seeded random directions.
// step_scale widens the difference step; use ~10 when value() carries an
// inner iterative solve whose noise floor sits well above machine epsilon.
double gradient_check(const SmoothObjective& f, const Vec& x, int ndir, unsigned seed,
                      double step_scale = 1.0);

}  // namespace mltr
