#pragma once

#include "mltr/prox.hpp"
#include "mltr/types.hpp"

#include <optional>

namespace mltr {

struct SPGParams {
    int maxit = 100;
    double tau_abs = 1e-10;   // absolute stationarity tolerance
    double tau_rel = 1e-2;    // relative to the entry stationarity
    double t_min = 1e-12;
    double t_max = 1e12;
    double t_init = 1.0;
    double t0 = 1.0;          // step used in the stationarity measure

    void validate() const;
};

struct SPGResult {
    Vec x;
    double pred = 0.0;        // model decrease q(x0) - q(x*), phi included
    double h_final = 0.0;
    int iters = 0;
    double max_curv_ratio = 0.0;  // max |<Bs,s>| / <s,s> seen
    enum class Stop { Stationary, MaxIter, Boundary, NoStep, ZeroGradient } stop =
        Stop::Stationary;
};

// Spectral proximal gradient descent on the frozen quadratic model
//   q(x) = <g, x - x0> + 0.5 <B(x - x0), x - x0> + phi(x)
// inside the ball ||x - x0|| <= delta. Each pass takes a prox step at the
// current spectral length, line-searches it with the exact quadratic
// minimizer, and updates the running model gradient d = g + B(x - x0).
// h0, when given, is the already-computed stationarity at x0.
SPGResult spg_solve(const Vec& g, const std::function<Vec(const Vec&)>& B,
                    const ProxFunction& phi, const Vec& x0, double delta, const SPGParams& p,
                    std::optional<double> h0 = std::nullopt);

// Minimizer over [0, alpha_max] of q(alpha) = 0.5 alpha^2 kappa + alpha (phi_diff + d_dot_s).
double cauchy_alpha(double kappa, double d_dot_s, double phi_diff, double alpha_max);

// Positive root of ||(x - x0) + alpha s|| = delta.
double boundary_alpha(const Vec& x, const Vec& s, const Vec& x0, double delta);

}  // namespace mltr
