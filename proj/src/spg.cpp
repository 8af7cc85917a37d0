#include "mltr/spg.hpp"

#include <algorithm>
#include <cmath>

namespace mltr {

void SPGParams::validate() const {
    if (maxit <= 0) throw std::invalid_argument("SPGParams: maxit must be positive");
    if (!(tau_abs > 0) || !(tau_rel > 0)) throw std::invalid_argument("SPGParams: tolerances must be positive");
    if (!(t_min > 0) || !(t_min <= t_max) || !std::isfinite(t_max))
        throw std::invalid_argument("SPGParams: need 0 < t_min <= t_max < inf");
    if (!(t0 > 0)) throw std::invalid_argument("SPGParams: t0 must be positive");
}

double cauchy_alpha(double kappa, double d_dot_s, double phi_diff, double alpha_max) {
    if (kappa <= 0.0) return alpha_max;
    const double a = -(d_dot_s + phi_diff) / kappa;
    return std::max(0.0, std::min(alpha_max, a));
}

double boundary_alpha(const Vec& x, const Vec& s, const Vec& x0, double delta) {
    const Vec u = x - x0;
    const double ss = s.squaredNorm();
    if (ss == 0.0) throw std::invalid_argument("boundary_alpha: s must be nonzero");
    const double us = u.dot(s);
    const double rad = us * us + ss * (delta * delta - u.squaredNorm());
    return std::max(0.0, (-us + std::sqrt(std::max(0.0, rad))) / ss);
}

SPGResult spg_solve(const Vec& g, const std::function<Vec(const Vec&)>& B,
                    const ProxFunction& phi, const Vec& x0, double delta, const SPGParams& p,
                    std::optional<double> h0) {
    p.validate();
    if (!(delta > 0)) throw std::invalid_argument("spg_solve: delta must be positive");

    SPGResult res;
    Vec x = x0;
    Vec d = g;  // running model gradient g + B(x - x0)
    double t = std::clamp(p.t_init, p.t_min, p.t_max);

    const double phi0 = phi.value(x0);
    if (std::isinf(phi0)) throw std::invalid_argument("spg_solve: x0 outside dom phi");
    double phi_cur = phi0;

    double h = h0 ? *h0 : stationarity_h(d, x, phi, p.t0);
    const double htol = std::max(p.tau_abs, p.tau_rel * h);

    res.stop = SPGResult::Stop::MaxIter;
    int l = 0;
    for (; l < p.maxit; ++l) {
        if (h <= htol) {
            res.stop = SPGResult::Stop::Stationary;
            break;
        }
        Vec pr = phi.prox(t, x - t * d);
        Vec s = pr - x;
        const double sn2 = s.squaredNorm();
        if (sn2 == 0.0) {
            res.stop = SPGResult::Stop::NoStep;
            break;
        }
        const double phi_trial = phi.value(pr);

        double amax = 1.0;
        if (std::isfinite(delta) && (pr - x0).norm() > delta) {
            amax = std::min(1.0, boundary_alpha(x, s, x0, delta));
            if (amax <= 0.0) {
                res.stop = SPGResult::Stop::Boundary;
                break;
            }
        }

        const Vec b = B(s);
        const double kappa = b.dot(s);
        res.max_curv_ratio = std::max(res.max_curv_ratio, std::abs(kappa) / sn2);

        const double alpha = cauchy_alpha(kappa, d.dot(s), phi_trial - phi_cur, amax);
        if (alpha <= 0.0) {
            res.stop = SPGResult::Stop::Boundary;
            break;
        }
        if (alpha >= 1.0 - 1e-12) {
            // Take the prox point itself so box-active coordinates stay
            // bitwise on their bounds.
            x = pr;
            phi_cur = phi_trial;
        } else {
            x += alpha * s;
            phi_cur = phi.value(x);
        }
        d += alpha * b;

        double tbar;
        if (kappa <= 0.0) {
            const double dn = d.norm();
            if (dn == 0.0) {
                res.stop = SPGResult::Stop::ZeroGradient;
                break;
            }
            tbar = t / dn;
        } else {
            tbar = sn2 / kappa;
        }
        t = std::clamp(tbar, p.t_min, p.t_max);

        h = stationarity_h(d, x, phi, p.t0);
    }

    res.iters = l;
    res.h_final = h;
    res.x = x;
    // Exact model decrease of the frozen quadratic: with u = x - x0 and
    // d = g + Bu, q(x0) - q(x) = -<g,u> - 0.5<Bu,u> = -0.5<g + d, u>.
    const Vec u = res.x - x0;
    res.pred = -0.5 * (g + d).dot(u) + (phi0 - phi_cur);
    return res;
}

}  // namespace mltr
