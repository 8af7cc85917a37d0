#include "mltr/model.hpp"

#include <cmath>
#include <random>

namespace mltr {

double taylor_decrease(const TaylorModel& model, const ProxFunction& phi, const Vec& s) {
    const double phix = phi.value(model.x);
    const double phis = phi.value(model.x + s);
    if (std::isinf(phis)) return -kInf;
    const Vec Bs = model.B(s);
    return -model.g.dot(s) - 0.5 * Bs.dot(s) + phix - phis;
}

SmoothObjective build_coarse_model(const Vec& fine_grad, const TransferOp& R,
                                   const SmoothObjective& f_coarse, const Vec& x_coarse0) {
    if (fine_grad.size() != R.n_fine || x_coarse0.size() != R.n_coarse ||
        f_coarse.n != R.n_coarse)
        throw std::invalid_argument("build_coarse_model: dimension mismatch");

    const Vec v = R.restrict(fine_grad) - f_coarse.gradient(x_coarse0);
    const Vec x0 = x_coarse0;

    SmoothObjective m;
    m.n = f_coarse.n;
    m.counters = f_coarse.counters;
    auto base_val = f_coarse.value_fn;
    auto base_grad = f_coarse.grad_fn;
    m.value_fn = [base_val, v, x0](const Vec& y) { return base_val(y) + v.dot(y - x0); };
    m.grad_fn = [base_grad, v](const Vec& y) { return Vec(base_grad(y) + v); };
    m.hessvec_fn = f_coarse.hessvec_fn;
    return m;
}

std::function<Vec(const Vec&, const Vec&)> fd_hessvec(std::function<Vec(const Vec&)> grad_raw) {
    return [grad_raw](const Vec& x, const Vec& v) -> Vec {
        const double nv = v.norm();
        if (nv == 0.0) return Vec::Zero(x.size());
        const double d =
            std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + x.norm()) / nv;
        Vec gp = grad_raw(x + d * v);
        Vec gm = grad_raw(x - d * v);
        Vec out = (gp - gm) / (2.0 * d);
        if (!out.allFinite()) throw std::runtime_error("fd_hessvec: non-finite gradient");
        return out;
    };
}

std::function<Vec(const Vec&)> gauss_newton_hessvec(std::function<Vec(const Vec&)> J_apply,
                                                    std::function<Vec(const Vec&)> Jt_apply,
                                                    double alpha_reg) {
    return [J_apply, Jt_apply, alpha_reg](const Vec& v) -> Vec {
        return Jt_apply(J_apply(v)) + alpha_reg * v;
    };
}

double gradient_check(const SmoothObjective& f, const Vec& x, int ndir, unsigned seed,
                      double step_scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const double d =
        step_scale * std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + x.norm());
    const Vec g = f.grad_fn(x);
    double worst = 0.0;
    for (int t = 0; t < ndir; ++t) {
        Vec u(x.size());
        for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = nd(rng);
        u /= u.norm();
        const double fd = (f.value_fn(x + d * u) - f.value_fn(x - d * u)) / (2.0 * d);
        const double an = g.dot(u);
        const double rel = std::abs(fd - an) / std::max(1e-12, std::abs(an));
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace mltr
