#include "mltr/quadl1.hpp"

#include <random>

namespace mltr {

namespace {

Vec apply_q(double coupling, const Vec& x) {
    const Eigen::Index n = x.size();
    Vec y(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double lap = 2.0 * x[j];
        if (j > 0) lap -= x[j - 1];
        if (j + 1 < n) lap -= x[j + 1];
        y[j] = x[j] + coupling * lap;
    }
    return y;
}

Vec seeded_rhs(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec b(n);
    for (int j = 0; j < n; ++j) b[j] = nd(rng);
    return b;
}

}  // namespace

SmoothObjective quadl1_objective(const QuadL1Problem& p) {
    const double c = p.coupling;
    const Vec b = seeded_rhs(p.n, p.seed);
    SmoothObjective f;
    f.n = p.n;
    f.value_fn = [c, b](const Vec& x) { return 0.5 * x.dot(apply_q(c, x)) - b.dot(x); };
    f.grad_fn = [c, b](const Vec& x) { return Vec(apply_q(c, x) - b); };
    f.hessvec_fn = [c](const Vec&, const Vec& v) { return apply_q(c, v); };
    return f;
}

ProblemBuild build_quadl1(const QuadL1Problem& p, int levels) {
    if (levels < 1) throw std::invalid_argument("build_quadl1: levels must be >= 1");
    if (p.n % (1 << (levels - 1)) != 0)
        throw std::invalid_argument("build_quadl1: n not divisible by 2^(levels-1)");

    ProblemBuild pb;
    pb.name = "quadl1";
    pb.n_fine = p.n;
    pb.x0 = Vec::Zero(p.n);

    const SmoothObjective fine = quadl1_objective(p);

    pb.stack.levels.resize(levels);
    for (int ell = 0; ell < levels; ++ell) {
        // ell counts down from the finest (stored last)
        const int i = levels - 1 - ell;
        Level& lvl = pb.stack.levels[i];
        const int n_i = p.n >> ell;
        lvl.counters = std::make_shared<EvalCounters>();
        if (i == levels - 1) {
            lvl.smooth = fine;
            lvl.phi = ProxFunction::l1(p.beta);
        } else {
            // Galerkin pullback through the composed transfer T: fine -> i.
            TransferOp T = build_avg_1d(p.n);
            for (int d = 1; d <= ell - 1; ++d) T = compose(build_avg_1d(p.n >> d), T);
            auto vf = fine.value_fn;
            auto gf = fine.grad_fn;
            auto hf = fine.hessvec_fn;
            lvl.smooth.n = n_i;
            lvl.smooth.value_fn = [vf, T](const Vec& w) { return vf(T.prolong(w)); };
            lvl.smooth.grad_fn = [gf, T](const Vec& w) { return T.restrict(gf(T.prolong(w))); };
            lvl.smooth.hessvec_fn = [hf, T](const Vec& w, const Vec& v) {
                return T.restrict(hf(T.prolong(w), T.prolong(v)));
            };
            lvl.phi = ProxFunction::zero();  // unused below the top
        }
        lvl.smooth.counters = lvl.counters;
        if (i > 0) pb.stack.levels[i].R = build_avg_1d(n_i);
    }
    return pb;
}

}  // namespace mltr
