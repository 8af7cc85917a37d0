#include "mltr/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mltr {

namespace {

// Thomas algorithm; lower[0] and upper[m-1] are ignored.
Vec solve_tridiag(const Vec& lower, const Vec& diag, const Vec& upper, Vec rhs) {
    const Eigen::Index m = diag.size();
    Vec c(m);
    c[0] = upper[0] / diag[0];
    rhs[0] /= diag[0];
    for (Eigen::Index j = 1; j < m; ++j) {
        const double denom = diag[j] - lower[j] * c[j - 1];
        if (denom == 0.0) throw std::runtime_error("burgers: singular state Jacobian");
        c[j] = upper[j] / denom;
        rhs[j] = (rhs[j] - lower[j] * rhs[j - 1]) / denom;
    }
    for (Eigen::Index j = m - 2; j >= 0; --j) rhs[j] -= c[j] * rhs[j + 1];
    return rhs;
}

Vec solve_tridiag_t(const Vec& lower, const Vec& diag, const Vec& upper, const Vec& rhs) {
    const Eigen::Index m = diag.size();
    Vec lowT(m), upT(m);
    lowT[0] = 0.0;
    for (Eigen::Index j = 1; j < m; ++j) lowT[j] = upper[j - 1];
    for (Eigen::Index j = 0; j + 1 < m; ++j) upT[j] = lower[j + 1];
    upT[m - 1] = 0.0;
    return solve_tridiag(lowT, diag, upT, rhs);
}

// consistent-mass product (h/6) tridiag(1,4,1) on the interior, with
// homogeneous values beyond the interior range
Vec mass_apply_interior(double h, const Vec& e_int) {
    const Eigen::Index m = e_int.size();
    Vec out(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double s = 4.0 * e_int[j];
        if (j > 0) s += e_int[j - 1];
        if (j + 1 < m) s += e_int[j + 1];
        out[j] = h / 6.0 * s;
    }
    return out;
}

}  // namespace

double burgers_source(double x, double nu) { return 2.0 * (nu + x * x * x); }

Vec burgers_target(const BurgersParams& p) {
    const int n = p.n;
    Vec ud(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double x = (double)j / n;
        ud[j] = -x * x;
    }

    // Noise on the interior nodes only, one generator, fixed draw order:
    // step field first, then bumps, then per-node salt draws.
    std::mt19937_64 rng(p.seed);
    std::uniform_int_distribution<int> pieces_d(p.step_pieces_min, p.step_pieces_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int pieces = pieces_d(rng);
    std::vector<double> edges(pieces - 1);
    for (double& e : edges) e = unit(rng);
    std::sort(edges.begin(), edges.end());
    std::vector<double> step_val(pieces);
    for (double& v : step_val) v = p.step_amp * (2.0 * unit(rng) - 1.0);

    std::vector<double> bump_c(p.bump_count), bump_w(p.bump_count), bump_a(p.bump_count);
    for (int b = 0; b < p.bump_count; ++b) {
        bump_c[b] = unit(rng);
        bump_w[b] = p.bump_width_min + (p.bump_width_max - p.bump_width_min) * unit(rng);
        bump_a[b] = p.bump_amp * (2.0 * unit(rng) - 1.0);
    }

    for (int j = 1; j < n; ++j) {
        const double x = (double)j / n;
        int piece = 0;
        while (piece < pieces - 1 && x >= edges[piece]) ++piece;
        double noise = step_val[piece];
        for (int b = 0; b < p.bump_count; ++b) {
            const double r = (x - bump_c[b]) / bump_w[b];
            noise += bump_a[b] * std::exp(-0.5 * r * r);
        }
        if (unit(rng) < p.salt_prob) noise += (unit(rng) < 0.5 ? -1.0 : 1.0) * p.salt_amp;
        ud[j] += noise;
    }
    return ud;
}

BurgersLevel::BurgersLevel(int n, const BurgersParams& p, Vec target)
    : n_(n),
      h_(1.0 / n),
      nu_(p.nu),
      alpha_(p.alpha),
      tol_(p.newton_tol > 0 ? p.newton_tol : 1e-13 * std::sqrt((double)n)),
      maxit_(p.newton_maxit),
      target_(std::move(target)) {
    if (n_ < 4) throw std::invalid_argument("burgers: need at least 4 cells");
    if (target_.size() != n_ + 1) throw std::invalid_argument("burgers: target has wrong size");

    // P1 load of the manufactured source, 3-point Gauss per element
    static const double gx[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    gload_ = Vec::Zero(n_ - 1);
    for (int e = 0; e < n_; ++e) {  // element [e h, (e+1) h]
        const double xm = (e + 0.5) * h_;
        for (int q = 0; q < 3; ++q) {
            const double x = xm + 0.5 * h_ * gx[q];
            const double w = 0.5 * h_ * gw[q];
            const double g = burgers_source(x, nu_);
            const double tloc = (x - e * h_) / h_;  // rising hat of node e+1
            if (e + 1 <= n_ - 1) gload_[e] += w * g * tloc;        // node e+1, rising
            if (e >= 1) gload_[e - 1] += w * g * (1.0 - tloc);     // node e, falling
        }
    }
}

Vec BurgersLevel::rhs_vector(const Vec& z) const {
    Vec b(n_ - 1);
    for (int j = 1; j < n_; ++j) b[j - 1] = 0.5 * h_ * (z[j - 1] + z[j]) + gload_[j - 1];
    return b;
}

Vec BurgersLevel::residual(const Vec& u, const Vec& bvec) const {
    Vec r(n_ - 1);
    for (int j = 1; j < n_; ++j) {
        const double um = u[j - 1], uc = u[j], up = u[j + 1];
        const double diff = nu_ * (-um + 2.0 * uc - up) / h_;
        const double conv = (uc * up + up * up - um * um - um * uc) / 6.0;
        r[j - 1] = diff + conv - bvec[j - 1];
    }
    return r;
}

BurgersLevel::Tridiag BurgersLevel::jacobian(const Vec& u) const {
    Tridiag J;
    J.lower.resize(n_ - 1);
    J.diag.resize(n_ - 1);
    J.upper.resize(n_ - 1);
    for (int j = 1; j < n_; ++j) {
        const double um = u[j - 1], uc = u[j], up = u[j + 1];
        J.lower[j - 1] = -nu_ / h_ + (-2.0 * um - uc) / 6.0;
        J.diag[j - 1] = 2.0 * nu_ / h_ + (up - um) / 6.0;
        J.upper[j - 1] = -nu_ / h_ + (uc + 2.0 * up) / 6.0;
    }
    return J;
}

void BurgersLevel::ensure_state(const Vec& z) const {
    if (z.size() != n_) throw std::invalid_argument("burgers: control has wrong size");
    if (cache_.valid && cache_.z.size() == z.size() && (cache_.z.array() == z.array()).all())
        return;

    const Vec bvec = rhs_vector(z);
    auto cold_start = [this]() {
        Vec u(n_ + 1);
        for (int j = 0; j <= n_; ++j) u[j] = -(double)j / n_;  // interpolates the BCs
        return u;
    };

    Vec u = cache_.valid ? cache_.u : cold_start();
    bool done = false;
    for (int attempt = 0; attempt < 2 && !done; ++attempt) {
        if (attempt == 1) u = cold_start();
        Vec r = residual(u, bvec);
        double rn = r.norm();
        for (int it = 0; it < maxit_ && rn > tol_; ++it) {
            Tridiag J = jacobian(u);
            Vec du = solve_tridiag(J.lower, J.diag, J.upper, r);
            double s = 1.0;
            Vec u_try;
            double rn_try = 0.0;
            bool ok = false;
            for (int half = 0; half <= 30; ++half) {
                u_try = u;
                u_try.segment(1, n_ - 1) -= s * du;
                Vec r_try = residual(u_try, bvec);
                rn_try = r_try.norm();
                if (rn_try <= (1.0 - 0.5 * s) * rn || rn_try < tol_) {
                    u = u_try;
                    r = std::move(r_try);
                    rn = rn_try;
                    ok = true;
                    break;
                }
                s *= 0.5;
            }
            if (!ok) break;
        }
        done = rn <= std::max(tol_, 1e-10);
    }
    if (!done) throw std::runtime_error("burgers: state solve did not converge");

    cache_.z = z;
    cache_.u = std::move(u);
    cache_.jac = jacobian(cache_.u);
    cache_.valid = true;
}

const Vec& BurgersLevel::state(const Vec& z) const {
    ensure_state(z);
    return cache_.u;
}

double BurgersLevel::state_residual_norm(const Vec& z) const {
    ensure_state(z);
    return residual(cache_.u, rhs_vector(z)).norm();
}

double BurgersLevel::objective(const Vec& z) const {
    ensure_state(z);
    const Vec e = cache_.u - target_;
    // boundary errors vanish by construction, so the interior mass
    // product captures the whole tracking term
    const Vec e_int = e.segment(1, n_ - 1);
    const double track = 0.5 * e_int.dot(mass_apply_interior(h_, e_int));
    return track + 0.5 * alpha_ * h_ * z.squaredNorm();
}

Vec BurgersLevel::gradient(const Vec& z) const {
    ensure_state(z);
    const Vec e_int = (cache_.u - target_).segment(1, n_ - 1);
    const Vec rhs = -mass_apply_interior(h_, e_int);
    const Vec lam = solve_tridiag_t(cache_.jac.lower, cache_.jac.diag, cache_.jac.upper, rhs);
    Vec g(n_);
    for (int c = 0; c < n_; ++c) {
        double s = 0.0;
        if (c >= 1) s += lam[c - 1];      // node c is interior for c in [1, n-1]
        if (c + 1 <= n_ - 1) s += lam[c];
        g[c] = alpha_ * h_ * z[c] - 0.5 * h_ * s;
    }
    return g;
}

Vec BurgersLevel::gn_hessvec(const Vec& z, const Vec& v) const {
    ensure_state(z);
    if (v.size() != n_) throw std::invalid_argument("burgers: direction has wrong size");
    Vec kv(n_ - 1);
    for (int j = 1; j < n_; ++j) kv[j - 1] = 0.5 * h_ * (v[j - 1] + v[j]);
    const Vec w = solve_tridiag(cache_.jac.lower, cache_.jac.diag, cache_.jac.upper, kv);
    const Vec mw = mass_apply_interior(h_, w);
    const Vec q = solve_tridiag_t(cache_.jac.lower, cache_.jac.diag, cache_.jac.upper, mw);
    Vec out(n_);
    for (int c = 0; c < n_; ++c) {
        double s = 0.0;
        if (c >= 1) s += q[c - 1];
        if (c + 1 <= n_ - 1) s += q[c];
        out[c] = 0.5 * h_ * s + alpha_ * h_ * v[c];
    }
    return out;
}

ProblemBuild build_burgers(const BurgersParams& p, int levels) {
    if (levels < 1) throw std::invalid_argument("build_burgers: levels must be >= 1");
    if (p.n % (1 << (levels - 1)) != 0)
        throw std::invalid_argument("build_burgers: n not divisible by 2^(levels-1)");
    if ((p.n >> (levels - 1)) < 4)
        throw std::invalid_argument("build_burgers: coarsest level below 4 cells");

    const Vec ud_fine = burgers_target(p);

    ProblemBuild pb;
    pb.name = "burgers";
    pb.n_fine = p.n;
    pb.x0 = Vec::Zero(p.n);
    pb.stack.levels.resize(levels);

    for (int depth = 0; depth < levels; ++depth) {
        const int i = levels - 1 - depth;  // stack index, coarsest first
        const int n_d = p.n >> depth;
        Vec ud(n_d + 1);
        for (int j = 0; j <= n_d; ++j) ud[j] = ud_fine[j << depth];
        auto disc = std::make_shared<BurgersLevel>(n_d, p, std::move(ud));
        // the level variable w maps to the physical control scale * w; the
        // scale is the accumulated weight of the averaging transfers
        const double scale = std::pow(1.0 / std::sqrt(2.0), depth);

        Level& lvl = pb.stack.levels[i];
        lvl.counters = std::make_shared<EvalCounters>();
        lvl.smooth.n = n_d;
        lvl.smooth.counters = lvl.counters;
        lvl.smooth.value_fn = [disc, scale](const Vec& w) { return disc->objective(scale * w); };
        lvl.smooth.grad_fn = [disc, scale](const Vec& w) {
            return Vec(scale * disc->gradient(scale * w));
        };
        lvl.smooth.hessvec_fn = [disc, scale](const Vec& w, const Vec& v) {
            return Vec(scale * scale * disc->gn_hessvec(scale * w, v));
        };
        lvl.phi = (i == levels - 1) ? ProxFunction::l1(p.beta * (1.0 / p.n))
                                    : ProxFunction::zero();
        if (i > 0) lvl.R = build_avg_1d(n_d);
    }
    return pb;
}

}  // namespace mltr
