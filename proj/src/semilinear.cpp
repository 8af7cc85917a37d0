#include "mltr/semilinear.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace mltr {

Vec semilinear_lumped_mass(int n) {
    if (n < 1) throw std::invalid_argument("semilinear: need at least 1 cell");
    const int N = n + 1;
    const double h2 = 1.0 / ((double)n * n);
    Vec m = Vec::Zero(N * N);
    // Each cell splits along its SW-NE diagonal into two triangles; every
    // triangle puts area/3 = h^2/6 on each of its three vertices. Per cell
    // that is two shares for the SW and NE corners, one for SE and NW.
    for (int cy = 0; cy < n; ++cy) {
        for (int cx = 0; cx < n; ++cx) {
            m[cy * N + cx] += 2.0 * h2 / 6.0;            // SW
            m[cy * N + cx + 1] += h2 / 6.0;              // SE
            m[(cy + 1) * N + cx + 1] += 2.0 * h2 / 6.0;  // NE
            m[(cy + 1) * N + cx] += h2 / 6.0;            // NW
        }
    }
    return m;
}

Vec semilinear_target(const SemilinearParams& p) {
    const int N = p.n + 1;
    Vec w = Vec::Constant(N * N, -1.0);
    if (p.target_noise > 0.0) {
        std::mt19937_64 rng(p.seed);
        std::normal_distribution<double> nd(0.0, p.target_noise);
        for (int iy = 1; iy < p.n; ++iy)
            for (int ix = 1; ix < p.n; ++ix) w[iy * N + ix] += nd(rng);
    }
    return w;
}

SemilinearLevel::SemilinearLevel(int n, const SemilinearParams& p, Vec target)
    : n_(n),
      h_(1.0 / n),
      alpha_(p.alpha),
      tol_(p.newton_tol > 0 ? p.newton_tol : 1e-13 * n),
      maxit_(p.newton_maxit) {
    if (n_ < 4) throw std::invalid_argument("semilinear: need at least 4 cells per side");
    const int N = n_ + 1;
    if (target.size() != N * N) throw std::invalid_argument("semilinear: target has wrong size");

    const int ni = n_ - 1;  // interior nodes per side
    const Vec mass_full = semilinear_lumped_mass(n_);
    mass_int_.resize(ni * ni);
    target_int_.resize(ni * ni);
    for (int iy = 1; iy < n_; ++iy) {
        for (int ix = 1; ix < n_; ++ix) {
            const int k = (iy - 1) * ni + (ix - 1);
            mass_int_[k] = mass_full[iy * N + ix];
            target_int_[k] = target[iy * N + ix];
        }
    }
    boundary_track_ = 0.0;
    for (int iy = 0; iy <= n_; ++iy)
        for (int ix = 0; ix <= n_; ++ix)
            if (ix == 0 || ix == n_ || iy == 0 || iy == n_) {
                const double e = 0.0 - target[iy * N + ix];
                boundary_track_ += 0.5 * mass_full[iy * N + ix] * e * e;
            }

    // P1 stiffness on the criss-cross mesh is the plain 5-point stencil
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * ni * ni);
    auto idx = [ni](int ix, int iy) { return (iy - 1) * ni + (ix - 1); };
    for (int iy = 1; iy < n_; ++iy) {
        for (int ix = 1; ix < n_; ++ix) {
            const int k = idx(ix, iy);
            trip.emplace_back(k, k, 4.0);
            if (ix > 1) trip.emplace_back(k, idx(ix - 1, iy), -1.0);
            if (ix < n_ - 1) trip.emplace_back(k, idx(ix + 1, iy), -1.0);
            if (iy > 1) trip.emplace_back(k, idx(ix, iy - 1), -1.0);
            if (iy < n_ - 1) trip.emplace_back(k, idx(ix, iy + 1), -1.0);
        }
    }
    stiff_.resize(ni * ni, ni * ni);
    stiff_.setFromTriplets(trip.begin(), trip.end());
    stiff_.makeCompressed();
    solver_.analyzePattern(stiff_);
}

Vec SemilinearLevel::control_load(const Vec& z) const {
    const int ni = n_ - 1;
    const double h2 = h_ * h_;
    Vec b = Vec::Zero(ni * ni);
    auto add = [&](int ix, int iy, double v) {
        if (ix >= 1 && ix <= ni && iy >= 1 && iy <= ni) b[(iy - 1) * ni + (ix - 1)] += v;
    };
    for (int cy = 0; cy < n_; ++cy) {
        for (int cx = 0; cx < n_; ++cx) {
            const double zc = z[cy * n_ + cx];
            add(cx, cy, zc * h2 / 3.0);          // SW
            add(cx + 1, cy, zc * h2 / 6.0);      // SE
            add(cx + 1, cy + 1, zc * h2 / 3.0);  // NE
            add(cx, cy + 1, zc * h2 / 6.0);      // NW
        }
    }
    return b;
}

Vec SemilinearLevel::control_load_t(const Vec& lam) const {
    const int ni = n_ - 1;
    const double h2 = h_ * h_;
    Vec out(n_ * n_);
    auto get = [&](int ix, int iy) {
        return (ix >= 1 && ix <= ni && iy >= 1 && iy <= ni) ? lam[(iy - 1) * ni + (ix - 1)] : 0.0;
    };
    for (int cy = 0; cy < n_; ++cy) {
        for (int cx = 0; cx < n_; ++cx) {
            out[cy * n_ + cx] = h2 / 3.0 * (get(cx, cy) + get(cx + 1, cy + 1)) +
                                h2 / 6.0 * (get(cx + 1, cy) + get(cx, cy + 1));
        }
    }
    return out;
}

Vec SemilinearLevel::residual(const Vec& u, const Vec& bz) const {
    Vec r = stiff_ * u - bz;
    r.array() += mass_int_.array() * u.array().cube();
    return r;
}

void SemilinearLevel::factorize_at(const Vec& u) const {
    Eigen::SparseMatrix<double> A = stiff_;
    const int m = (int)u.size();
    for (int j = 0; j < m; ++j) A.coeffRef(j, j) += 3.0 * mass_int_[j] * u[j] * u[j];
    solver_.factorize(A);
    if (solver_.info() != Eigen::Success)
        throw std::runtime_error("semilinear: state Jacobian factorization failed");
}

void SemilinearLevel::ensure_state(const Vec& z) const {
    if (z.size() != n_ * n_) throw std::invalid_argument("semilinear: control has wrong size");
    if (cache_.valid && cache_.z.size() == z.size() && (cache_.z.array() == z.array()).all())
        return;

    const Vec bz = control_load(z);
    const int ni2 = (n_ - 1) * (n_ - 1);

    Vec u = cache_.valid ? cache_.u : Vec(Vec::Zero(ni2));
    bool done = false;
    for (int attempt = 0; attempt < 2 && !done; ++attempt) {
        if (attempt == 1) u = Vec::Zero(ni2);
        Vec r = residual(u, bz);
        double rn = r.norm();
        for (int it = 0; it < maxit_ && rn > tol_; ++it) {
            factorize_at(u);
            const Vec du = solver_.solve(r);
            double s = 1.0;
            bool ok = false;
            for (int half = 0; half <= 30; ++half) {
                const Vec u_try = u - s * du;
                Vec r_try = residual(u_try, bz);
                const double rn_try = r_try.norm();
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
    if (!done) throw std::runtime_error("semilinear: state solve did not converge");

    cache_.z = z;
    cache_.u = std::move(u);
    factorize_at(cache_.u);  // adjoint solves reuse this factorization
    cache_.valid = true;
}

const Vec& SemilinearLevel::state(const Vec& z) const {
    ensure_state(z);
    return cache_.u;
}

double SemilinearLevel::state_residual_norm(const Vec& z) const {
    ensure_state(z);
    return residual(cache_.u, control_load(z)).norm();
}

double SemilinearLevel::objective(const Vec& z) const {
    ensure_state(z);
    const Vec e = cache_.u - target_int_;
    const double track = 0.5 * (mass_int_.array() * e.array().square()).sum();
    return track + boundary_track_ + 0.5 * alpha_ * h_ * h_ * z.squaredNorm();
}

Vec SemilinearLevel::gradient(const Vec& z) const {
    ensure_state(z);
    const Vec me = mass_int_.array() * (cache_.u - target_int_).array();
    const Vec lam = solver_.solve(me);  // Jacobian is symmetric
    return control_load_t(lam) + alpha_ * h_ * h_ * z;
}

Vec SemilinearLevel::gn_hessvec(const Vec& z, const Vec& v) const {
    ensure_state(z);
    if (v.size() != n_ * n_) throw std::invalid_argument("semilinear: direction has wrong size");
    const Vec w = solver_.solve(control_load(v));
    const Vec mw = mass_int_.array() * w.array();
    const Vec q = solver_.solve(mw);
    return control_load_t(q) + alpha_ * h_ * h_ * v;
}

ProblemBuild build_semilinear(const SemilinearParams& p, int levels) {
    if (levels < 1) throw std::invalid_argument("build_semilinear: levels must be >= 1");
    if (p.n % (1 << (levels - 1)) != 0)
        throw std::invalid_argument("build_semilinear: n not divisible by 2^(levels-1)");
    if ((p.n >> (levels - 1)) < 4)
        throw std::invalid_argument("build_semilinear: coarsest level below 4 cells per side");

    const Vec target_fine = semilinear_target(p);

    ProblemBuild pb;
    pb.name = "semilinear";
    pb.n_fine = p.n * p.n;
    pb.x0 = Vec::Zero(p.n * p.n);
    pb.stack.levels.resize(levels);

    for (int depth = 0; depth < levels; ++depth) {
        const int i = levels - 1 - depth;  // stack index, coarsest first
        const int n_d = p.n >> depth;
        const int Nd = n_d + 1;
        Vec target_d(Nd * Nd);
        for (int iy = 0; iy <= n_d; ++iy)
            for (int ix = 0; ix <= n_d; ++ix)
                target_d[iy * Nd + ix] = target_fine[(iy << depth) * (p.n + 1) + (ix << depth)];
        auto disc = std::make_shared<SemilinearLevel>(n_d, p, std::move(target_d));
        // level variable w maps to the physical control scale * w; each 2x2
        // averaging contributes a factor 1/2
        const double scale = std::pow(0.5, depth);

        Level& lvl = pb.stack.levels[i];
        lvl.counters = std::make_shared<EvalCounters>();
        lvl.smooth.n = n_d * n_d;
        lvl.smooth.counters = lvl.counters;
        lvl.smooth.value_fn = [disc, scale](const Vec& w) { return disc->objective(scale * w); };
        lvl.smooth.grad_fn = [disc, scale](const Vec& w) {
            return Vec(scale * disc->gradient(scale * w));
        };
        lvl.smooth.hessvec_fn = [disc, scale](const Vec& w, const Vec& v) {
            return Vec(scale * scale * disc->gn_hessvec(scale * w, v));
        };
        const double h2 = 1.0 / ((double)p.n * p.n);
        lvl.phi = (i == levels - 1)
                      ? ProxFunction::l1box(p.beta * h2, p.n * p.n, p.zlo, p.zhi)
                      : ProxFunction::zero();
        if (i > 0) lvl.R = build_tensor_2d(n_d, 2);
    }
    return pb;
}

}  // namespace mltr
