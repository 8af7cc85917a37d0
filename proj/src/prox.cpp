#include "mltr/prox.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mltr {

namespace {

// Relative slack for box membership; covers rounding from lifted sums.
inline double box_slack(double bound) {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(bound));
}

inline double soft(double y, double th) {
    if (y > th) return y - th;
    if (y < -th) return y + th;
    return 0.0;
}

// Exact minimizer over w of
//   beta * sum_p |c_p + a (w - z)|  +  (1/2t) (w - y)^2.
// The kinks are at w = z - c_p / a; between kinks the derivative is
// beta*a*(2i - m) + (w - y)/t with i kinks passed, increasing in w, so
// scan intervals left to right for the stationary point.
double block_l1_min(const std::vector<double>& kinks, double beta, double a, double t, double y,
                    double z, std::size_t m) {
    (void)z;
    for (std::size_t i = 0; i <= m; ++i) {
        const double lo_i = (i == 0) ? -kInf : kinks[i - 1];
        const double hi_i = (i == m) ? kInf : kinks[i];
        const double cand = y - t * beta * a * (2.0 * (double)i - (double)m);
        if (cand < lo_i) return lo_i;
        if (cand <= hi_i) return cand;
    }
    return kinks.back();  // unreachable for finite inputs
}

}  // namespace

ProxFunction ProxFunction::zero() {
    ProxFunction p;
    p.kind = Kind::Zero;
    return p;
}

ProxFunction ProxFunction::l1(double beta) {
    if (beta < 0) throw std::invalid_argument("l1: beta must be >= 0");
    ProxFunction p;
    p.kind = Kind::L1;
    p.beta = beta;
    return p;
}

ProxFunction ProxFunction::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size() || (lo.array() > hi.array()).any())
        throw std::invalid_argument("box: need lo <= hi componentwise");
    ProxFunction p;
    p.kind = Kind::Box;
    p.lo = std::move(lo);
    p.hi = std::move(hi);
    return p;
}

ProxFunction ProxFunction::box(int n, double lo, double hi) {
    return box(Vec::Constant(n, lo), Vec::Constant(n, hi));
}

ProxFunction ProxFunction::l1box(double beta, Vec lo, Vec hi) {
    ProxFunction p = box(std::move(lo), std::move(hi));
    if (beta < 0) throw std::invalid_argument("l1box: beta must be >= 0");
    p.kind = Kind::L1Box;
    p.beta = beta;
    return p;
}

ProxFunction ProxFunction::l1box(double beta, int n, double lo, double hi) {
    return l1box(beta, Vec::Constant(n, lo), Vec::Constant(n, hi));
}

double ProxFunction::value_raw(const Vec& x) const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::L1:
            return beta * x.lpNorm<1>();
        case Kind::Box:
        case Kind::L1Box: {
            if (x.size() != lo.size()) throw std::invalid_argument("phi: dimension mismatch");
            for (Eigen::Index j = 0; j < x.size(); ++j)
                if (x[j] < lo[j] - box_slack(lo[j]) || x[j] > hi[j] + box_slack(hi[j]))
                    return kInf;
            return kind == Kind::L1Box ? beta * x.lpNorm<1>() : 0.0;
        }
        case Kind::PulledBack: {
            if (x.size() != base.size()) throw std::invalid_argument("phi: dimension mismatch");
            Vec lift = anchor + map.prolong(x - base);
            return root->value_raw(lift);
        }
    }
    return 0.0;
}

Vec ProxFunction::prox_raw(double t, const Vec& y) const {
    if (!(t > 0)) throw std::invalid_argument("prox: t must be positive");
    switch (kind) {
        case Kind::Zero:
            return y;
        case Kind::L1: {
            Vec p(y.size());
            const double th = t * beta;
            for (Eigen::Index j = 0; j < y.size(); ++j) p[j] = soft(y[j], th);
            return p;
        }
        case Kind::Box: {
            if (y.size() != lo.size()) throw std::invalid_argument("prox: dimension mismatch");
            return y.cwiseMax(lo).cwiseMin(hi);
        }
        case Kind::L1Box: {
            if (y.size() != lo.size()) throw std::invalid_argument("prox: dimension mismatch");
            Vec p(y.size());
            const double th = t * beta;
            for (Eigen::Index j = 0; j < y.size(); ++j)
                p[j] = std::min(hi[j], std::max(lo[j], soft(y[j], th)));
            return p;
        }
        case Kind::PulledBack: {
            if (y.size() != base.size()) throw std::invalid_argument("prox: dimension mismatch");
            // Exact blockwise solve: within coarse coordinate j the lifted
            // point varies only along the block of map, so the objective is
            // a strictly convex piecewise quadratic in the scalar w.
            Vec p(y.size());
            std::vector<double> kinks;
            for (int j = 0; j < map.n_coarse; ++j) {
                const double a = map.weights[j];
                const double z = base[j];
                const auto& blk = map.blocks[j];
                const std::size_t m = blk.size();
                double w;
                switch (root->kind) {
                    case Kind::Zero:
                        w = y[j];
                        break;
                    case Kind::L1: {
                        kinks.clear();
                        for (int q : blk) kinks.push_back(z - anchor[q] / a);
                        std::sort(kinks.begin(), kinks.end());
                        w = block_l1_min(kinks, root->beta, a, t, y[j], z, m);
                        break;
                    }
                    case Kind::Box:
                    case Kind::L1Box: {
                        // Feasible window for w: every lifted coordinate must
                        // stay inside [lo,hi].
                        double wlo = -kInf, whi = kInf;
                        for (int q : blk) {
                            wlo = std::max(wlo, z + (root->lo[q] - anchor[q]) / a);
                            whi = std::min(whi, z + (root->hi[q] - anchor[q]) / a);
                        }
                        if (wlo > whi)
                            throw std::runtime_error("prox: pulled-back domain is empty (infeasible anchor)");
                        if (root->kind == Kind::Box) {
                            w = std::min(whi, std::max(wlo, y[j]));
                        } else {
                            kinks.clear();
                            for (int q : blk) kinks.push_back(z - anchor[q] / a);
                            std::sort(kinks.begin(), kinks.end());
                            w = block_l1_min(kinks, root->beta, a, t, y[j], z, m);
                            w = std::min(whi, std::max(wlo, w));
                        }
                        break;
                    }
                    default:
                        throw std::logic_error("prox: nested pulled-back root");
                }
                p[j] = w;
            }
            return p;
        }
    }
    return y;
}

double ProxFunction::value(const Vec& x) const {
    if (counters) counters->phi++;
    return value_raw(x);
}

Vec ProxFunction::prox(double t, const Vec& y) const {
    if (counters) counters->prox++;
    return prox_raw(t, y);
}

Vec ProxFunction::snap_feasible(Vec x) const {
    if (kind != Kind::Box && kind != Kind::L1Box) return x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x[j] > hi[j] && x[j] <= hi[j] + box_slack(hi[j])) x[j] = hi[j];
        if (x[j] < lo[j] && x[j] >= lo[j] - box_slack(lo[j])) x[j] = lo[j];
    }
    return x;
}

ProxFunction pulled_back(const ProxFunction& parent, const Vec& c, const TransferOp& R,
                         std::shared_ptr<EvalCounters> counters) {
    ProxFunction p;
    p.kind = ProxFunction::Kind::PulledBack;
    p.counters = std::move(counters);
    p.base = R.restrict(c);
    if (parent.separable()) {
        p.root = std::make_shared<ProxFunction>(parent);
        p.map = R;
        p.anchor = c;
    } else {
        // parent(u) = root(a + T^T (u - T a)); pulling back again through R
        // at anchor c gives root((a + T^T(c - Ta)) + (R T)^T (u - R c)).
        p.root = parent.root;
        p.map = compose(R, parent.map);
        p.anchor = parent.anchor + parent.map.prolong(c - parent.base);
    }
    return p;
}

Vec prox_pullback(const ProxFunction& parent, const Vec& c, const TransferOp& R, double t,
                  const Vec& y) {
    if (!parent.separable())
        throw std::invalid_argument("prox_pullback: parent must be coordinate-separable");
    Vec lift = c + R.prolong(y - R.restrict(c));
    return R.restrict(parent.prox_raw(t, lift));
}

double stationarity_h(const Vec& grad, const Vec& x, const ProxFunction& phi, double t0) {
    if (!(t0 > 0)) throw std::invalid_argument("stationarity_h: t0 must be positive");
    if (grad.size() != x.size()) throw std::invalid_argument("stationarity_h: dimension mismatch");
    Vec p = phi.prox(t0, x - t0 * grad);
    return (x - p).norm() / t0;
}

}  // namespace mltr
