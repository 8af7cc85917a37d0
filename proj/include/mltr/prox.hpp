#pragma once

#include "mltr/transfer.hpp"
#include "mltr/types.hpp"

#include <limits>
#include <memory>

namespace mltr {

// Convex nonsmooth term phi. Supported kinds are coordinate-separable
// (Zero, L1, Box, L1+Box) plus the pulled-back term used on coarse
// levels: phi(u) = root(anchor + M^T (u - base)) for a block-averaging
// map M, which is block-separable and therefore still has an exact prox.
//
// value() may return +inf for points outside a box; the trust-region
// loop uses that to reject steps that leave the domain. Box membership
// is tested with a few-ulp relative slack so that points that are
// feasible in exact arithmetic but were assembled through rounded
// lifts are not spuriously rejected.
class ProxFunction {
  public:
    enum class Kind { Zero, L1, Box, L1Box, PulledBack };

    Kind kind = Kind::Zero;
    double beta = 0.0;
    Vec lo, hi;  // Box / L1Box only

    // PulledBack only
    std::shared_ptr<const ProxFunction> root;  // separable parent in the finest anchor space
    TransferOp map;                            // root space -> this space
    Vec anchor;                                // anchor point, root space
    Vec base;                                  // reference point in this space, = R*anchor_local

    std::shared_ptr<EvalCounters> counters;

    static ProxFunction zero();
    static ProxFunction l1(double beta);
    static ProxFunction box(Vec lo, Vec hi);
    static ProxFunction box(int n, double lo, double hi);
    static ProxFunction l1box(double beta, Vec lo, Vec hi);
    static ProxFunction l1box(double beta, int n, double lo, double hi);

    bool separable() const { return kind != Kind::PulledBack; }

    // phi(x); +inf outside the domain. Ticks the phi counter.
    double value(const Vec& x) const;

    // argmin_p phi(p) + (1/2t)||p - y||^2, exact. Ticks the prox counter.
    Vec prox(double t, const Vec& y) const;

    // Clamp coordinates that exceed a box bound by only a few ulps back
    // onto the bound. Identity for kinds without a box. Keeps iterates
    // assembled from rounded sums exactly feasible.
    Vec snap_feasible(Vec x) const;

    double value_raw(const Vec& x) const;    // no counter tick
    Vec prox_raw(double t, const Vec& y) const;
};

// The coarse nonsmooth term for a recursion entered at fine point c:
// u -> parent(c + R^T (u - R c)). When parent is itself pulled back the
// maps are composed so the result always references a separable root.
ProxFunction pulled_back(const ProxFunction& parent, const Vec& c, const TransferOp& R,
                         std::shared_ptr<EvalCounters> counters = nullptr);

// Restriction of the fine prox step around anchor c evaluated at the
// coarse point y: R * prox(parent, t, c + R^T (y - R c)). For y = R x
// with c = x this reproduces R * prox(parent, t, x) exactly.
Vec prox_pullback(const ProxFunction& parent, const Vec& c, const TransferOp& R, double t,
                  const Vec& y);

// (1/t0) || x - prox(phi, t0, x - t0 grad) ||. Zero iff x is first-order
// stationary for the composite model with gradient grad.
double stationarity_h(const Vec& grad, const Vec& x, const ProxFunction& phi, double t0);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace mltr
