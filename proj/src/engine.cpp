#include "mltr/engine.hpp"

#include <cmath>
#include <sstream>

namespace mltr {

void TRParams::validate() const {
    if (!(delta0 > 0)) throw std::invalid_argument("TRParams: delta0 must be positive");
    if (!(0 < eta1 && eta1 < eta2 && eta2 < 1))
        throw std::invalid_argument("TRParams: need 0 < eta1 < eta2 < 1");
    if (!(0 < gamma1 && gamma1 <= gamma2 && gamma2 < 1 && 1 <= gamma3))
        throw std::invalid_argument("TRParams: need 0 < gamma1 <= gamma2 < 1 <= gamma3");
    if (!(kappa_stop > 0 && kappa_stop < 1))
        throw std::invalid_argument("TRParams: kappa_stop must lie in (0,1)");
    if (!(eps_model > 0 && eps_model < 1) || !(eps_delta > 0 && eps_delta < 1) ||
        !(eps_h > 0 && eps_h < 1))
        throw std::invalid_argument("TRParams: tolerances must lie in (0,1)");
    if (max_iter <= 0 || max_coarse_iter <= 0)
        throw std::invalid_argument("TRParams: iteration budgets must be positive");
    if (!(t0 > 0)) throw std::invalid_argument("TRParams: t0 must be positive");
    spg.validate();
}

void LevelStack::validate() const {
    if (levels.empty()) throw std::invalid_argument("LevelStack: no levels");
    for (size_t i = 0; i < levels.size(); ++i) {
        const Level& L = levels[i];
        if (L.smooth.n <= 0) throw std::invalid_argument("LevelStack: level without dimension");
        if (i == 0) {
            if (L.R) throw std::invalid_argument("LevelStack: coarsest level has a restriction");
        } else {
            if (!L.R) throw std::invalid_argument("LevelStack: missing restriction");
            if (L.R->n_fine != L.smooth.n || L.R->n_coarse != levels[i - 1].smooth.n)
                throw std::invalid_argument("LevelStack: restriction dimensions do not match");
            if (levels[i - 1].smooth.n > L.smooth.n)
                throw std::invalid_argument("LevelStack: coarse level larger than fine");
        }
    }
}

bool model_choice(double h_coarse0, double h_fine, const TRParams& p, int level) {
    if (level <= 0) return false;
    return h_coarse0 >= p.kappa_stop * h_fine && h_coarse0 >= p.eps_model;
}

AcceptDecision accept_and_update(double ared, double pred, double delta, const TRParams& p) {
    if (!(pred > 0)) throw EngineError("accept_and_update: nonpositive predicted reduction");
    AcceptDecision d;
    d.rho = ared / pred;  // -inf when the trial point left dom phi
    if (d.rho >= p.eta2) {
        d.cls = StepClass::VerySuccessful;
        d.delta_plus = p.gamma3 * delta;
    } else if (d.rho >= p.eta1) {
        d.cls = StepClass::Successful;
        d.delta_plus = delta;
    } else {
        d.cls = StepClass::Unsuccessful;
        d.delta_plus = p.gamma2 * delta;
    }
    d.accepted = d.rho >= p.eta1;
    return d;
}

namespace {

struct Ctx {
    const LevelStack& stack;
    const TRParams& prm;
    std::vector<TraceRow> trace;
    std::vector<double> kappaH;  // per level, running estimate >= 1
};

struct SeqOut {
    Vec x;
    double F_entry = 0.0;
    double F_final = 0.0;
    double h_final = 0.0;
    bool converged = false;
};

// kappa_fcd = 0.5 min{1, t_min kappa_stop^2, kappa_stop^4 / (kappaH - 1)}.
double fcd_bound(double h, double delta, double kappaH, const TRParams& p) {
    const double ks = p.kappa_stop;
    double kfcd = std::min(1.0, p.spg.t_min * ks * ks);
    if (kappaH > 1.0 + 1e-12) kfcd = std::min(kfcd, ks * ks * ks * ks / (kappaH - 1.0));
    kfcd *= 0.5;
    const double normB = kappaH - 1.0;
    return kfcd * h * std::min(h / (1.0 + normB), delta);
}

// One minimization sequence at level i: the trust-region loop of the
// recursive scheme. L is the (already corrected) smooth model of the
// level, phi its nonsmooth term, delta_parent the radius inherited from
// the level above (infinite at the top).
SeqOut run_sequence(Ctx& c, int i, const SmoothObjective& L, const ProxFunction& phi,
                    const Vec& x0, double delta_parent) {
    const bool top = (i == c.stack.top());
    const Level& lvl = c.stack.levels[i];
    const TRParams& prm = c.prm;

    const double delta_s = lvl.delta_s > 0 ? lvl.delta_s : prm.delta0;
    double delta = std::min(delta_s, delta_parent);

    Vec x = x0;
    double phix = phi.value(x);
    if (std::isinf(phix)) throw std::invalid_argument("solve: initial point outside dom phi");
    double fx = L.value(x);
    Vec g = L.gradient(x);
    double h = stationarity_h(g, x, phi, prm.t0);

    SeqOut out;
    out.F_entry = fx + phix;

    // Coarse sequences keep the curvature operator frozen at their entry
    // point; the top level refreshes it at every iterate.
    const Vec anchor0 = x0;
    auto frozenB = [&L, anchor0](const Vec& v) { return L.hessvec(anchor0, v); };

    const int budget = top ? prm.max_iter : prm.max_coarse_iter;
    const double eps_h = top ? prm.eps_h : lvl.eps_h;
    int k = 0;
    while (true) {
        if (h <= eps_h) {
            out.converged = true;
            break;
        }
        if (k >= budget) break;

        // Step 1: model choice, re-evaluated every iteration.
        bool recursive = false;
        Vec xc0, gc;
        ProxFunction phic;
        double hc0 = 0.0;
        if (i > 0) {
            const TransferOp& R = *lvl.R;
            xc0 = R.restrict(x);
            phic = pulled_back(phi, x, R, c.stack.levels[i - 1].counters);
            gc = R.restrict(g);
            hc0 = stationarity_h(gc, xc0, phic, prm.t0);
            recursive = model_choice(hc0, h, prm, i);
        }

        Vec xtrial;
        double pred;
        ModelKind kind;
        if (recursive) {
            const TransferOp& R = *lvl.R;
            SmoothObjective Lc = build_coarse_model(g, R, c.stack.levels[i - 1].smooth, xc0);
            SeqOut child = run_sequence(c, i - 1, Lc, phic, xc0, delta);
            pred = child.F_entry - child.F_final;
            xtrial = phi.snap_feasible(x + R.prolong(child.x - xc0));
            kind = ModelKind::Recursive;
        } else {
            SPGResult sr;
            if (top) {
                const Vec xa = x;
                auto B = [&L, xa](const Vec& v) { return L.hessvec(xa, v); };
                sr = spg_solve(g, B, phi, x, delta, prm.spg, h);
            } else {
                sr = spg_solve(g, frozenB, phi, x, delta, prm.spg, h);
            }
            c.kappaH[i] = std::max(c.kappaH[i], 1.0 + sr.max_curv_ratio);
            xtrial = phi.snap_feasible(sr.x);
            pred = sr.pred;
            kind = ModelKind::Taylor;
        }

        const double bound = fcd_bound(h, delta, c.kappaH[i], prm);
        if (!(pred > 0) || pred < bound - 1e-10 * std::max(1.0, bound)) {
            std::ostringstream os;
            os << "fraction-of-Cauchy-decrease violated: level " << i << " k " << k
               << " kind " << (kind == ModelKind::Recursive ? "recursive" : "taylor")
               << " pred " << pred << " bound " << bound << " h " << h << " delta " << delta;
            throw EngineError(os.str());
        }

        // Steps 4-6: ratio test, acceptance, radius update.
        const double phitrial = phi.value(xtrial);
        double ared;
        double ftrial = 0.0;
        if (std::isinf(phitrial)) {
            ared = -kInf;  // left the domain: reject
        } else {
            ftrial = L.value(xtrial);
            ared = (fx + phix) - (ftrial + phitrial);
        }
        const AcceptDecision dec = accept_and_update(ared, pred, delta, prm);

        const double h_pre = h;
        if (dec.accepted) {
            x = xtrial;
            fx = ftrial;
            phix = phitrial;
            g = L.gradient(x);
            h = stationarity_h(g, x, phi, prm.t0);
        }
        c.trace.push_back({i, k, h_pre, delta, dec.rho, kind, dec.cls, fx + phix});
        ++k;

        if (!top && (x - x0).norm() > (1.0 - prm.eps_delta) * delta_parent) break;

        delta = dec.delta_plus;
        if (!top) delta = std::min(delta, delta_parent - (x - x0).norm());
    }

    out.x = x;
    out.F_final = fx + phix;
    out.h_final = h;
    return out;
}

}  // namespace

SolveResult solve_multilevel(const LevelStack& stack, const Vec& x0, const TRParams& p) {
    p.validate();
    stack.validate();
    const int r = stack.top();
    if (x0.size() != stack.levels[r].smooth.n)
        throw std::invalid_argument("solve_multilevel: x0 has the wrong dimension");

    Ctx c{stack, p, {}, std::vector<double>(stack.levels.size(), 1.0)};

    SmoothObjective f = stack.levels[r].smooth;
    f.counters = stack.levels[r].counters;
    ProxFunction phi = stack.levels[r].phi;
    phi.counters = stack.levels[r].counters;

    SeqOut top = run_sequence(c, r, f, phi, x0, kInf);

    SolveResult res;
    res.x = top.x;
    res.status = top.converged ? SolveStatus::Converged : SolveStatus::Budget;
    res.F = top.F_final;
    res.trace = std::move(c.trace);
    res.kappa_h = std::move(c.kappaH);
    for (const TraceRow& row : res.trace)
        if (row.level == r) res.top_iterations++;
    for (const Level& lvl : stack.levels)
        if (lvl.counters) res.totals += *lvl.counters;
    res.h = top.h_final;
    return res;
}

SolveResult solve_single_level(const SmoothObjective& f, const ProxFunction& phi, const Vec& x0,
                               const TRParams& p) {
    LevelStack stack;
    Level lvl;
    lvl.smooth = f;
    lvl.phi = phi;
    lvl.counters = f.counters ? f.counters : std::make_shared<EvalCounters>();
    lvl.eps_h = p.eps_h;
    stack.levels.push_back(std::move(lvl));
    return solve_multilevel(stack, x0, p);
}

}  // namespace mltr
