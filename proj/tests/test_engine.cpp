#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mltr/engine.hpp"
#include "mltr/quadl1.hpp"
#include "mltr/spg.hpp"
#include "oracles.hpp"

#include <cmath>
#include <map>

using namespace mltr;

namespace {

SmoothObjective shifted_quadratic(const Vec& a) {
    SmoothObjective f;
    f.n = (int)a.size();
    f.counters = std::make_shared<EvalCounters>();
    f.value_fn = [a](const Vec& x) { return 0.5 * (x - a).squaredNorm(); };
    f.grad_fn = [a](const Vec& x) { return Vec(x - a); };
    f.hessvec_fn = [](const Vec&, const Vec& v) { return v; };
    return f;
}

// Strongly curved objective whose curvature callback returns zero, so the
// local model is linear and the loop has to work through rejections.
SmoothObjective liar_quadratic() {
    SmoothObjective f;
    f.n = 1;
    f.counters = std::make_shared<EvalCounters>();
    f.value_fn = [](const Vec& x) { return 5.0 * x[0] * x[0]; };
    f.grad_fn = [](const Vec& x) { return Vec(10.0 * x); };
    f.hessvec_fn = [](const Vec&, const Vec& v) { return Vec(0.0 * v); };
    return f;
}

// Split the rows of one level into minimization sequences (k resets to 0).
std::vector<std::vector<TraceRow>> sequences_at_level(const std::vector<TraceRow>& trace,
                                                      int level) {
    std::vector<std::vector<TraceRow>> seqs;
    for (const TraceRow& r : trace) {
        if (r.level != level) continue;
        if (r.k == 0) seqs.emplace_back();
        REQUIRE(!seqs.empty());
        seqs.back().push_back(r);
    }
    return seqs;
}

}  // namespace

TEST_CASE("recursion gate") {
    TRParams p;
    CHECK_FALSE(model_choice(10.0, 1.0, p, 0));        // no coarser level
    CHECK(model_choice(0.9, 1.0, p, 1));               // informative coarse model
    CHECK_FALSE(model_choice(0.5, 1.0, p, 1));         // below kappa_stop * h
    CHECK_FALSE(model_choice(0.05, 0.1 / 0.6, p, 1));  // below the absolute floor
}

TEST_CASE("ratio test and radius update") {
    TRParams p;
    AcceptDecision d = accept_and_update(1.0, 1.0, 4.0, p);
    CHECK(d.accepted);
    CHECK(d.cls == StepClass::VerySuccessful);
    CHECK(d.delta_plus == 8.0);

    d = accept_and_update(0.5, 1.0, 4.0, p);
    CHECK(d.accepted);
    CHECK(d.cls == StepClass::Successful);
    CHECK(d.delta_plus == 4.0);

    d = accept_and_update(0.0, 1.0, 4.0, p);
    CHECK_FALSE(d.accepted);
    CHECK(d.cls == StepClass::Unsuccessful);
    CHECK(d.delta_plus == 1.0);

    d = accept_and_update(-kInf, 1.0, 4.0, p);  // trial point left dom phi
    CHECK_FALSE(d.accepted);

    CHECK_THROWS_AS(accept_and_update(1.0, 0.0, 4.0, p), EngineError);
    CHECK_THROWS_AS(accept_and_update(1.0, -1.0, 4.0, p), EngineError);
}

TEST_CASE("parameter validation") {
    TRParams p;
    CHECK_NOTHROW(p.validate());
    p.eta1 = 0.96;  // eta1 >= eta2
    CHECK_THROWS(p.validate());
    p = TRParams{};
    p.gamma3 = 0.5;
    CHECK_THROWS(p.validate());
    p = TRParams{};
    p.max_iter = 0;
    CHECK_THROWS(p.validate());
}

TEST_CASE("smooth quadratic is minimized to tolerance") {
    Vec a = Vec::Zero(2);
    Vec x0(2);
    x0 << 1.0, 1.0;
    SmoothObjective f = shifted_quadratic(a);
    TRParams p;
    SolveResult r = solve_single_level(f, ProxFunction::zero(), x0, p);
    CHECK(r.status == SolveStatus::Converged);
    CHECK(r.h <= p.eps_h);
    CHECK(r.x.lpNorm<Eigen::Infinity>() <= 1e-7);
    CHECK(r.top_iterations >= 1);
    CHECK((int)r.trace.size() == r.top_iterations);
    CHECK(r.totals.grad >= 1);
    CHECK(r.totals.prox >= 1);
}

TEST_CASE("soft-threshold fixed point of the composite quadratic") {
    Vec a(3);
    a << 2.0, -0.05, 0.4;
    const double beta = 0.1;
    SmoothObjective f = shifted_quadratic(a);
    ProxFunction l1 = ProxFunction::l1(beta);
    TRParams p;
    SolveResult r = solve_single_level(f, l1, Vec::Zero(3), p);
    Vec want = l1.prox_raw(1.0, a);
    CHECK(r.status == SolveStatus::Converged);
    CHECK((r.x - want).lpNorm<Eigen::Infinity>() <= 1e-8);

    // reported F matches a direct evaluation
    CHECK(r.F == doctest::Approx(0.5 * (r.x - a).squaredNorm() + beta * r.x.lpNorm<1>())
                     .epsilon(1e-12));
}

TEST_CASE("rejected steps shrink the radius and keep the iterate") {
    // The curvature callback lies (returns zero), so early steps overshoot
    // and the ratio test has to reject them.
    SmoothObjective f = liar_quadratic();
    Vec x0(1);
    x0 << 1.0;
    TRParams p;
    SolveResult r = solve_single_level(f, ProxFunction::zero(), x0, p);
    CHECK(r.status == SolveStatus::Converged);
    CHECK(std::abs(r.x[0]) <= 1e-7);

    int rejected = 0;
    for (size_t j = 0; j < r.trace.size(); ++j) {
        const TraceRow& row = r.trace[j];
        if (row.cls == StepClass::Unsuccessful) {
            rejected++;
            CHECK(row.rho < p.eta1);
            if (j + 1 < r.trace.size()) {
                // radius shrinks by exactly gamma2
                CHECK(r.trace[j + 1].delta == doctest::Approx(p.gamma2 * row.delta).epsilon(1e-15));
            }
            // the iterate and with it the composite value stay put
            if (j > 0) CHECK(row.F == r.trace[j - 1].F);
        }
    }
    CHECK(rejected >= 1);
}

TEST_CASE("top-level iteration budget") {
    SmoothObjective f = liar_quadratic();
    TRParams p;
    p.max_iter = 2;
    Vec x0(1);
    x0 << 1.0;
    SolveResult r = solve_single_level(f, ProxFunction::zero(), x0, p);
    CHECK(r.status == SolveStatus::Budget);
    CHECK(r.top_iterations == 2);
}

TEST_CASE("relaxed stationarity target stops earlier") {
    Vec x0(1);
    x0 << 1.0;
    TRParams loose;
    loose.eps_h = 1e-2;
    TRParams tight;
    SolveResult rl = solve_single_level(liar_quadratic(), ProxFunction::zero(), x0, loose);
    SolveResult rt = solve_single_level(liar_quadratic(), ProxFunction::zero(), x0, tight);
    CHECK(rl.status == SolveStatus::Converged);
    CHECK(rt.status == SolveStatus::Converged);
    CHECK(rl.h <= 1e-2);
    CHECK(rt.h <= 1e-7);
    CHECK(rl.top_iterations < rt.top_iterations);
}

TEST_CASE("two-level run matches the single-level minimizer") {
    QuadL1Problem q;
    q.n = 64;
    TRParams p;

    ProblemBuild two = build_quadl1(q, 2);
    SolveResult r2 = solve_multilevel(two.stack, two.x0, p);
    CHECK(r2.status == SolveStatus::Converged);
    CHECK(r2.h <= p.eps_h);

    ProblemBuild one = build_quadl1(q, 1);
    SolveResult r1 = solve_multilevel(one.stack, one.x0, p);
    CHECK(r1.status == SolveStatus::Converged);

    // independent reference: long spectral prox-gradient solve on the
    // full quadratic with no trust region
    SmoothObjective fine = quadl1_objective(q);
    SPGParams sp;
    sp.maxit = 20000;
    sp.tau_abs = 1e-12;
    sp.tau_rel = 1e-12;
    const Vec zref = Vec::Zero(q.n);
    const std::function<Vec(const Vec&)> Bref = [&fine, zref](const Vec& v) {
        return fine.hessvec_fn(zref, v);
    };
    SPGResult ref = spg_solve(fine.grad_fn(zref), Bref, ProxFunction::l1(q.beta), zref, kInf, sp);
    const double F_ref = fine.value_fn(ref.x) + q.beta * ref.x.lpNorm<1>();

    CHECK(r1.F <= F_ref + 1e-6);
    CHECK(r2.F <= F_ref + 1e-6);
    CHECK(std::abs(r1.F - r2.F) <= 1e-6);

    // trace sanity: levels in range, finite values, k increments inside
    // each sequence
    for (int lvl = 0; lvl <= 1; ++lvl) {
        auto seqs = sequences_at_level(r2.trace, lvl);
        for (const auto& s : seqs) {
            for (size_t j = 0; j < s.size(); ++j) {
                CHECK(s[j].k == (int)j);
                CHECK(std::isfinite(s[j].F));
                CHECK(s[j].delta > 0.0);
                CHECK(s[j].h > 0.0);
            }
            // composite value never increases within a sequence
            for (size_t j = 1; j < s.size(); ++j) CHECK(s[j].F <= s[j - 1].F + 1e-12);
        }
    }

    // counters: totals are the sum over the levels
    EvalCounters sum;
    for (const auto& lvl : two.stack.levels) sum += *lvl.counters;
    CHECK(sum.fval == r2.totals.fval);
    CHECK(sum.grad == r2.totals.grad);
    CHECK(sum.prox == r2.totals.prox);
}

TEST_CASE("coarse sequences that run report at least one success") {
    QuadL1Problem q;
    q.n = 128;
    q.beta = 0.05;
    TRParams p;
    ProblemBuild three = build_quadl1(q, 3);
    SolveResult r = solve_multilevel(three.stack, three.x0, p);
    CHECK(r.status == SolveStatus::Converged);
    for (int lvl = 0; lvl < 2; ++lvl) {
        for (const auto& s : sequences_at_level(r.trace, lvl)) {
            bool any = false;
            for (const auto& row : s)
                if (row.cls != StepClass::Unsuccessful) any = true;
            CHECK(any);
        }
    }
}

TEST_CASE("mismatched stack dimensions are rejected") {
    QuadL1Problem q;
    q.n = 64;
    ProblemBuild two = build_quadl1(q, 2);
    Vec bad = Vec::Zero(q.n / 2);
    TRParams p;
    CHECK_THROWS(solve_multilevel(two.stack, bad, p));

    LevelStack empty;
    CHECK_THROWS(solve_multilevel(empty, bad, p));
}
