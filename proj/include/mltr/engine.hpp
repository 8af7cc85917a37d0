#pragma once

#include "mltr/model.hpp"
#include "mltr/prox.hpp"
#include "mltr/spg.hpp"
#include "mltr/transfer.hpp"
#include "mltr/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mltr {

struct TRParams {
    double delta0 = 50.0;
    double eta1 = 0.05;
    double eta2 = 0.95;
    double gamma1 = 0.25;
    double gamma2 = 0.25;
    double gamma3 = 2.0;
    double kappa_stop = 0.6;   // recursion gate: h_coarse0 >= kappa_stop * h_fine
    double eps_model = 0.1;    // recursion gate: h_coarse0 >= eps_model
    double eps_delta = 1e-2;   // margin of the near-boundary return test
    double eps_h = 1e-7;       // top-level stationarity target
    int max_iter = 400;        // top-level iteration budget
    int max_coarse_iter = 100; // per coarse minimization sequence
    double t0 = 1.0;           // prox step of the stationarity measure
    SPGParams spg;

    void validate() const;
};

enum class ModelKind { Taylor, Recursive };
enum class StepClass { Unsuccessful, Successful, VerySuccessful };

struct TraceRow {
    int level;     // 0 = coarsest
    int k;         // iteration index within its minimization sequence
    double h;      // stationarity at the start of the iteration
    double delta;  // radius used by the iteration
    double rho;
    ModelKind kind;
    StepClass cls;
    double F;      // composite value after the iteration
};

struct Level {
    SmoothObjective smooth;        // f_i
    ProxFunction phi;              // phi_i; only the finest level's phi is used
                                   // directly, coarse ones are pulled back
    std::optional<TransferOp> R;   // restriction to level i-1 (absent on level 0)
    std::shared_ptr<EvalCounters> counters;
    double eps_h = 1e-7;
    double delta_s = 0.0;          // per-level initial radius; 0 = use delta0
};

struct LevelStack {
    std::vector<Level> levels;  // coarsest first, finest last
    int top() const { return (int)levels.size() - 1; }
    void validate() const;
};

enum class SolveStatus { Converged, Budget };

struct SolveResult {
    Vec x;
    SolveStatus status = SolveStatus::Budget;
    double F = 0.0;
    double h = 0.0;
    int top_iterations = 0;
    std::vector<TraceRow> trace;
    EvalCounters totals;
    std::vector<double> kappa_h;  // empirical curvature bound per level
};

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Recursion gate: descend only when the entry stationarity of the coarse
// model is comparable to the fine one and not already negligible.
bool model_choice(double h_coarse0, double h_fine, const TRParams& p, int level);

struct AcceptDecision {
    bool accepted = false;
    double rho = 0.0;
    double delta_plus = 0.0;
    StepClass cls = StepClass::Unsuccessful;
};

// rho = ared/pred, acceptance at eta1, radius bands gamma3*delta /
// delta / gamma2*delta. pred must be positive.
AcceptDecision accept_and_update(double ared, double pred, double delta, const TRParams& p);

SolveResult solve_multilevel(const LevelStack& stack, const Vec& x0, const TRParams& p);

SolveResult solve_single_level(const SmoothObjective& f, const ProxFunction& phi, const Vec& x0,
                               const TRParams& p);

}  // namespace mltr
