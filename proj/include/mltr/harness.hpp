#pragma once

#include "mltr/burgers.hpp"
#include "mltr/engine.hpp"
#include "mltr/pinn.hpp"
#include "mltr/quadl1.hpp"
#include "mltr/semilinear.hpp"

#include <string>
#include <vector>

namespace mltr {

// One benchmark run described by a JSON file. Top-level sections:
// "problem" (name), "levels", "tr", "spg", and one section named after
// the chosen problem carrying its parameters. Any unknown key, at any
// nesting depth, is an error.
struct RunConfig {
    std::string problem;  // burgers | semilinear | pinn | quadl1
    int levels = 1;
    TRParams tr;
    BurgersParams burgers;
    SemilinearParams semilinear;
    PinnParams pinn;
    QuadL1Problem quadl1;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

unsigned problem_seed(const RunConfig& cfg);
void override_seed(RunConfig& cfg, unsigned seed);

// Comparisons only make sense on the same problem instance: same problem
// name and same seed. Throws otherwise.
void check_comparable(const RunConfig& a, const RunConfig& b);

ProblemBuild build_problem(const RunConfig& cfg);

struct RunOutput {
    std::string problem;
    int levels = 0;
    int n = 0;
    SolveResult res;
    double seconds = 0.0;  // wall time of the solve only
};

RunOutput run_problem(const RunConfig& cfg);

// Iteration trace in CSV form: a fixed header, then one row per
// iteration with %.17g doubles and LF line endings, so repeat runs of
// the same configuration produce byte-identical files.
std::string trace_csv(const std::vector<TraceRow>& trace);

// One-row summary (two rows for the comparison form).
std::string report_table(const RunOutput& out);
std::string report_table(const RunOutput& a, const RunOutput& b);

// Side-by-side top-level F and h histories plus the fine-iteration ratio.
std::string compare_histories(const RunOutput& a, const RunOutput& b);

int exit_code(const RunOutput& out);  // 0 converged, 2 budget exhausted

}  // namespace mltr
