#pragma once

#include "mltr/engine.hpp"

#include <string>

namespace mltr {

// A ready-to-solve hierarchy: level stack (coarsest first), fine-level
// initial point, and identification for reporting.
struct ProblemBuild {
    LevelStack stack;
    Vec x0;
    std::string name;
    int n_fine = 0;
};

}  // namespace mltr
