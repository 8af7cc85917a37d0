#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <stdexcept>

namespace mltr {

using Vec = Eigen::VectorXd;

// Evaluation counters, one set per level. The smooth objective and the
// nonsmooth term of a level share the same instance so that the harness
// can report per-run totals by summing over levels.
struct EvalCounters {
    long fval = 0;
    long grad = 0;
    long hess = 0;
    long phi = 0;
    long prox = 0;

    EvalCounters& operator+=(const EvalCounters& o) {
        fval += o.fval;
        grad += o.grad;
        hess += o.hess;
        phi += o.phi;
        prox += o.prox;
        return *this;
    }
};

// Smooth part of a composite objective. The raw closures do the work;
// the counting wrappers below are what solvers call. Derived objectives
// (gradient-corrected coarse models) wrap the raw closures and keep the
// same counter instance, so each call still ticks exactly once.
class SmoothObjective {
  public:
    int n = 0;
    std::function<double(const Vec&)> value_fn;
    std::function<Vec(const Vec&)> grad_fn;
    std::function<Vec(const Vec&, const Vec&)> hessvec_fn;
    std::shared_ptr<EvalCounters> counters;

    double value(const Vec& x) const {
        check_dim(x);
        if (counters) counters->fval++;
        return value_fn(x);
    }

    Vec gradient(const Vec& x) const {
        check_dim(x);
        if (counters) counters->grad++;
        return grad_fn(x);
    }

    Vec hessvec(const Vec& x, const Vec& v) const {
        check_dim(x);
        check_dim(v);
        if (counters) counters->hess++;
        return hessvec_fn(x, v);
    }

  private:
    void check_dim(const Vec& x) const {
        if (x.size() != n) throw std::invalid_argument("SmoothObjective: dimension mismatch");
    }
};

}  // namespace mltr
