#include "mltr/pinn.hpp"

#include "mltr/dual.hpp"

#include <cmath>
#include <random>

namespace mltr {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

template <class S>
S sigmoid(const S& z) {
    using std::exp;
    if (value_of(z) >= 0.0) {
        const S e = exp(-z);
        return S(1.0) / (S(1.0) + e);
    }
    const S e = exp(z);
    return e / (S(1.0) + e);
}

}  // namespace

double pinn_kappa(double x, double y) {
    return 1.1 + 0.2 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y);
}

double pinn_kappa_x(double x, double y) {
    return 0.2 * kTwoPi * std::cos(kTwoPi * x) * std::cos(kTwoPi * y);
}

double pinn_kappa_y(double x, double y) {
    return -0.2 * kTwoPi * std::sin(kTwoPi * x) * std::sin(kTwoPi * y);
}

double pinn_exact(double x, double y) {
    const double P = x * (1.0 - x) * y * (1.0 - y);
    const double Q = 1.0 + 0.25 * std::sin(kTwoPi * x) * std::sin(kTwoPi * y) + 0.1 * x * y;
    return P * Q;
}

double pinn_forcing(double x, double y) {
    const double px = x * (1.0 - x), py = y * (1.0 - y);
    const double pxd = 1.0 - 2.0 * x, pyd = 1.0 - 2.0 * y;
    const double P = px * py;
    const double Px = pxd * py, Py = px * pyd;
    const double Pxx = -2.0 * py, Pyy = -2.0 * px;

    const double sx = std::sin(kTwoPi * x), cx = std::cos(kTwoPi * x);
    const double sy = std::sin(kTwoPi * y), cy = std::cos(kTwoPi * y);
    const double Q = 1.0 + 0.25 * sx * sy + 0.1 * x * y;
    const double Qx = 0.25 * kTwoPi * cx * sy + 0.1 * y;
    const double Qy = 0.25 * kTwoPi * sx * cy + 0.1 * x;
    const double Qxx = -0.25 * kTwoPi * kTwoPi * sx * sy;
    const double Qyy = -0.25 * kTwoPi * kTwoPi * sx * sy;

    const double ux = Px * Q + P * Qx;
    const double uy = Py * Q + P * Qy;
    const double uxx = Pxx * Q + 2.0 * Px * Qx + P * Qxx;
    const double uyy = Pyy * Q + 2.0 * Py * Qy + P * Qyy;

    return -pinn_kappa(x, y) * (uxx + uyy) - pinn_kappa_x(x, y) * ux - pinn_kappa_y(x, y) * uy;
}

PinnProblem::Point PinnProblem::make_point(double x, double y) {
    Point pt;
    pt.x = x;
    pt.y = y;
    pt.kap = pinn_kappa(x, y);
    pt.kx = pinn_kappa_x(x, y);
    pt.ky = pinn_kappa_y(x, y);
    pt.g = pinn_forcing(x, y);
    pt.interior = true;
    return pt;
}

PinnProblem::PinnProblem(const PinnParams& p) : prm_(p) {
    if (p.width < 1) throw std::invalid_argument("pinn: width must be >= 1");
    if (p.grid < 3) throw std::invalid_argument("pinn: grid must be >= 3");
    n_ = 4 * p.width + (p.output_bias ? 1 : 0);

    const int G = p.grid;
    pts_.reserve(G * G);
    int ni = 0, nb = 0;
    for (int j = 0; j < G; ++j) {
        for (int i = 0; i < G; ++i) {
            Point pt = make_point((double)i / (G - 1), (double)j / (G - 1));
            pt.interior = i > 0 && i < G - 1 && j > 0 && j < G - 1;
            (pt.interior ? ni : nb)++;
            pts_.push_back(pt);
        }
    }
    w_int_ = 1.0 / ni;
    w_bd_ = 1.0 / nb;
}

Vec PinnProblem::initial_theta() const {
    std::mt19937_64 rng(prm_.seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Vec th(n_);
    for (int j = 0; j < n_; ++j) th[j] = u(rng);
    return th;
}

// strong-form residual -kap Lap N - kx Nx - ky Ny - g at one point
template <class S>
S PinnProblem::residual_core(const std::vector<S>& th, const Point& pt) const {
    const int m = prm_.width;
    const double x = pt.x, y = pt.y;
    S r(-pt.g);
    for (int k = 0; k < m; ++k) {
        const S& wx = th[2 * k];
        const S& wy = th[2 * k + 1];
        const S z = x * wx + y * wy + th[2 * m + k];
        const S s = sigmoid(z);
        const S s1 = s * (S(1.0) - s);
        const S s2 = s1 * (S(1.0) - 2.0 * s);
        const S q = wx * wx + wy * wy;
        r += th[3 * m + k] * (-pt.kap * (s2 * q) - pt.kx * (s1 * wx) - pt.ky * (s1 * wy));
    }
    return r;
}

template <class S>
S PinnProblem::network_core(const std::vector<S>& th, double x, double y) const {
    const int m = prm_.width;
    S N = prm_.output_bias ? th[4 * m] : S(0.0);
    for (int k = 0; k < m; ++k) {
        const S z = x * th[2 * k] + y * th[2 * k + 1] + th[2 * m + k];
        N += th[3 * m + k] * sigmoid(z);
    }
    return N;
}

double PinnProblem::value(const Vec& theta) const {
    if (theta.size() != n_) throw std::invalid_argument("pinn: theta has wrong size");
    const std::vector<double> th(theta.data(), theta.data() + n_);
    double acc = 0.0;
    for (const auto& pt : pts_) {
        if (pt.interior) {
            const double r = residual_core(th, pt);
            acc += 0.5 * w_int_ * r * r;
        } else {
            const double N = network_core(th, pt.x, pt.y);
            acc += 0.5 * w_bd_ * N * N;
        }
    }
    return acc;
}

template <class S>
std::vector<S> PinnProblem::grad_impl(const std::vector<S>& th) const {
    const int m = prm_.width;
    std::vector<S> out(n_, S(0.0));
    std::vector<S> sv(m), s1v(m), s2v(m), s3v(m), qv(m);
    for (const auto& pt : pts_) {
        const double x = pt.x, y = pt.y;
        if (pt.interior) {
            S r(-pt.g);
            for (int k = 0; k < m; ++k) {
                const S& wx = th[2 * k];
                const S& wy = th[2 * k + 1];
                const S z = x * wx + y * wy + th[2 * m + k];
                const S s = sigmoid(z);
                const S s1 = s * (S(1.0) - s);
                const S one_2s = S(1.0) - 2.0 * s;
                const S s2 = s1 * one_2s;
                const S s3 = s2 * one_2s - 2.0 * (s1 * s1);
                const S q = wx * wx + wy * wy;
                sv[k] = s;
                s1v[k] = s1;
                s2v[k] = s2;
                s3v[k] = s3;
                qv[k] = q;
                r += th[3 * m + k] * (-pt.kap * (s2 * q) - pt.kx * (s1 * wx) - pt.ky * (s1 * wy));
            }
            const S cw = w_int_ * r;
            for (int k = 0; k < m; ++k) {
                const S& wx = th[2 * k];
                const S& wy = th[2 * k + 1];
                const S& c = th[3 * m + k];
                const S& s1 = s1v[k];
                const S& s2 = s2v[k];
                const S& s3 = s3v[k];
                const S& q = qv[k];
                out[2 * k] += cw * (c * (-pt.kap * (s3 * (x * q) + 2.0 * (s2 * wx)) -
                                         pt.kx * (s2 * (x * wx) + s1) - pt.ky * (s2 * (x * wy))));
                out[2 * k + 1] +=
                    cw * (c * (-pt.kap * (s3 * (y * q) + 2.0 * (s2 * wy)) -
                               pt.ky * (s2 * (y * wy) + s1) - pt.kx * (s2 * (y * wx))));
                out[2 * m + k] +=
                    cw * (c * (-pt.kap * (s3 * q) - pt.kx * (s2 * wx) - pt.ky * (s2 * wy)));
                out[3 * m + k] +=
                    cw * (-pt.kap * (s2 * q) - pt.kx * (s1 * wx) - pt.ky * (s1 * wy));
            }
        } else {
            S N = prm_.output_bias ? th[4 * m] : S(0.0);
            for (int k = 0; k < m; ++k) {
                const S z = x * th[2 * k] + y * th[2 * k + 1] + th[2 * m + k];
                const S s = sigmoid(z);
                sv[k] = s;
                s1v[k] = s * (S(1.0) - s);
                N += th[3 * m + k] * s;
            }
            const S cw = w_bd_ * N;
            for (int k = 0; k < m; ++k) {
                const S& c = th[3 * m + k];
                out[2 * k] += cw * (c * (x * s1v[k]));
                out[2 * k + 1] += cw * (c * (y * s1v[k]));
                out[2 * m + k] += cw * (c * s1v[k]);
                out[3 * m + k] += cw * sv[k];
            }
            if (prm_.output_bias) out[4 * m] += cw;
        }
    }
    return out;
}

Vec PinnProblem::gradient(const Vec& theta) const {
    if (theta.size() != n_) throw std::invalid_argument("pinn: theta has wrong size");
    const std::vector<double> th(theta.data(), theta.data() + n_);
    const std::vector<double> g = grad_impl(th);
    return Eigen::Map<const Vec>(g.data(), n_);
}

Vec PinnProblem::hessvec(const Vec& theta, const Vec& v) const {
    if (theta.size() != n_ || v.size() != n_)
        throw std::invalid_argument("pinn: theta or direction has wrong size");
    std::vector<Dual<double>> th(n_);
    for (int j = 0; j < n_; ++j) th[j] = {theta[j], v[j]};
    const std::vector<Dual<double>> g = grad_impl(th);
    Vec out(n_);
    for (int j = 0; j < n_; ++j) out[j] = g[j].d;
    return out;
}

double PinnProblem::network(const Vec& theta, double x, double y) const {
    if (theta.size() != n_) throw std::invalid_argument("pinn: theta has wrong size");
    const std::vector<double> th(theta.data(), theta.data() + n_);
    return network_core(th, x, y);
}

double PinnProblem::residual_at(const Vec& theta, double x, double y) const {
    if (theta.size() != n_) throw std::invalid_argument("pinn: theta has wrong size");
    const std::vector<double> th(theta.data(), theta.data() + n_);
    return residual_core(th, make_point(x, y));
}

ProblemBuild build_pinn(const PinnParams& p, int levels) {
    if (levels < 1) throw std::invalid_argument("build_pinn: levels must be >= 1");
    const int n = 4 * p.width + (p.output_bias ? 1 : 0);
    if (n % (1 << (levels - 1)) != 0)
        throw std::invalid_argument("build_pinn: parameter count not divisible by 2^(levels-1)");
    if ((n >> (levels - 1)) < 4)
        throw std::invalid_argument("build_pinn: coarsest level below 4 parameters");

    auto prob = std::make_shared<PinnProblem>(p);

    ProblemBuild pb;
    pb.name = "pinn";
    pb.n_fine = n;
    pb.x0 = prob->initial_theta();
    pb.stack.levels.resize(levels);

    for (int ell = 0; ell < levels; ++ell) {
        const int i = levels - 1 - ell;  // stack index, coarsest first
        const int n_i = n >> ell;
        Level& lvl = pb.stack.levels[i];
        lvl.counters = std::make_shared<EvalCounters>();
        lvl.smooth.n = n_i;
        lvl.smooth.counters = lvl.counters;
        if (i == levels - 1) {
            lvl.smooth.value_fn = [prob](const Vec& th) { return prob->value(th); };
            lvl.smooth.grad_fn = [prob](const Vec& th) { return prob->gradient(th); };
            lvl.smooth.hessvec_fn = [prob](const Vec& th, const Vec& v) {
                return prob->hessvec(th, v);
            };
            lvl.phi = ProxFunction::l1(p.beta);
        } else {
            // Galerkin pullback through the composed transfer T: fine -> i
            TransferOp T = build_avg_1d(n);
            for (int d = 1; d <= ell - 1; ++d) T = compose(build_avg_1d(n >> d), T);
            lvl.smooth.value_fn = [prob, T](const Vec& w) { return prob->value(T.prolong(w)); };
            lvl.smooth.grad_fn = [prob, T](const Vec& w) {
                return T.restrict(prob->gradient(T.prolong(w)));
            };
            lvl.smooth.hessvec_fn = [prob, T](const Vec& w, const Vec& v) {
                return T.restrict(prob->hessvec(T.prolong(w), T.prolong(v)));
            };
            lvl.phi = ProxFunction::zero();
        }
        if (i > 0) lvl.R = build_avg_1d(n_i);
    }
    return pb;
}

}  // namespace mltr
