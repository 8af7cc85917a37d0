#include "mltr/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace mltr {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> known) {
    if (!obj.is_object()) bad("section \"" + section + "\" must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) bad("unknown key \"" + it.key() + "\" in \"" + section + "\"");
    }
}

template <class T>
void read_if(const json& obj, const char* key, T& dst) {
    if (obj.contains(key)) obj.at(key).get_to(dst);
}

void parse_tr(const json& obj, TRParams& tr) {
    check_keys(obj, "tr",
               {"delta0", "eta1", "eta2", "gamma1", "gamma2", "gamma3", "kappa_stop",
                "eps_model", "eps_delta", "eps_h", "max_iter", "max_coarse_iter", "t0"});
    read_if(obj, "delta0", tr.delta0);
    read_if(obj, "eta1", tr.eta1);
    read_if(obj, "eta2", tr.eta2);
    read_if(obj, "gamma1", tr.gamma1);
    read_if(obj, "gamma2", tr.gamma2);
    read_if(obj, "gamma3", tr.gamma3);
    read_if(obj, "kappa_stop", tr.kappa_stop);
    read_if(obj, "eps_model", tr.eps_model);
    read_if(obj, "eps_delta", tr.eps_delta);
    read_if(obj, "eps_h", tr.eps_h);
    read_if(obj, "max_iter", tr.max_iter);
    read_if(obj, "max_coarse_iter", tr.max_coarse_iter);
    read_if(obj, "t0", tr.t0);
}

void parse_spg(const json& obj, SPGParams& spg) {
    check_keys(obj, "spg", {"maxit", "tau_abs", "tau_rel", "t_min", "t_max", "t_init", "t0"});
    read_if(obj, "maxit", spg.maxit);
    read_if(obj, "tau_abs", spg.tau_abs);
    read_if(obj, "tau_rel", spg.tau_rel);
    read_if(obj, "t_min", spg.t_min);
    read_if(obj, "t_max", spg.t_max);
    read_if(obj, "t_init", spg.t_init);
    read_if(obj, "t0", spg.t0);
}

void parse_burgers(const json& obj, BurgersParams& p) {
    check_keys(obj, "burgers",
               {"n", "nu", "alpha", "beta", "seed", "step_pieces_min", "step_pieces_max",
                "step_amp", "bump_count", "bump_width_min", "bump_width_max", "bump_amp",
                "salt_prob", "salt_amp", "newton_tol", "newton_maxit"});
    read_if(obj, "n", p.n);
    read_if(obj, "nu", p.nu);
    read_if(obj, "alpha", p.alpha);
    read_if(obj, "beta", p.beta);
    read_if(obj, "seed", p.seed);
    read_if(obj, "step_pieces_min", p.step_pieces_min);
    read_if(obj, "step_pieces_max", p.step_pieces_max);
    read_if(obj, "step_amp", p.step_amp);
    read_if(obj, "bump_count", p.bump_count);
    read_if(obj, "bump_width_min", p.bump_width_min);
    read_if(obj, "bump_width_max", p.bump_width_max);
    read_if(obj, "bump_amp", p.bump_amp);
    read_if(obj, "salt_prob", p.salt_prob);
    read_if(obj, "salt_amp", p.salt_amp);
    read_if(obj, "newton_tol", p.newton_tol);
    read_if(obj, "newton_maxit", p.newton_maxit);
}

void parse_semilinear(const json& obj, SemilinearParams& p) {
    check_keys(obj, "semilinear",
               {"n", "alpha", "beta", "zlo", "zhi", "target_noise", "seed", "newton_tol",
                "newton_maxit"});
    read_if(obj, "n", p.n);
    read_if(obj, "alpha", p.alpha);
    read_if(obj, "beta", p.beta);
    read_if(obj, "zlo", p.zlo);
    read_if(obj, "zhi", p.zhi);
    read_if(obj, "target_noise", p.target_noise);
    read_if(obj, "seed", p.seed);
    read_if(obj, "newton_tol", p.newton_tol);
    read_if(obj, "newton_maxit", p.newton_maxit);
}

void parse_pinn(const json& obj, PinnParams& p) {
    check_keys(obj, "pinn", {"width", "grid", "beta", "seed", "output_bias"});
    read_if(obj, "width", p.width);
    read_if(obj, "grid", p.grid);
    read_if(obj, "beta", p.beta);
    read_if(obj, "seed", p.seed);
    read_if(obj, "output_bias", p.output_bias);
}

void parse_quadl1(const json& obj, QuadL1Problem& p) {
    check_keys(obj, "quadl1", {"n", "beta", "coupling", "seed"});
    read_if(obj, "n", p.n);
    read_if(obj, "beta", p.beta);
    read_if(obj, "coupling", p.coupling);
    read_if(obj, "seed", p.seed);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* kind_name(ModelKind k) { return k == ModelKind::Taylor ? "taylor" : "recursive"; }

const char* class_name(StepClass c) {
    switch (c) {
        case StepClass::Unsuccessful: return "unsuccessful";
        case StepClass::Successful: return "successful";
        case StepClass::VerySuccessful: return "very-successful";
    }
    return "?";
}

std::string report_header() {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %8s %6s %6s %13s %10s %6s %6s %6s %6s %6s %9s\n",
                  "problem", "n", "levels", "iter", "F", "h", "fval", "grad", "hess", "phi",
                  "prox", "seconds");
    return buf;
}

std::string report_row(const RunOutput& o) {
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "%-10s %8d %6d %6d %13.6e %10.3e %6ld %6ld %6ld %6ld %6ld %9.3f\n",
                  o.problem.c_str(), o.n, o.levels, o.res.top_iterations, o.res.F, o.res.h,
                  o.res.totals.fval, o.res.totals.grad, o.res.totals.hess, o.res.totals.phi,
                  o.res.totals.prox, o.seconds);
    return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        bad(std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object()) bad("top level must be an object");
    if (!root.contains("problem")) bad("missing \"problem\"");

    RunConfig cfg;
    root.at("problem").get_to(cfg.problem);
    if (cfg.problem != "burgers" && cfg.problem != "semilinear" && cfg.problem != "pinn" &&
        cfg.problem != "quadl1")
        bad("unknown problem \"" + cfg.problem + "\"");

    check_keys(root, "top level", {"problem", "levels", "tr", "spg", cfg.problem.c_str()});
    read_if(root, "levels", cfg.levels);
    if (root.contains("tr")) parse_tr(root.at("tr"), cfg.tr);
    if (root.contains("spg")) parse_spg(root.at("spg"), cfg.tr.spg);
    if (root.contains(cfg.problem)) {
        const json& sec = root.at(cfg.problem);
        if (cfg.problem == "burgers") parse_burgers(sec, cfg.burgers);
        else if (cfg.problem == "semilinear") parse_semilinear(sec, cfg.semilinear);
        else if (cfg.problem == "pinn") parse_pinn(sec, cfg.pinn);
        else parse_quadl1(sec, cfg.quadl1);
    }
    cfg.tr.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

unsigned problem_seed(const RunConfig& cfg) {
    if (cfg.problem == "burgers") return cfg.burgers.seed;
    if (cfg.problem == "semilinear") return cfg.semilinear.seed;
    if (cfg.problem == "pinn") return cfg.pinn.seed;
    return cfg.quadl1.seed;
}

void override_seed(RunConfig& cfg, unsigned seed) {
    cfg.burgers.seed = seed;
    cfg.semilinear.seed = seed;
    cfg.pinn.seed = seed;
    cfg.quadl1.seed = seed;
}

void check_comparable(const RunConfig& a, const RunConfig& b) {
    if (a.problem != b.problem)
        throw std::invalid_argument("compare: configurations solve different problems");
    if (problem_seed(a) != problem_seed(b))
        throw std::invalid_argument("compare: configurations use different seeds");
}

ProblemBuild build_problem(const RunConfig& cfg) {
    if (cfg.problem == "burgers") return build_burgers(cfg.burgers, cfg.levels);
    if (cfg.problem == "semilinear") return build_semilinear(cfg.semilinear, cfg.levels);
    if (cfg.problem == "pinn") return build_pinn(cfg.pinn, cfg.levels);
    return build_quadl1(cfg.quadl1, cfg.levels);
}

RunOutput run_problem(const RunConfig& cfg) {
    const ProblemBuild pb = build_problem(cfg);
    RunOutput out;
    out.problem = pb.name;
    out.levels = (int)pb.stack.levels.size();
    out.n = pb.n_fine;
    const auto t0 = std::chrono::steady_clock::now();
    out.res = solve_multilevel(pb.stack, pb.x0, cfg.tr);
    const auto t1 = std::chrono::steady_clock::now();
    out.seconds = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string s = "level,k,h,delta,rho,kind,class,F\n";
    for (const auto& r : trace) {
        s += std::to_string(r.level);
        s += ',';
        s += std::to_string(r.k);
        s += ',';
        s += fmt(r.h);
        s += ',';
        s += fmt(r.delta);
        s += ',';
        s += fmt(r.rho);
        s += ',';
        s += kind_name(r.kind);
        s += ',';
        s += class_name(r.cls);
        s += ',';
        s += fmt(r.F);
        s += '\n';
    }
    return s;
}

std::string report_table(const RunOutput& out) { return report_header() + report_row(out); }

std::string report_table(const RunOutput& a, const RunOutput& b) {
    return report_header() + report_row(a) + report_row(b);
}

std::string compare_histories(const RunOutput& a, const RunOutput& b) {
    std::vector<const TraceRow*> ta, tb;
    const int top_a = a.levels - 1, top_b = b.levels - 1;
    for (const auto& r : a.res.trace)
        if (r.level == top_a) ta.push_back(&r);
    for (const auto& r : b.res.trace)
        if (r.level == top_b) tb.push_back(&r);

    std::string s;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%5s %15s %11s %15s %11s\n", "k", "F(a)", "h(a)", "F(b)",
                  "h(b)");
    s += buf;
    const size_t rows = std::max(ta.size(), tb.size());
    for (size_t k = 0; k < rows; ++k) {
        std::string fa = "-", ha = "-", fb = "-", hb = "-";
        if (k < ta.size()) {
            std::snprintf(buf, sizeof buf, "%.8e", ta[k]->F);
            fa = buf;
            std::snprintf(buf, sizeof buf, "%.4e", ta[k]->h);
            ha = buf;
        }
        if (k < tb.size()) {
            std::snprintf(buf, sizeof buf, "%.8e", tb[k]->F);
            fb = buf;
            std::snprintf(buf, sizeof buf, "%.4e", tb[k]->h);
            hb = buf;
        }
        std::snprintf(buf, sizeof buf, "%5zu %15s %11s %15s %11s\n", k, fa.c_str(), ha.c_str(),
                      fb.c_str(), hb.c_str());
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "fine iterations: %d vs %d, ratio b/a = %.3f\n",
                  a.res.top_iterations, b.res.top_iterations,
                  a.res.top_iterations > 0
                      ? (double)b.res.top_iterations / a.res.top_iterations
                      : 0.0);
    s += buf;
    return s;
}

int exit_code(const RunOutput& out) { return out.res.status == SolveStatus::Converged ? 0 : 2; }

}  // namespace mltr
