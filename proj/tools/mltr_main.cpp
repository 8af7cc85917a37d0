#include "mltr/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void flag_curvature(const mltr::RunOutput& o) {
    for (size_t i = 0; i < o.res.kappa_h.size(); ++i)
        if (o.res.kappa_h[i] > 1e8)
            std::cerr << "warning: curvature bound " << o.res.kappa_h[i] << " on level " << i
                      << " exceeds 1e8; the model quality assumption is strained\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multilevel proximal trust-region benchmark driver"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = -1;
    int levels = 0;
    auto* run = app.add_subcommand("run", "solve one configured problem");
    run->add_option("--config", config_path, "JSON configuration file")->required();
    run->add_option("--out", out_dir, "directory for the iteration trace CSV");
    run->add_option("--seed", seed, "override the problem seed");
    run->add_option("--levels", levels, "override the level count");

    std::string cfg_a_path, cfg_b_path, cmp_out_dir;
    auto* cmp = app.add_subcommand("compare",
                                   "run two configurations of the same problem and seed");
    cmp->add_option("--config-a", cfg_a_path, "baseline configuration")->required();
    cmp->add_option("--config-b", cfg_b_path, "comparison configuration")->required();
    cmp->add_option("--out", cmp_out_dir, "directory for both trace CSVs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            mltr::RunConfig cfg = mltr::load_config(config_path);
            if (seed >= 0) mltr::override_seed(cfg, (unsigned)seed);
            if (levels > 0) cfg.levels = levels;

            const mltr::RunOutput out = mltr::run_problem(cfg);
            std::cout << mltr::report_table(out);
            flag_curvature(out);
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                write_file(std::filesystem::path(out_dir) / "trace.csv",
                           mltr::trace_csv(out.res.trace));
            }
            return mltr::exit_code(out);
        }

        mltr::RunConfig cfg_a = mltr::load_config(cfg_a_path);
        mltr::RunConfig cfg_b = mltr::load_config(cfg_b_path);
        mltr::check_comparable(cfg_a, cfg_b);

        const mltr::RunOutput a = mltr::run_problem(cfg_a);
        const mltr::RunOutput b = mltr::run_problem(cfg_b);
        std::cout << mltr::report_table(a, b) << "\n" << mltr::compare_histories(a, b);
        flag_curvature(a);
        flag_curvature(b);
        if (!cmp_out_dir.empty()) {
            std::filesystem::create_directories(cmp_out_dir);
            write_file(std::filesystem::path(cmp_out_dir) / "trace_a.csv",
                       mltr::trace_csv(a.res.trace));
            write_file(std::filesystem::path(cmp_out_dir) / "trace_b.csv",
                       mltr::trace_csv(b.res.trace));
        }
        return std::max(mltr::exit_code(a), mltr::exit_code(b));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
