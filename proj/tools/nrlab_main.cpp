#include "nrlab/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace nrlab;

namespace {

int run_coeffs(int l, int r) {
    const DispersionCoeffs dc = dispersion_coeffs(r);
    for (int j = 1; j <= r; ++j)
        std::printf("a_%d = %s\n", j, rational_str(dc.a[j - 1]).c_str());
    for (int j = 1; j <= r; ++j)
        std::printf("b_%d = %s\n", j, rational_str(dc.b[j - 1]).c_str());
    const auto h = expand_dispersion(r, false);
    const auto F = expand_nonlinearity(l, r, false);
    for (int j = 1; j <= r; ++j) std::printf("h_%d = %s\n", j, h[j - 1].str().c_str());
    for (int j = 1; j <= r; ++j) std::printf("F_%d = %s\n", j, F[j - 1].str().c_str());
    return 0;
}

int run_normalform(int l, int r, bool complex_case) {
    const NormalForm nf = normal_form(l, r, complex_case);
    for (int j = 1; j <= r; ++j) std::printf("Z_%d = %s\n", j, nf.Z[j - 1].str().c_str());
    for (int j = 1; j <= r; ++j) std::printf("chi_%d = %s\n", j, nf.chi[j - 1].str().c_str());
    std::printf("certified = %s\n", nf.certified ? "true" : "false");
    return nf.certified ? 0 : 1;
}

int run_evolve(const ExperimentConfig& cfg) {
    Grid g = make_grid(cfg.dim, cfg.n, cfg.length);
    Field psi0 = make_datum(cfg, g);
    EvolutionSpec spec;
    spec.system = system_from_string(cfg.system);
    spec.params = {cfg.c_single, cfg.lambda, cfg.l};
    spec.r = cfg.r;
    spec.dt = cfg.dt > 0 ? cfg.dt : 1e-3;
    spec.t_end = cfg.t_end;
    const Trajectory tr = evolve(spec, psi0);
    const std::string csv = trajectory_csv(tr, cfg.modes);
    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out);
        f << csv;
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    if (!cfg.snapshot_out.empty()) write_snapshot(cfg.snapshot_out, tr.samples.back());
    return 0;
}

int finish(const ConvergenceReport& rep) {
    std::fputs(rep.csv().c_str(), stdout);
    std::printf("%s\n", rep.summary().c_str());
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral laboratory for the nonrelativistic limit of "
                 "the nonlinear Klein-Gordon equation"};
    app.require_subcommand(1);

    int l = 2, r = 1;
    bool complex_case = false;
    std::string config_path;

    auto* coeffs = app.add_subcommand("coeffs", "print dispersion/nonlinearity expansions");
    coeffs->add_option("--l", l, "nonlinearity power")->required();
    coeffs->add_option("--r", r, "truncation order")->required();

    auto* nform = app.add_subcommand("normalform", "print the order-r normal form");
    nform->add_option("--l", l, "nonlinearity power")->required();
    nform->add_option("--r", r, "truncation order")->required();
    nform->add_flag("--complex", complex_case, "two-component (complex field) system");

    auto* evolve_cmd = app.add_subcommand("evolve", "evolve a system, write trajectory CSV");
    evolve_cmd->add_option("--config", config_path, "flat key=value config file")->required();

    auto* clin = app.add_subcommand("converge-linear", "linear long-time slope experiment");
    clin->add_option("--config", config_path)->required();

    auto* cnl = app.add_subcommand("converge-nonlinear", "locally-uniform nonlinear slope");
    cnl->add_option("--config", config_path)->required();

    auto* tg = app.add_subcommand("transform-gain", "order-2 transform gain slopes");
    tg->add_option("--config", config_path)->required();

    auto* sc = app.add_subcommand("scaling-identity", "linear flow rescaling identity check");
    sc->add_option("--config", config_path)->required();

    auto* gt = app.add_subcommand("galerkin-tail", "Littlewood-Paley cutoff tail decay");
    gt->add_option("--config", config_path)->required();

    auto* gb = app.add_subcommand("global-bound", "uniform small-data bound (torus smoke test)");
    gb->add_option("--config", config_path)->required();

    app.add_subcommand("validate", "run the module validation suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (coeffs->parsed()) return run_coeffs(l, r);
        if (nform->parsed()) return run_normalform(l, r, complex_case);
        if (evolve_cmd->parsed()) return run_evolve(parse_config_file(config_path));
        if (clin->parsed()) return finish(exp_linear_longtime(parse_config_file(config_path)));
        if (cnl->parsed()) return finish(exp_nonlinear_locuniform(parse_config_file(config_path)));
        if (tg->parsed()) {
            const auto rep = exp_transform_gain(parse_config_file(config_path));
            std::fputs(rep.transformed.csv().c_str(), stdout);
            std::printf("%s\n", rep.transformed.summary().c_str());
            std::printf("untransformed: %s\n", rep.untransformed.summary().c_str());
            return rep.transformed.pass && rep.untransformed.pass ? 0 : 1;
        }
        if (sc->parsed()) {
            const auto rep = exp_scaling_identity(parse_config_file(config_path));
            std::fputs(rep.csv().c_str(), stdout);
            std::printf("PASS=%s\n", rep.pass ? "true" : "false");
            return rep.pass ? 0 : 1;
        }
        if (gt->parsed()) {
            const auto rep = exp_galerkin_tail(parse_config_file(config_path));
            std::fputs(rep.csv().c_str(), stdout);
            std::printf("PASS=%s\n", rep.pass ? "true" : "false");
            return rep.pass ? 0 : 1;
        }
        if (gb->parsed()) {
            const auto rep = exp_global_bound(parse_config_file(config_path));
            std::fputs(rep.csv().c_str(), stdout);
            std::printf("PASS=%s\n", rep.pass ? "true" : "false");
            return rep.pass ? 0 : 1;
        }
        // validate
        const ValidationResult res = run_validation_suite();
        std::fputs(res.summary().c_str(), stdout);
        return res.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
