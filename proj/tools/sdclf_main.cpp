// Command-line front end: classify / synthesize / simulate / verify / report.

#include "sdclf/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace sdclf::cli;

    CLI::App app{"Sampled-data stabilization toolkit for single-input affine polynomial systems"};
    app.require_subcommand(1);

    ClassifyOptions cl;
    auto* classify = app.add_subcommand("classify", "Classify states against the decrease hypotheses");
    classify->add_option("--system", cl.system, "registry name or system file")->required();
    classify->add_option("--point", cl.points, "state, comma-separated")->required();
    classify->add_option("--nmax", cl.n_max, "largest derivative depth to scan");
    classify->add_option("--zero-tol", cl.zero_tol, "relative zero threshold");
    classify->add_option("--strict-tol", cl.strict_tol, "relative strict-sign threshold");
    classify->add_option("--out", cl.out, "write records to this file");

    SynthesizeOptions sy;
    auto* synth = app.add_subcommand("synthesize", "Construct a per-state controller");
    synth->add_option("--system", sy.system)->required();
    synth->add_option("--point", sy.points)->required();
    synth->add_option("--sigma", sy.sigma, "largest admissible schedule duration");
    synth->add_option("--umax", sy.u_max, "cap on |u1| in the schedule search");
    synth->add_option("--nmax", sy.n_max);
    synth->add_option("--zero-tol", sy.zero_tol);
    synth->add_option("--strict-tol", sy.strict_tol);
    synth->add_option("--out", sy.out);

    SimulateOptions si;
    auto* sim = app.add_subcommand("simulate", "Run the sampled-data closed loop");
    sim->add_option("--system", si.system)->required();
    sim->add_option("--x0", si.x0, "initial state")->required();
    sim->add_option("--dt", si.dt, "uniform sampling period");
    sim->add_option("--horizon", si.horizon, "final time");
    sim->add_option("--nmax", si.n_max);
    sim->add_option("--zero-tol", si.zero_tol);
    sim->add_option("--strict-tol", si.strict_tol);
    sim->add_option("--out", si.out, "trajectory CSV path");
    sim->add_option("--report", si.report, "run-report record path");

    VerifyOptions ve;
    auto* verify = app.add_subcommand("verify", "Re-check a recorded trajectory");
    verify->add_option("--system", ve.system)->required();
    verify->add_option("--traj", ve.traj, "trajectory CSV")->required();
    verify->add_option("--dt", ve.dt, "sampling period used for the run");
    verify->add_option("--out", ve.out);

    ReportOptions re;
    auto* report = app.add_subcommand("report", "Summarize a recorded trajectory");
    report->add_option("--system", re.system)->required();
    report->add_option("--traj", re.traj)->required();
    report->add_option("--dt", re.dt);
    report->add_option("--out", re.out);
    report->add_option("--plot", re.plot, "two-column t V file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (classify->parsed()) return cmd_classify(cl, std::cout, std::cerr);
    if (synth->parsed()) return cmd_synthesize(sy, std::cout, std::cerr);
    if (sim->parsed()) return cmd_simulate(si, std::cout, std::cerr);
    if (verify->parsed()) return cmd_verify(ve, std::cout, std::cerr);
    if (report->parsed()) return cmd_report(re, std::cout, std::cerr);
    return kExitConfig;
}
