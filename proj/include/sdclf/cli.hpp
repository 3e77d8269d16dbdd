#pragma once

// Command implementations behind the CLI binary. Kept header-level and
// stream-parameterized so the test suite can drive them directly.
//
// Exit codes: 0 success, 2 parse/config error, 3 controller failure,
// 4 numerical failure.

#include "sdclf/benchmarks.hpp"
#include "sdclf/closed_loop.hpp"
#include "sdclf/parse.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sdclf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitController = 3;
inline constexpr int kExitNumerical = 4;

struct ResolvedSystem {
    System system;
    Polynomial theta;
};

/// `ref` is a registry name (case1, case2i, case3, case4, case5) or a path to
/// a system definition file. theta defaults to the registry value or zero.
inline ResolvedSystem resolve_system(const std::string& ref) {
    const auto& names = bench_names();
    if (std::find(names.begin(), names.end(), ref) != names.end()) {
        BenchEntry e = make_bench(ref);
        return {std::move(e.system), std::move(e.theta)};
    }
    std::ifstream in(ref);
    if (!in)
        throw std::invalid_argument("system '" + ref +
                                    "' is neither a registry name nor a readable file");
    std::stringstream buf;
    buf << in.rdbuf();
    ParsedSystem parsed = parse_system_spec(buf.str());
    Polynomial theta = parsed.theta.value_or(Polynomial(parsed.system.dim()));
    return {std::move(parsed.system), std::move(theta)};
}

inline Vec parse_point(const std::string& text, int dim) {
    Vec out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad coordinate '" + cell + "' in point '" + text + "'");
        }
    }
    if (static_cast<int>(out.size()) != dim)
        throw std::invalid_argument("point '" + text + "' has " + std::to_string(out.size()) +
                                    " coordinates, system dimension is " + std::to_string(dim));
    return out;
}

/// Write-temp-then-rename; output files appear atomically.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot write to '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, target);
}

inline void deliver(const std::string& content, const std::string& out_path, std::ostream& os) {
    if (out_path.empty()) os << content;
    else write_file_atomic(out_path, content);
}

struct ClassifyOptions {
    std::string system;
    std::vector<std::string> points;
    double zero_tol = 1e-9;
    double strict_tol = 1e-9;
    int n_max = 6;
    std::string out;
};

inline int cmd_classify(const ClassifyOptions& opt, std::ostream& os, std::ostream& err) {
    try {
        ResolvedSystem rs = resolve_system(opt.system);
        SystemCalculus calc(rs.system);
        Tolerances tol{opt.zero_tol, opt.strict_tol};
        std::string body;
        for (const std::string& p : opt.points) {
            Vec x = parse_point(p, rs.system.dim());
            body += classify_point(calc, x, tol, opt.n_max).to_record();
        }
        deliver(body, opt.out, os);
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

struct SynthesizeOptions {
    std::string system;
    std::vector<std::string> points;
    double sigma = 0.5;
    double u_max = 0x1p20;
    double zero_tol = 1e-9;
    double strict_tol = 1e-9;
    int n_max = 6;
    std::string out;
};

inline int cmd_synthesize(const SynthesizeOptions& opt, std::ostream& os, std::ostream& err) {
    try {
        ResolvedSystem rs = resolve_system(opt.system);
        SystemCalculus calc(rs.system);
        Tolerances tol{opt.zero_tol, opt.strict_tol};
        SearchPolicy pol;
        pol.u_max = opt.u_max;
        std::string body;
        for (const std::string& p : opt.points) {
            Vec x = parse_point(p, rs.system.dim());
            Certificate cert = classify_point(calc, x, tol, opt.n_max);
            body += cert.to_record();
            switch (cert.branch) {
                case Branch::GvNonzero:
                case Branch::DriftNegative: {
                    double u = sontag_feedback(calc, rs.theta, x, tol);
                    body += select_epsilon(calc, x, u, opt.sigma).to_record();
                    break;
                }
                case Branch::Unclassified:
                    throw ControllerFailure("state " + p + " is Unclassified up to n_max=" +
                                            std::to_string(opt.n_max));
                default: {
                    BracketPair pair = synthesize_pair(calc, x, cert, pol, tol);
                    body += select_epsilon(calc, x, pair, opt.sigma).to_record();
                }
            }
        }
        deliver(body, opt.out, os);
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BlowUp& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NoDecrease& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitController;
    }
}

struct SimulateOptions {
    std::string system;
    std::string x0;
    double dt = 0.1;
    double horizon = 10.0;
    double zero_tol = 1e-6;
    double strict_tol = 1e-6;  // keep >= zero_tol, see RunConfig
    int n_max = 6;
    std::string out;     // trajectory CSV
    std::string report;  // run report record
};

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& os, std::ostream& err) {
    try {
        ResolvedSystem rs = resolve_system(opt.system);
        Vec x0 = parse_point(opt.x0, rs.system.dim());
        RunConfig cfg;
        cfg.tol = Tolerances{opt.zero_tol, opt.strict_tol};
        cfg.n_max = opt.n_max;
        auto [traj, rep] = run_closed_loop(rs.system, rs.theta, Partition::uniform(opt.dt, opt.horizon),
                                           x0, cfg);
        std::ostringstream csv;
        write_trajectory_csv(traj, rs.system, csv);
        if (!opt.out.empty()) write_file_atomic(opt.out, csv.str());
        deliver(rep.to_record(), opt.report, os);
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ControllerFailure& e) {
        err << "error: " << e.what() << "\n";
        return kExitController;
    } catch (const SearchExhausted& e) {
        err << "error: " << e.what() << "\n";
        return kExitController;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

struct VerifyOptions {
    std::string system;
    std::string traj;
    double dt = 0.1;
    std::string out;
};

/// Re-check a trajectory CSV: rows at multiples of dt are the samples.
inline int cmd_verify(const VerifyOptions& opt, std::ostream& os, std::ostream& err) {
    try {
        ResolvedSystem rs = resolve_system(opt.system);
        std::ifstream in(opt.traj);
        if (!in) throw std::invalid_argument("cannot open trajectory '" + opt.traj + "'");
        Trajectory traj = read_trajectory_csv(in, rs.system.dim());
        for (const auto& p : traj.dense) {
            double k = p.t / opt.dt;
            if (std::abs(k - std::round(k)) < 1e-9) traj.samples.push_back(p);
        }
        if (traj.samples.size() < 2)
            throw std::invalid_argument("trajectory has fewer than two sample rows at dt=" +
                                        detail::format_double(opt.dt));
        deliver(verify_report(traj, rs.system).to_record(), opt.out, os);
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

struct ReportOptions {
    std::string system;
    std::string traj;
    double dt = 0.1;
    std::string out;   // summary text
    std::string plot;  // two-column t V file
};

inline int cmd_report(const ReportOptions& opt, std::ostream& os, std::ostream& err) {
    try {
        ResolvedSystem rs = resolve_system(opt.system);
        std::ifstream in(opt.traj);
        if (!in) throw std::invalid_argument("missing trajectory artifact '" + opt.traj + "'");
        Trajectory traj = read_trajectory_csv(in, rs.system.dim());
        for (const auto& p : traj.dense) {
            double k = p.t / opt.dt;
            if (std::abs(k - std::round(k)) < 1e-9) traj.samples.push_back(p);
        }
        if (traj.samples.size() < 2)
            throw std::invalid_argument("trajectory '" + opt.traj + "' has no sample rows");
        RunReport rep = verify_report(traj, rs.system);

        std::ostringstream sum;
        sum << "decrease: " << (rep.decrease_ok ? "OK" : "FAIL") << " (";
        if (rep.decrease_ok) sum << rep.intervals << "/" << rep.intervals << " intervals)\n";
        else sum << "first violation at interval " << rep.first_decrease_violation << ")\n";
        sum << "intersample: " << (rep.intersample_ok ? "OK" : "FAIL") << " (";
        if (rep.intersample_ok) sum << rep.intervals << "/" << rep.intervals << " intervals)\n";
        else sum << "first violation at interval " << rep.first_intersample_violation << ")\n";
        sum << "sup|u| = " << detail::format_double(rep.sup_control) << "\n";
        sum << "final |x| = " << detail::format_double(rep.final_norm) << "\n";
        deliver(sum.str(), opt.out, os);

        if (!opt.plot.empty()) {
            std::ostringstream plot;
            for (const auto& p : traj.dense)
                plot << detail::format_double(p.t) << " "
                     << detail::format_double(rs.system.V().eval(p.x)) << "\n";
            write_file_atomic(opt.plot, plot.str());
        }
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace sdclf::cli
