#include "tsdelay/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "tsdelay/config.hpp"
#include "tsdelay/solver.hpp"
#include "tsdelay/variation_of_parameters.hpp"

namespace tsdelay {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Table destination: the -o file when given, stdout otherwise. Files open in
/// binary mode so line endings stay LF everywhere.
struct OutputTarget {
    std::ofstream file;
    std::ostream* os = &std::cout;

    bool open(const std::string& path) {
        if (path.empty()) return true;
        file.open(path, std::ios::binary);
        if (!file) return false;
        os = &file;
        return true;
    }
};

void write_solution(std::ostream& os, const Solution& sol, int d) {
    os << "t";
    for (int r = 1; r <= d; ++r) os << ",x" << r;
    os << "\n";
    for (std::size_t k = 0; k < sol.values.size(); ++k) {
        os << fmt17(sol.values.points()[k]);
        for (double x : sol.values.at_index(k)) os << "," << fmt17(x);
        os << "\n";
    }
}

void write_principal(std::ostream& os, const PrincipalSolution& ps) {
    const int d = ps.dim;
    os << "t";
    for (int r = 1; r <= d; ++r)
        for (int c = 1; c <= d; ++c) os << ",m" << r << c;
    os << "\n";
    for (std::size_t k = 0; k < ps.values.size(); ++k) {
        os << fmt17(ps.values.points()[k]);
        for (double x : ps.values.at_index(k)) os << "," << fmt17(x);
        os << "\n";
    }
}

int load_spec(const std::string& path, std::optional<ProblemSpec>& spec) {
    try {
        spec = load_config_file(path);
        return 0;
    } catch (const TsError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

int require_linear(const ProblemSpec& spec, const char* what) {
    if (spec.kind == ProblemKind::Linear) return 0;
    std::cerr << "ValidationError: " << what << " applies to linear problems only\n";
    return 1;
}

int cmd_solve(const std::string& path, const std::string& out_path) {
    std::optional<ProblemSpec> spec;
    if (int rc = load_spec(path, spec)) return rc;
    if (spec->kind == ProblemKind::Nonlinear && !spec->envelope &&
        !spec->timescale().purely_isolated(spec->beta(), spec->gamma())) {
        std::cerr << "ValidationError: nonlinear problems need an [envelope] section unless "
                     "[beta, gamma) is purely isolated\n";
        return 1;
    }
    OutputTarget target;
    if (!target.open(out_path)) {
        std::cerr << "cannot open output file '" << out_path << "'\n";
        return 1;
    }
    try {
        const Solution sol =
            spec->kind == ProblemKind::Linear
                ? solve_global(*spec->linear, spec->solver.tol, spec->solver.max_iter)
                : (spec->envelope ? solve_global_nonlinear(*spec->nonlinear, *spec->envelope,
                                                           spec->solver.tol, spec->solver.max_iter)
                                  : solve_stepwise_isolated(*spec->nonlinear));
        write_solution(*target.os, sol, spec->dim());
        return 0;
    } catch (const TsError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_principal(const std::string& path, double zeta, const std::string& out_path) {
    std::optional<ProblemSpec> spec;
    if (int rc = load_spec(path, spec)) return rc;
    if (int rc = require_linear(*spec, "principal")) return rc;
    if (zeta < spec->beta() - kLookupTol || zeta > spec->gamma() + kLookupTol ||
        !spec->timescale().is_sample(zeta)) {
        std::cerr << "ValidationError: --zeta must name a grid point of [beta, gamma]\n";
        return 1;
    }
    OutputTarget target;
    if (!target.open(out_path)) {
        std::cerr << "cannot open output file '" << out_path << "'\n";
        return 1;
    }
    try {
        write_principal(*target.os, principal_solution(*spec->linear, zeta, spec->solver.tol));
        return 0;
    } catch (const TsError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_represent(const std::string& path, const std::string& out_path) {
    std::optional<ProblemSpec> spec;
    if (int rc = load_spec(path, spec)) return rc;
    if (int rc = require_linear(*spec, "represent")) return rc;
    OutputTarget target;
    if (!target.open(out_path)) {
        std::cerr << "cannot open output file '" << out_path << "'\n";
        return 1;
    }
    try {
        const LinearDelaySystem& sys = *spec->linear;
        PrincipalCache cache(sys, spec->solver.tol);
        std::ostream& os = *target.os;
        os << "t";
        for (int r = 1; r <= sys.dim; ++r) os << ",x" << r;
        os << "\n";
        for (double t : sys.ts.grid(sys.beta, sys.gamma)) {
            os << fmt17(t);
            for (double x : vop_evaluate(sys, cache, t)) os << "," << fmt17(x);
            os << "\n";
        }
        return 0;
    } catch (const TsError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_verify(const std::string& path, std::optional<double> tol_override) {
    std::optional<ProblemSpec> spec;
    if (int rc = load_spec(path, spec)) return rc;
    if (int rc = require_linear(*spec, "verify")) return rc;
    const double tol = tol_override.value_or(spec->solver.verify_tol);
    try {
        const RepresentationReport rep =
            verify_representation(*spec->linear, tol, spec->solver.tol);
        std::cout << "sup difference = " << fmt17(rep.sup_diff) << " at t = "
                  << fmt17(rep.argmax_t) << "\n"
                  << "tolerance      = " << fmt17(rep.tol) << "\n"
                  << "status         = " << (rep.pass ? "pass" : "fail") << "\n";
        return rep.pass ? 0 : 3;
    } catch (const TsError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_gridinfo(const std::string& path, const std::string& out_path) {
    std::optional<ProblemSpec> spec;
    if (int rc = load_spec(path, spec)) return rc;
    OutputTarget target;
    if (!target.open(out_path)) {
        std::cerr << "cannot open output file '" << out_path << "'\n";
        return 1;
    }
    const TimeScale& ts = spec->timescale();
    std::ostream& os = *target.os;
    os << "t,sigma,rho,mu,left,right\n";
    for (double t : ts.sample_points()) {
        const PointClass pc = ts.classify(t);
        os << fmt17(t) << "," << fmt17(ts.sigma(t)) << "," << fmt17(ts.rho(t)) << ","
           << fmt17(ts.mu(t)) << "," << side_class_name(pc.left) << ","
           << side_class_name(pc.right) << "\n";
    }
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"Delay dynamic equations on time scales: solve, represent, verify"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path;
    double zeta = 0.0;
    double verify_tol = 0.0;

    CLI::App* solve = app.add_subcommand("solve", "solve the problem, write a t,x CSV table");
    solve->add_option("spec", spec_path, "problem config file")->required();
    solve->add_option("-o,--output", out_path, "write the table here instead of stdout");

    CLI::App* principal =
        app.add_subcommand("principal", "principal matrix solution sourced at --zeta");
    principal->add_option("spec", spec_path, "problem config file")->required();
    CLI::Option* zeta_opt =
        principal->add_option("-z,--zeta", zeta, "source grid point")->required();
    principal->add_option("-o,--output", out_path, "write the table here instead of stdout");

    CLI::App* represent =
        app.add_subcommand("represent", "evaluate the representation formula on [beta, gamma]");
    represent->add_option("spec", spec_path, "problem config file")->required();
    represent->add_option("-o,--output", out_path, "write the table here instead of stdout");

    CLI::App* verify =
        app.add_subcommand("verify", "compare the representation formula against the solver");
    verify->add_option("spec", spec_path, "problem config file")->required();
    CLI::Option* tol_opt =
        verify->add_option("--tol", verify_tol, "override the verification tolerance");

    CLI::App* gridinfo = app.add_subcommand("gridinfo", "per-point jump diagnostics of the scale");
    gridinfo->add_option("spec", spec_path, "problem config file")->required();
    gridinfo->add_option("-o,--output", out_path, "write the table here instead of stdout");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("tsdelay");
    for (const std::string& a : args) argv_storage.push_back(a);
    std::vector<char*> argv;
    for (std::string& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (solve->parsed()) return cmd_solve(spec_path, out_path);
    if (principal->parsed()) {
        (void)zeta_opt;
        return cmd_principal(spec_path, zeta, out_path);
    }
    if (represent->parsed()) return cmd_represent(spec_path, out_path);
    if (verify->parsed())
        return cmd_verify(spec_path, tol_opt->count() > 0 ? std::optional<double>(verify_tol)
                                                          : std::nullopt);
    if (gridinfo->parsed()) return cmd_gridinfo(spec_path, out_path);
    return 1;
}

} // namespace tsdelay
