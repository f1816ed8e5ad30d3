// Command-line front end: Delaunay profiles and meshes, degeneracy structure,
// Melnikov landscapes, the prescribed-mean-curvature solver, and the
// verification suite.
//
// Exit codes: 0 success, 1 domain/contract errors, 2 numerical failures,
// 64 usage errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <thread>

#include "delpmc/curvature_field.hpp"
#include "delpmc/degeneracy.hpp"
#include "delpmc/delaunay.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/jacobi_field.hpp"
#include "delpmc/melnikov.hpp"
#include "delpmc/pmc_solver.hpp"
#include "delpmc/verify.hpp"

using nlohmann::json;
using namespace delpmc;

namespace {

constexpr const char* kVersion = "0.1.0";

int worker_count() {
    if (const char* env = std::getenv("PMC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void write_provenance(const std::string& out_path, const std::string& subcommand,
                      const json& inputs) {
    if (out_path.empty()) return;
    json prov;
    prov["schema"] = "delpmc-provenance-1";
    prov["version"] = kVersion;
    prov["subcommand"] = subcommand;
    prov["inputs"] = inputs;
    prov["tolerances"] = {{"quadrature", 1e-13},
                          {"ode_local", 1e-12},
                          {"root_residual", 1e-11},
                          {"solver_default", 1e-8}};
    std::ofstream os(out_path + ".provenance.json");
    os << prov.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw NumericalError("cannot open output file " + path);
    os.precision(17);
    return os;
}

// --config file: top-level keys override unset flags (CLI11 JSON formatter)
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}";
    }
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        std::vector<CLI::ConfigItem> out;
        for (auto it = j.begin(); it != j.end(); ++it) {
            CLI::ConfigItem item;
            item.name = it.key();
            if (it.value().is_array())
                for (const auto& v : it.value())
                    item.inputs.push_back(v.is_string() ? v.get<std::string>()
                                                        : v.dump());
            else
                item.inputs.push_back(it.value().is_string()
                                          ? it.value().get<std::string>()
                                          : it.value().dump());
            out.push_back(std::move(item));
        }
        return out;
    }
};

struct RouletteArgs {
    double a = -0.5;
    double tmax = 6.283185307179586;
    int n = 200;
    std::string out = "roulette.csv";
};

int run_roulette(const RouletteArgs& args) {
    const auto param = make_param(args.a);
    auto os = open_out(args.out);
    os << "t,x,dx,z,dz,p_a\n";
    for (int i = 0; i <= args.n; ++i) {
        const double t = args.tmax * i / args.n;
        const auto r = roulette(param, t);
        os << r.t << ',' << r.x << ',' << r.dx << ',' << r.z << ',' << r.dz << ','
           << p_weight(param, t) << '\n';
    }
    write_provenance(args.out, "roulette",
                     {{"a", args.a}, {"tmax", args.tmax}, {"n", args.n}});
    std::cout << "wrote " << args.out << "\n";
    return 0;
}

struct MeshArgs {
    double a = -0.5;
    double T = 3.141592653589793;
    double p = 0.0, q = 0.0;
    int nt = 64, ntheta = 64;
    std::string out = "surface.obj";
};

int run_mesh(const MeshArgs& args) {
    const auto param = make_param(args.a);
    export_mesh(param, args.T, args.p, args.q, {}, args.out, args.nt, args.ntheta);
    write_provenance(args.out, "mesh",
                     {{"a", args.a},
                      {"T", args.T},
                      {"p", args.p},
                      {"q", args.q},
                      {"nt", args.nt},
                      {"ntheta", args.ntheta}});
    std::cout << "wrote " << args.out << "\n";
    return 0;
}

struct DegeneracyArgs {
    std::vector<double> a_list;
    double Tmax = 5.0;
    std::string out = "degeneracy.csv";
};

int run_degeneracy(const DegeneracyArgs& args) {
    std::vector<DegeneracyReport> reports(args.a_list.size());
    const int workers = std::min<int>(worker_count(), args.a_list.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= args.a_list.size()) return;
            reports[i] = degeneracy_report(make_param(args.a_list[i]), args.Tmax);
        }
    };
    std::vector<std::future<void>> pool;
    for (int w = 0; w < workers; ++w)
        pool.push_back(std::async(std::launch::async, work));
    for (auto& f : pool) f.get();

    auto os = open_out(args.out);
    os << "a,j,k,T,bracket_lo,bracket_hi,residual\n";
    for (const auto& rep : reports)
        for (const auto& e : rep.flattened())
            os << rep.a << ',' << e.j << ',' << e.k << ',' << e.T << ','
               << e.bracket_lo << ',' << e.bracket_hi << ',' << e.residual << '\n';
    write_provenance(args.out, "degeneracy",
                     {{"a", args.a_list}, {"Tmax", args.Tmax}});
    std::cout << "wrote " << args.out << "\n";
    return 0;
}

struct MelnikovArgs {
    double a = 0.3;
    std::optional<double> T;
    int T1_index = 0;
    std::string field = "1 + eps*(x^2+y^2)";
    double pmin = -1.0, pmax = 1.0, qmin = -1.0, qmax = 1.0;
    int n = 21;
    std::string out = "melnikov.csv";
    std::string crit_out;
};

int run_melnikov(const MelnikovArgs& args) {
    const auto param = make_param(args.a);
    const double T = args.T ? *args.T : (args.T1_index + 0.5) * param.tau;
    const auto field = CurvatureField::parse(args.field);
    const Melnikov M(param, T, field);

    auto os = open_out(args.out);
    os << "p,q,M,dMdp,dMdq\n";
    for (int i = 0; i < args.n; ++i)
        for (int k = 0; k < args.n; ++k) {
            const double p =
                args.pmin + (args.pmax - args.pmin) * i / std::max(1, args.n - 1);
            const double q =
                args.qmin + (args.qmax - args.qmin) * k / std::max(1, args.n - 1);
            const auto g = M.grad(p, q);
            os << p << ',' << q << ',' << M.value(p, q) << ',' << g[0] << ','
               << g[1] << '\n';
        }

    // critical points from a coarse seed grid
    std::vector<std::array<double, 2>> seeds;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            seeds.push_back({args.pmin + (args.pmax - args.pmin) * (i + 0.5) / 3.0,
                             args.qmin + (args.qmax - args.qmin) * (k + 0.5) / 3.0});
    const auto crits = M.find_critical_points(seeds);
    json cj = json::array();
    for (const auto& c : crits)
        cj.push_back({{"p", c.p},
                      {"q", c.q},
                      {"value", c.value},
                      {"grad", {c.grad[0], c.grad[1]}},
                      {"hessian",
                       {{c.hessian[0][0], c.hessian[0][1]},
                        {c.hessian[1][0], c.hessian[1][1]}}},
                      {"nondegenerate", c.nondegenerate},
                      {"gradient_floor", c.gradient_floor}});
    if (!args.crit_out.empty()) {
        auto co = open_out(args.crit_out);
        co << json({{"schema", "delpmc-critical-points-1"}, {"points", cj}}).dump(2)
           << '\n';
    } else {
        std::cout << cj.dump(2) << '\n';
    }
    write_provenance(args.out, "melnikov",
                     {{"a", args.a},
                      {"T", T},
                      {"field", args.field},
                      {"grid", {args.pmin, args.pmax, args.qmin, args.qmax, args.n}}});
    std::cout << "wrote " << args.out << " (" << crits.size()
              << " critical points)\n";
    return 0;
}

struct SolveArgs {
    double a = -0.5;
    std::optional<double> T;
    std::optional<int> T0_index;
    std::optional<int> T1_index;
    std::string field = "1 + eps*cos(z)";
    double eps = 1e-3;
    double p = 0.0, q = 0.0;
    std::string mode = "auto";
    int nt = 256, ntheta = 64;
    double tol = 1e-8;
    std::string out = "solution.json";
    std::string mesh_out;
};

int run_solve(const SolveArgs& args) {
    const auto param = make_param(args.a);
    double T;
    if (args.T)
        T = *args.T;
    else if (args.T0_index)
        T = find_T0(param, *args.T0_index);
    else if (args.T1_index)
        T = T1_set(param, (*args.T1_index + 1) * param.tau).at(*args.T1_index);
    else
        throw DomainError("solve: provide --T, --T0-index or --T1-index");

    const auto field = CurvatureField::parse(args.field);
    SolverOptions opts;
    opts.nt = args.nt;
    opts.ntheta = args.ntheta;
    opts.tol = args.tol;

    std::string mode = args.mode;
    if (mode == "auto") {
        const auto kb = kernel_basis(param, T);
        if (kb.dim == 0)
            mode = "nondegenerate";
        else if (kb.dim == 2 && kb.modes == std::vector<int>{1})
            mode = "lyapunov-schmidt";
        else
            mode = "nondegenerate"; // mode-0 degeneracy: let the refusal explain
    }

    PMCSolution sol;
    if (mode == "nondegenerate")
        sol = solve_nondegenerate(param, T, field, args.eps, args.p, args.q, opts);
    else if (mode == "axisym")
        sol = solve_axisymmetric(param, T, field, args.eps, opts);
    else if (mode == "lyapunov-schmidt")
        sol = solve_with_translation(param, T, field, args.eps, args.p, args.q, opts);
    else
        throw DomainError("solve: unknown mode " + mode);

    json out;
    out["schema"] = "delpmc-solution-1";
    out["a"] = args.a;
    out["T"] = T;
    out["mode"] = mode;
    out["eps_requested"] = sol.eps_requested;
    out["eps_reached"] = sol.eps;
    out["p"] = sol.p;
    out["q"] = sol.q;
    out["lambda"] = {sol.lambda1, sol.lambda2};
    out["residual_inf"] = sol.residual_inf;
    out["iterations"] = sol.iterations;
    out["converged"] = sol.converged;
    out["phi_sup"] = sol.phi.sup_norm();
    out["grid"] = {{"nt", sol.phi.spec().nt}, {"ntheta", sol.phi.spec().ntheta}};
    {
        auto os = open_out(args.out);
        os << out.dump(2) << '\n';
    }
    if (!args.mesh_out.empty()) {
        const GridSpec spec = sol.phi.spec();
        std::vector<double> phi(static_cast<size_t>(spec.nt + 1) * spec.ntheta);
        for (int i = 0; i <= spec.nt; ++i)
            for (int k = 0; k < spec.ntheta; ++k)
                phi[i * spec.ntheta + k] = sol.phi.at(i, k);
        export_mesh(param, T, sol.p, sol.q, phi, args.mesh_out, spec.nt,
                    spec.ntheta);
    }
    write_provenance(args.out, "solve",
                     {{"a", args.a},
                      {"T", T},
                      {"field", args.field},
                      {"eps", args.eps},
                      {"p", args.p},
                      {"q", args.q},
                      {"mode", mode},
                      {"nt", args.nt},
                      {"ntheta", args.ntheta},
                      {"tol", args.tol}});
    std::cout << "wrote " << args.out << " (residual " << sol.residual_inf << ", "
              << sol.iterations << " iterations)\n";
    return 0;
}

int run_verify(const std::string& out) {
    int failures = 0;
    auto results = run_acceptance_checks([&](const CheckResult& r) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " ["
                  << r.name << "]: " << r.detail << "\n";
        std::cout.flush();
        if (!r.pass) ++failures;
    });
    if (!out.empty()) {
        json j = json::array();
        for (const auto& r : results)
            j.push_back({{"id", r.id},
                         {"name", r.name},
                         {"pass", r.pass},
                         {"detail", r.detail},
                         {"seconds", r.seconds}});
        auto os = open_out(out);
        os << j.dump(2) << '\n';
        write_provenance(out, "verify", json::object());
    }
    std::cout << (failures == 0 ? "all criteria passed\n"
                                : std::to_string(failures) + " criteria FAILED\n");
    return failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Delaunay surfaces, their Jacobi-operator degeneracy structure, and the "
        "prescribed almost-constant mean-curvature Dirichlet problem on annular "
        "normal graphs. Elliptic parameters use m (the squared modulus)."};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file overriding flags");
    app.require_subcommand(1);

    RouletteArgs ra;
    auto* roul = app.add_subcommand("roulette", "sample the profile curve to CSV");
    roul->add_option("--a", ra.a, "Delaunay parameter in (-1,0)u(0,inf)")->required();
    roul->add_option("--tmax", ra.tmax, "sample t in [0, tmax]");
    roul->add_option("--n", ra.n, "number of intervals");
    roul->add_option("--out", ra.out, "output CSV (t,x,dx,z,dz,p_a)");

    MeshArgs ma;
    auto* mesh = app.add_subcommand("mesh", "export an OBJ mesh of the surface");
    mesh->add_option("--a", ma.a)->required();
    mesh->add_option("--T", ma.T, "half-length of the section")->required();
    mesh->add_option("--p", ma.p);
    mesh->add_option("--q", ma.q);
    mesh->add_option("--nt", ma.nt);
    mesh->add_option("--ntheta", ma.ntheta);
    mesh->add_option("--out", ma.out);

    DegeneracyArgs da;
    auto* deg = app.add_subcommand(
        "degeneracy", "degeneracy values per Fourier mode (CSV: a,j,k,T,"
                      "bracket_lo,bracket_hi,residual)");
    deg->add_option("--a", da.a_list, "one value or a sweep list")->required();
    deg->add_option("--Tmax", da.Tmax, "scan window (0, Tmax]");
    deg->add_option("--out", da.out);

    MelnikovArgs mla;
    auto* mel = app.add_subcommand(
        "melnikov", "translation-function landscape (CSV: p,q,M,dMdp,dMdq) and "
                    "critical points (JSON)");
    mel->add_option("--a", mla.a)->required();
    mel->add_option("--T", mla.T, "half-length (default: mode-1 degeneracy value)");
    mel->add_option("--T1-index", mla.T1_index, "k for T = (k+1/2) tau");
    mel->add_option("--field", mla.field, "H_eps over x,y,z,eps");
    mel->add_option("--pmin", mla.pmin);
    mel->add_option("--pmax", mla.pmax);
    mel->add_option("--qmin", mla.qmin);
    mel->add_option("--qmax", mla.qmax);
    mel->add_option("--n", mla.n, "grid points per axis");
    mel->add_option("--out", mla.out);
    mel->add_option("--crit-out", mla.crit_out, "critical points JSON path");

    SolveArgs sa;
    auto* sol = app.add_subcommand("solve", "prescribed mean-curvature solve");
    sol->add_option("--a", sa.a)->required();
    sol->add_option("--T", sa.T);
    sol->add_option("--T0-index", sa.T0_index, "target T_{a,k} (mode-0 value)");
    sol->add_option("--T1-index", sa.T1_index, "target (k+1/2) tau (mode-1 value)");
    sol->add_option("--field", sa.field)->required();
    sol->add_option("--eps", sa.eps);
    sol->add_option("--p", sa.p);
    sol->add_option("--q", sa.q);
    sol->add_option("--mode", sa.mode)
        ->check(CLI::IsMember({"auto", "nondegenerate", "axisym", "lyapunov-schmidt"}));
    sol->add_option("--nt", sa.nt);
    sol->add_option("--ntheta", sa.ntheta);
    sol->add_option("--tol", sa.tol);
    sol->add_option("--out", sa.out);
    sol->add_option("--mesh-out", sa.mesh_out, "OBJ mesh of the solved surface");

    std::string verify_out;
    auto* ver = app.add_subcommand(
        "verify", "run the verification suite (one pass/fail line per criterion)");
    ver->add_option("--out", verify_out, "JSON report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 64;
    }

    try {
        if (roul->parsed()) return run_roulette(ra);
        if (mesh->parsed()) return run_mesh(ma);
        if (deg->parsed()) return run_degeneracy(da);
        if (mel->parsed()) return run_melnikov(mla);
        if (sol->parsed()) return run_solve(sa);
        if (ver->parsed()) return run_verify(verify_out);
    } catch (const ObstructionError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const ContractError& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "field parse error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 64;
}
