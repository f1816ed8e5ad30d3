#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delpmc/curvature_field.hpp"
#include "delpmc/degeneracy.hpp"
#include "delpmc/delaunay.hpp"
#include "delpmc/elliptic.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/jacobi_field.hpp"
#include "delpmc/melnikov.hpp"
#include "delpmc/pmc_solver.hpp"
#include "delpmc/verify.hpp"

namespace py = pybind11;
using namespace delpmc;

namespace {

py::array_t<double> grid_to_array(const GridFunction& g) {
    const GridSpec& s = g.spec();
    py::array_t<double> out({s.nt + 1, s.ntheta});
    auto buf = out.mutable_unchecked<2>();
    for (int i = 0; i <= s.nt; ++i)
        for (int k = 0; k < s.ntheta; ++k) buf(i, k) = g.at(i, k);
    return out;
}

} // namespace

PYBIND11_MODULE(_delpmc, m) {
    m.doc() = "Delaunay surfaces, Jacobi-operator degeneracy structure, and the "
              "prescribed almost-constant mean-curvature solver";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<ObstructionError>(m, "ObstructionError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "FieldParseError", PyExc_ValueError);

    // ---- elliptic
    auto ell = m.def_submodule("elliptic", "Jacobi elliptic functions (parameter m)");
    ell.def("complete_integrals", [](double mm) {
        const auto r = elliptic::complete_integrals(mm);
        return py::make_tuple(r.K, r.E);
    }, py::arg("m"));
    ell.def("incomplete_F",
            [](double s, double mm) { return elliptic::incomplete_F({s, mm}); },
            py::arg("s"), py::arg("m"));
    ell.def("incomplete_E",
            [](double s, double mm) { return elliptic::incomplete_E({s, mm}); },
            py::arg("s"), py::arg("m"));
    ell.def("amplitude",
            [](double s, double mm) { return elliptic::amplitude({s, mm}); },
            py::arg("s"), py::arg("m"));
    ell.def("dn", [](double s, double mm) {
        const auto d = elliptic::dn({s, mm});
        return py::make_tuple(d.dn, d.ddn_ds);
    }, py::arg("s"), py::arg("m"));
    ell.def("dn_dm", [](double s, double mm) { return elliptic::dn_dm({s, mm}); },
            py::arg("s"), py::arg("m"));

    // ---- delaunay
    py::enum_<Branch>(m, "Branch")
        .value("Unduloid", Branch::Unduloid)
        .value("Cylinder", Branch::Cylinder)
        .value("Nodoid", Branch::Nodoid);

    py::class_<DelaunayParam>(m, "DelaunayParam")
        .def_readonly("a", &DelaunayParam::a)
        .def_readonly("gamma", &DelaunayParam::gamma)
        .def_readonly("m", &DelaunayParam::m)
        .def_readonly("tau", &DelaunayParam::tau)
        .def_readonly("scale", &DelaunayParam::scale)
        .def_readonly("branch", &DelaunayParam::branch)
        .def("__repr__", [](const DelaunayParam& p) {
            return "DelaunayParam(a=" + std::to_string(p.a) +
                   ", tau=" + std::to_string(p.tau) + ")";
        });
    m.def("make_param", &make_param, py::arg("a"));

    py::class_<RouletteEval>(m, "RouletteEval")
        .def_readonly("t", &RouletteEval::t)
        .def_readonly("x", &RouletteEval::x)
        .def_readonly("dx", &RouletteEval::dx)
        .def_readonly("z", &RouletteEval::z)
        .def_readonly("dz", &RouletteEval::dz);
    m.def("roulette", &roulette, py::arg("param"), py::arg("t"));
    m.def("roulette_ode_oracle", [](double a, std::vector<double> grid, double tol) {
        return roulette_ode_oracle(a, grid, tol);
    }, py::arg("a"), py::arg("t_grid"), py::arg("tol") = 1e-12);
    m.def("p_weight", &p_weight, py::arg("param"), py::arg("t"));
    m.def("roulette_da", [](const DelaunayParam& p, double t) {
        const auto d = roulette_da(p, t);
        return py::make_tuple(d.dx_da, d.dz_da);
    }, py::arg("param"), py::arg("t"));
    m.def("surface_point", [](const DelaunayParam& prm, double p, double q, double t,
                              double theta, double phi) {
        const auto s = surface_point(prm, p, q, t, theta, phi);
        return py::make_tuple(
            py::make_tuple(s.position.x, s.position.y, s.position.z),
            py::make_tuple(s.normal.x, s.normal.y, s.normal.z));
    }, py::arg("param"), py::arg("p"), py::arg("q"), py::arg("t"), py::arg("theta"),
       py::arg("phi") = 0.0);
    m.def("export_mesh", [](const DelaunayParam& prm, double T, double p, double q,
                            const std::string& path, int nt, int ntheta) {
        export_mesh(prm, T, p, q, {}, path, nt, ntheta);
    }, py::arg("param"), py::arg("T"), py::arg("p"), py::arg("q"), py::arg("path"),
       py::arg("nt") = 64, py::arg("ntheta") = 64);
    m.def("mean_curvature",
          [](const std::function<std::array<double, 3>(double, double)>& f, double t,
             double theta, double h) {
              PatchFn patch = [&f](double tt, double th) {
                  const auto v = f(tt, th);
                  return Vec3{v[0], v[1], v[2]};
              };
              return mean_curvature(patch, t, theta, h);
          },
          py::arg("patch"), py::arg("t"), py::arg("theta"), py::arg("h") = 1e-4);

    // ---- jacobi_field
    m.def("fundamental_pair", [](const DelaunayParam& p, int j, double t) {
        const auto r = fundamental_pair(p, j, t);
        return py::make_tuple(r.w, r.v);
    }, py::arg("param"), py::arg("j"), py::arg("t"));
    m.def("w0_closed", &w0_closed, py::arg("param"), py::arg("t"));

    py::enum_<FloquetClass>(m, "FloquetClass")
        .value("Hyperbolic", FloquetClass::Hyperbolic)
        .value("Parabolic", FloquetClass::Parabolic)
        .value("Elliptic", FloquetClass::Elliptic);
    py::class_<MonodromyReport>(m, "MonodromyReport")
        .def_readonly("j", &MonodromyReport::j)
        .def_readonly("trace", &MonodromyReport::trace)
        .def_readonly("det", &MonodromyReport::det)
        .def_readonly("classification", &MonodromyReport::classification)
        .def_readonly("exponent", &MonodromyReport::exponent)
        .def_property_readonly("matrix", [](const MonodromyReport& r) {
            return py::make_tuple(py::make_tuple(r.matrix[0][0], r.matrix[0][1]),
                                  py::make_tuple(r.matrix[1][0], r.matrix[1][1]));
        });
    m.def("monodromy", &monodromy, py::arg("param"), py::arg("j"));
    m.def("zero_gap_bound", &zero_gap_bound, py::arg("param"), py::arg("j"));

    // ---- degeneracy
    m.def("find_T0", &find_T0, py::arg("param"), py::arg("k"));
    m.def("T1_set", &T1_set, py::arg("param"), py::arg("T_max"));
    py::class_<ZeroScan>(m, "ZeroScan")
        .def_readonly("zeros", &ZeroScan::zeros)
        .def_readonly("certificate", &ZeroScan::certificate)
        .def_readonly("window", &ZeroScan::window);
    m.def("scan_zeros", &scan_zeros, py::arg("param"), py::arg("j"), py::arg("T_max"));
    py::class_<KernelBasis>(m, "KernelBasis")
        .def_readonly("dim", &KernelBasis::dim)
        .def_readonly("labels", &KernelBasis::labels)
        .def_readonly("modes", &KernelBasis::modes);
    m.def("kernel_basis", &kernel_basis, py::arg("param"), py::arg("T"),
          py::arg("tol") = -1.0);
    m.def("boundary_jacobian", &boundary_jacobian, py::arg("param"), py::arg("T"));

    // ---- curvature field
    py::class_<CurvatureField>(m, "CurvatureField")
        .def_static("parse", &CurvatureField::parse, py::arg("expr"))
        .def("eval", &CurvatureField::eval, py::arg("eps"), py::arg("x"),
             py::arg("y"), py::arg("z"))
        .def_property_readonly("perturbative", &CurvatureField::perturbative)
        .def_property_readonly("even_in_z", &CurvatureField::even_in_z)
        .def_property_readonly("source", &CurvatureField::source)
        .def("htilde", &CurvatureField::htilde, py::arg("x"), py::arg("y"),
             py::arg("z"))
        .def("Q", [](const CurvatureField& f, double x, double y, double z) {
            const auto q = f.eval_Q(x, y, z);
            return py::make_tuple(q.x, q.y, q.z);
        }, py::arg("x"), py::arg("y"), py::arg("z"));

    // ---- melnikov
    py::class_<MelnikovEval>(m, "MelnikovEval")
        .def_readonly("p", &MelnikovEval::p)
        .def_readonly("q", &MelnikovEval::q)
        .def_readonly("value", &MelnikovEval::value)
        .def_readonly("grad", &MelnikovEval::grad)
        .def_readonly("nondegenerate", &MelnikovEval::nondegenerate)
        .def_readonly("gradient_floor", &MelnikovEval::gradient_floor)
        .def_property_readonly("hessian", [](const MelnikovEval& e) {
            return py::make_tuple(py::make_tuple(e.hessian[0][0], e.hessian[0][1]),
                                  py::make_tuple(e.hessian[1][0], e.hessian[1][1]));
        });
    py::class_<Melnikov>(m, "Melnikov")
        .def(py::init<const DelaunayParam&, double, const CurvatureField&>(),
             py::arg("param"), py::arg("T"), py::arg("field"))
        .def("value", &Melnikov::value, py::arg("p"), py::arg("q"))
        .def("grad", &Melnikov::grad, py::arg("p"), py::arg("q"))
        .def("eval", &Melnikov::eval, py::arg("p"), py::arg("q"))
        .def("find_critical_points",
             [](const Melnikov& M, std::vector<std::array<double, 2>> seeds,
                int max_iter) { return M.find_critical_points(seeds, max_iter); },
             py::arg("seeds"), py::arg("max_iter") = 40);

    // ---- solver
    py::class_<SolverOptions>(m, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("nt", &SolverOptions::nt)
        .def_readwrite("ntheta", &SolverOptions::ntheta)
        .def_readwrite("tol", &SolverOptions::tol)
        .def_readwrite("max_iter", &SolverOptions::max_iter)
        .def_readwrite("fd_step", &SolverOptions::fd_step);

    py::class_<PMCSolution>(m, "PMCSolution")
        .def_readonly("T", &PMCSolution::T)
        .def_readonly("eps", &PMCSolution::eps)
        .def_readonly("eps_requested", &PMCSolution::eps_requested)
        .def_readonly("p", &PMCSolution::p)
        .def_readonly("q", &PMCSolution::q)
        .def_readonly("lambda1", &PMCSolution::lambda1)
        .def_readonly("lambda2", &PMCSolution::lambda2)
        .def_readonly("residual_inf", &PMCSolution::residual_inf)
        .def_readonly("iterations", &PMCSolution::iterations)
        .def_readonly("converged", &PMCSolution::converged)
        .def_property_readonly("phi",
                               [](const PMCSolution& s) { return grid_to_array(s.phi); });

    m.def("solve_nondegenerate", &solve_nondegenerate, py::arg("param"), py::arg("T"),
          py::arg("field"), py::arg("eps"), py::arg("p") = 0.0, py::arg("q") = 0.0,
          py::arg("options") = SolverOptions{});
    m.def("solve_axisymmetric", &solve_axisymmetric, py::arg("param"), py::arg("T"),
          py::arg("field"), py::arg("eps"), py::arg("options") = SolverOptions{});
    m.def("solve_lyapunov_schmidt", &solve_lyapunov_schmidt, py::arg("param"),
          py::arg("T"), py::arg("field"), py::arg("eps"), py::arg("p") = 0.0,
          py::arg("q") = 0.0, py::arg("options") = SolverOptions{});
    m.def("solve_with_translation", &solve_with_translation, py::arg("param"),
          py::arg("T"), py::arg("field"), py::arg("eps"), py::arg("p0"),
          py::arg("q0"), py::arg("options") = SolverOptions{});
    m.def("obstruction_integral", &obstruction_integral, py::arg("param"),
          py::arg("k"), py::arg("field"), py::arg("p0") = 0.0, py::arg("q0") = 0.0);
    m.def("multiplier_normalization", &multiplier_normalization, py::arg("param"),
          py::arg("T"));
    m.def("limit_profile_root", &limit_profile_root);
    m.def("inverse_norm_probe",
          [](std::vector<double> a_list, double T, const std::function<double(double)>& g) {
              const auto out = inverse_norm_probe(a_list, T, g);
              py::list res;
              for (const auto& e : out)
                  res.append(py::make_tuple(e.a, e.norm, e.inconclusive));
              return res;
          },
          py::arg("a_list"), py::arg("T"), py::arg("g"));

    // ---- verification
    m.def("run_acceptance_checks", []() {
        py::list out;
        for (const auto& r : run_acceptance_checks())
            out.append(py::dict(py::arg("id") = r.id, py::arg("name") = r.name,
                                py::arg("pass") = r.pass, py::arg("detail") = r.detail,
                                py::arg("seconds") = r.seconds));
        return out;
    });

    m.attr("__version__") = "0.1.0";
}
