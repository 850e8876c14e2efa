// Python bindings for the proxmm core. The module mirrors the C++ API with
// snake_case names and numpy-backed vectors/matrices; extended reals surface
// as ordinary floats with +inf outside the domain.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <sstream>
#include <tuple>
#include <vector>

#include "proxmm/ext_real.hpp"
#include "proxmm/inner_newton.hpp"
#include "proxmm/lagrangian.hpp"
#include "proxmm/operators.hpp"
#include "proxmm/outer.hpp"
#include "proxmm/problem.hpp"
#include "proxmm/problems.hpp"
#include "proxmm/prox.hpp"
#include "proxmm/runner.hpp"
#include "proxmm/types.hpp"

namespace py = pybind11;
using namespace proxmm;

namespace {

double ext_to_double(const ExtReal& v) {
  return v.value_or(std::numeric_limits<double>::infinity());
}

Matrix dense_jacobian(const JacobianElement& g) {
  const Index n = g.dim();
  Matrix m(n, n);
  Vector e = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    m.col(j) = g.apply(e);
    e[j] = 0.0;
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Proximal method of multipliers with a semismooth Newton inner solver";

  // ---------------------------------------------------------------- prox core
  py::class_<ProxSpec>(mod, "ProxSpec",
                       "Closed convex function with a closed-form proximal operator")
      .def_static("zero", &ProxSpec::zero)
      .def_static("l1", &ProxSpec::l1, py::arg("weight"))
      .def_static("group_l21", &ProxSpec::group_l21, py::arg("pairs"))
      .def_static("indicator_nonpositive", &ProxSpec::indicator_nonpositive)
      .def_static("affine_shifted", &ProxSpec::affine_shifted, py::arg("inner"),
                  py::arg("shift"))
      .def_static("scaled", &ProxSpec::scaled, py::arg("inner"), py::arg("a"),
                  py::arg("alpha"), py::arg("beta"), py::arg("b"))
      .def_static(
          "block_sum",
          [](std::vector<std::tuple<ProxSpec, Index, Index>> blocks) {
            return ProxSpec::block_sum(std::move(blocks));
          },
          py::arg("blocks"), "Blocks are (spec, start, len) over a disjoint cover of [0, dim)")
      .def("dim", &ProxSpec::dim)
      .def("accepts", &ProxSpec::accepts, py::arg("n"));

  py::class_<JacobianElement>(mod, "JacobianElement",
                              "Generalized Jacobian element of a prox map")
      .def("dim", &JacobianElement::dim)
      .def("apply", &JacobianElement::apply, py::arg("v"))
      .def("dense", &dense_jacobian, "Materialize as a dense matrix");

  mod.def(
      "phi_value",
      [](const ProxSpec& spec, const Vector& z) { return ext_to_double(phi_value(spec, z)); },
      py::arg("spec"), py::arg("z"), "phi(z); +inf outside the domain");
  mod.def("prox_eval", &prox_eval, py::arg("spec"), py::arg("z"), py::arg("c"),
          "prox_{phi/c}(z)");
  mod.def("envelope_eval", &envelope_eval, py::arg("spec"), py::arg("z"), py::arg("c"),
          "Moreau envelope phi_c(z)");
  mod.def("prox_jacobian", &prox_jacobian, py::arg("spec"), py::arg("z"), py::arg("c"));
  mod.def("conjugate_prox", &conjugate_prox, py::arg("spec"), py::arg("z"), py::arg("c"),
          "prox_{c phi*}(z) via the Moreau decomposition");

  // ---------------------------------------------------------------- operators
  py::class_<LinearOperator>(mod, "LinearOperator")
      .def_static("identity", &LinearOperator::identity, py::arg("n"))
      .def_static("dense", &LinearOperator::dense, py::arg("mat"))
      .def_static("grad2d_periodic", &LinearOperator::grad2d_periodic, py::arg("side"))
      .def_static("vstack", &LinearOperator::vstack, py::arg("parts"))
      .def("domain_dim", &LinearOperator::domain_dim)
      .def("codomain_dim", &LinearOperator::codomain_dim)
      .def("apply", &LinearOperator::apply, py::arg("x"))
      .def("adjoint_apply", &LinearOperator::adjoint_apply, py::arg("y"))
      .def("opnorm_sq_upper", &LinearOperator::opnorm_sq_upper, py::arg("iters") = 100);

  // ----------------------------------------------------------------- problems
  py::class_<SmoothSpec>(mod, "SmoothSpec")
      .def_static("zero", &SmoothSpec::zero, py::arg("n"))
      .def_static("quadratic", &SmoothSpec::quadratic, py::arg("a"), py::arg("b"),
                  "f(x) = 0.5 ||A x - b||^2")
      .def("dim", &SmoothSpec::dim)
      .def("value", &SmoothSpec::value, py::arg("x"))
      .def("gradient", &SmoothSpec::gradient, py::arg("x"))
      .def("hessian_apply", &SmoothSpec::hessian_apply, py::arg("x"), py::arg("d"))
      .def("grad_lipschitz_upper", &SmoothSpec::grad_lipschitz_upper)
      .def("is_strongly_convex", &SmoothSpec::is_strongly_convex);

  py::class_<Problem>(mod, "Problem", "Composite problem min f(x) + phi(E x)")
      .def(py::init<SmoothSpec, LinearOperator, ProxSpec>(), py::arg("f"), py::arg("e"),
           py::arg("phi"))
      .def_readonly("f", &Problem::f)
      .def_readonly("e", &Problem::e)
      .def_readonly("phi", &Problem::phi)
      .def("n", &Problem::n)
      .def("m", &Problem::m)
      .def(
          "objective",
          [](const Problem& p, const Vector& x) { return ext_to_double(objective_value(p, x)); },
          py::arg("x"), "f(x) + phi(E x); +inf outside the domain");

  py::class_<IterateState>(mod, "IterateState")
      .def(py::init([](Vector x, Vector lambda, double c) {
             return IterateState{std::move(x), std::move(lambda), c};
           }),
           py::arg("x"), py::arg("lambda"), py::arg("c"))
      .def_readwrite("x", &IterateState::x)
      .def_readwrite("lambda_", &IterateState::lambda)
      .def_readwrite("c", &IterateState::c);

  py::class_<KktResidual>(mod, "KktResidual")
      .def_readonly("stationarity", &KktResidual::stationarity)
      .def_readonly("feasibility", &KktResidual::feasibility)
      .def("max", &KktResidual::max);

  mod.def(
      "kkt_residual",
      [](const Problem& p, const Vector& x, const Vector& lambda, double c) {
        return kkt_residual(p, IterateState{x, lambda, c});
      },
      py::arg("problem"), py::arg("x"), py::arg("lambda"), py::arg("c"));
  mod.def(
      "aug_lagrangian_value",
      [](const Problem& p, const Vector& x, const Vector& lambda, double c) {
        return aug_lagrangian_value(p, IterateState{x, lambda, c});
      },
      py::arg("problem"), py::arg("x"), py::arg("lambda"), py::arg("c"));
  mod.def(
      "aug_lagrangian_grad_x",
      [](const Problem& p, const Vector& x, const Vector& lambda, double c) {
        return aug_lagrangian_grad_x(p, IterateState{x, lambda, c});
      },
      py::arg("problem"), py::arg("x"), py::arg("lambda"), py::arg("c"));

  mod.def("build_l1tv", &build_l1tv, py::arg("y"), py::arg("alpha"),
          "Denoising model alpha ||u - y||_1 + TV(u) as a composite problem");
  mod.def("build_lasso", &build_lasso, py::arg("a"), py::arg("b"), py::arg("alpha"),
          "Lasso 0.5 ||A x - b||^2 + alpha ||x||_1 with E = I");

  // ------------------------------------------------------------------- images
  py::class_<Image>(mod, "Image")
      .def(py::init([](Index side, Vector pixels) {
             Image img;
             img.side = side;
             img.pixels = std::move(pixels);
             img.validate();
             return img;
           }),
           py::arg("side"), py::arg("pixels"),
           "Square image, intensities in [0, 1], column-major pixel order")
      .def_readwrite("side", &Image::side)
      .def_readwrite("pixels", &Image::pixels)
      .def("validate", &Image::validate);

  mod.def("read_pgm", &read_pgm, py::arg("path"));
  mod.def("write_pgm", &write_pgm, py::arg("img"), py::arg("path"));
  mod.def("salt_pepper_noise", &salt_pepper_noise, py::arg("img"), py::arg("density"),
          py::arg("seed"));

  // ------------------------------------------------------------- inner solver
  py::class_<InnerConfig>(mod, "InnerConfig")
      .def(py::init<>())
      .def_readwrite("gamma", &InnerConfig::gamma)
      .def_readwrite("rho", &InnerConfig::rho)
      .def_readwrite("max_iters", &InnerConfig::max_iters)
      .def_readwrite("max_backtracks", &InnerConfig::max_backtracks)
      .def_readwrite("cg_rel_tol_cap", &InnerConfig::cg_rel_tol_cap)
      .def_readwrite("cg_max_iters", &InnerConfig::cg_max_iters);

  py::class_<InnerResult>(mod, "InnerResult")
      .def_readonly("xi", &InnerResult::xi)
      .def_readonly("grad_norm", &InnerResult::grad_norm)
      .def_readonly("iters", &InnerResult::iters)
      .def_readonly("residual_history", &InnerResult::residual_history)
      .def_readonly("psi_history", &InnerResult::psi_history)
      .def_readonly("step_sizes", &InnerResult::step_sizes)
      .def_readonly("converged", &InnerResult::converged)
      .def_readonly("stalled", &InnerResult::stalled);

  mod.def("newton_solve", &newton_solve, py::arg("problem"), py::arg("x_k"),
          py::arg("lambda_k"), py::arg("c"), py::arg("stop_tol"),
          py::arg("config") = InnerConfig{}, py::arg("xi0") = std::nullopt,
          "Semismooth Newton minimization of the proximally regularized subproblem");

  // ------------------------------------------------------------- outer solvers
  py::class_<CSchedule>(mod, "CSchedule")
      .def_static("constant", &CSchedule::constant, py::arg("c0"))
      .def_static("geometric", &CSchedule::geometric, py::arg("c0"), py::arg("factor"),
                  py::arg("cap"))
      .def("at", &CSchedule::at, py::arg("k"));

  py::class_<EpsSchedule>(mod, "EpsSchedule")
      .def(py::init([](double eps0, double kappa) { return EpsSchedule{eps0, kappa}; }),
           py::arg("eps0") = 1e-2, py::arg("kappa") = 0.5)
      .def_readwrite("eps0", &EpsSchedule::eps0)
      .def_readwrite("kappa", &EpsSchedule::kappa)
      .def("at", &EpsSchedule::at, py::arg("k"));

  py::class_<OuterConfig>(mod, "OuterConfig")
      .def(py::init<>())
      .def_readwrite("c_schedule", &OuterConfig::c_schedule)
      .def_readwrite("eps_schedule", &OuterConfig::eps_schedule)
      .def_readwrite("r", &OuterConfig::r)
      .def_readwrite("max_outer", &OuterConfig::max_outer)
      .def_readwrite("kkt_tol", &OuterConfig::kkt_tol)
      .def_readwrite("inner", &OuterConfig::inner)
      .def_readwrite("record_iterates", &OuterConfig::record_iterates);

  py::enum_<SolveStatus>(mod, "SolveStatus")
      .value("Converged", SolveStatus::Converged)
      .value("MaxIterations", SolveStatus::MaxIterations)
      .value("InnerStalled", SolveStatus::InnerStalled);

  py::class_<TraceRow>(mod, "TraceRow")
      .def_readonly("k", &TraceRow::k)
      .def_readonly("c", &TraceRow::c)
      .def_readonly("eps", &TraceRow::eps)
      .def_property_readonly(
          "objective", [](const TraceRow& r) { return ext_to_double(r.objective); })
      .def_readonly("kkt_stat", &TraceRow::kkt_stat)
      .def_readonly("kkt_feas", &TraceRow::kkt_feas)
      .def_readonly("inner_iters", &TraceRow::inner_iters)
      .def_readonly("inner_grad_norm", &TraceRow::inner_grad_norm)
      .def_readonly("wall_ms", &TraceRow::wall_ms)
      .def_readonly("step_norm", &TraceRow::step_norm)
      .def_readonly("inner_tol", &TraceRow::inner_tol)
      .def_readonly("inner_converged", &TraceRow::inner_converged)
      .def_readonly("ridge_active", &TraceRow::ridge_active);

  py::class_<ConvergenceTrace>(mod, "ConvergenceTrace")
      .def_readonly("rows", &ConvergenceTrace::rows)
      .def_readonly("status", &ConvergenceTrace::status)
      .def_readonly("x_history", &ConvergenceTrace::x_history)
      .def_readonly("lambda_history", &ConvergenceTrace::lambda_history);

  py::class_<SolveResult>(mod, "SolveResult")
      .def_readonly("state", &SolveResult::state)
      .def_readonly("trace", &SolveResult::trace);

  py::class_<AdmmResult>(mod, "AdmmResult")
      .def_readonly("state", &AdmmResult::state)
      .def_readonly("v", &AdmmResult::v)
      .def_readonly("trace", &AdmmResult::trace);

  mod.def("pmm_solve", &pmm_solve, py::arg("problem"), py::arg("config"), py::arg("x0"),
          py::arg("lambda0"), "Proximal method of multipliers");
  mod.def("alm_solve", &alm_solve, py::arg("problem"), py::arg("config"), py::arg("x0"),
          py::arg("lambda0"), "Classical method of multipliers");
  mod.def("admm_solve", &admm_solve, py::arg("problem"), py::arg("c"), py::arg("max_iters"),
          py::arg("tol"), py::arg("x0"), py::arg("v0"), py::arg("lambda0"));

  py::class_<FbnConfig>(mod, "FbnConfig")
      .def(py::init<>())
      .def_readwrite("tol", &FbnConfig::tol)
      .def_readwrite("max_iters", &FbnConfig::max_iters)
      .def_readwrite("gamma", &FbnConfig::gamma)
      .def_readwrite("rho", &FbnConfig::rho)
      .def_readwrite("max_backtracks", &FbnConfig::max_backtracks)
      .def_readwrite("delta", &FbnConfig::delta);

  py::class_<FbnResult>(mod, "FbnResult")
      .def_readonly("x", &FbnResult::x)
      .def_readonly("trace", &FbnResult::trace);

  mod.def("fb_newton_solve", &fb_newton_solve, py::arg("problem"), py::arg("c"),
          py::arg("config") = FbnConfig{}, py::arg("x0") = std::nullopt,
          "Forward-backward truncated-Newton baseline (requires E = I)");
  mod.def("fb_envelope_value", &fb_envelope_value, py::arg("problem"), py::arg("c"),
          py::arg("x"));

  // -------------------------------------------------------------------- runner
  py::class_<RunConfig>(mod, "RunConfig")
      .def(py::init<>())
      .def_readwrite("task", &RunConfig::task)
      .def_readwrite("solver", &RunConfig::solver)
      .def_readwrite("input", &RunConfig::input)
      .def_readwrite("output_prefix", &RunConfig::output_prefix)
      .def_readwrite("alpha", &RunConfig::alpha)
      .def_readwrite("c0", &RunConfig::c0)
      .def_readwrite("c_factor", &RunConfig::c_factor)
      .def_readwrite("c_cap", &RunConfig::c_cap)
      .def_readwrite("eps0", &RunConfig::eps0)
      .def_readwrite("kappa", &RunConfig::kappa)
      .def_readwrite("r", &RunConfig::r)
      .def_readwrite("kkt_tol", &RunConfig::kkt_tol)
      .def_readwrite("max_outer", &RunConfig::max_outer)
      .def_readwrite("max_inner", &RunConfig::max_inner)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("noise_density", &RunConfig::noise_density)
      .def_readwrite("lasso_a", &RunConfig::lasso_a)
      .def_readwrite("lasso_b", &RunConfig::lasso_b)
      .def_readwrite("has_a", &RunConfig::has_a)
      .def_readwrite("has_b", &RunConfig::has_b);

  mod.def("parse_run_config", &parse_run_config, py::arg("path"));
  mod.def("parse_run_config_text", &parse_run_config_text, py::arg("text"));
  mod.def(
      "run",
      [](const RunConfig& cfg) {
        std::ostringstream out, err;
        const int code = run(cfg, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("config"), "Execute a run; returns (exit_code, stdout, stderr)");
  mod.def(
      "run_config_file",
      [](const std::string& path) {
        std::ostringstream out, err;
        const int code = run_config_file(path, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("path"), "Parse and execute a config file; returns (exit_code, stdout, stderr)");
  mod.def("trace_csv", &trace_csv, py::arg("trace"));

  mod.attr("EXIT_SOLVED") = kExitSolved;
  mod.attr("EXIT_ERROR") = kExitError;
  mod.attr("EXIT_NOT_CONVERGED") = kExitNotConverged;

  mod.attr("__version__") = "0.1.0";
}
