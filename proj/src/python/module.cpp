#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ncconv/cli.hpp"
#include "ncconv/expr.hpp"
#include "ncconv/json_io.hpp"
#include "ncconv/verify.hpp"

namespace py = pybind11;
using namespace ncconv;

namespace {

Domain domain_from_string(const std::string& name) {
  if (name == "real") return Domain::RealLine;
  if (name == "positive") return Domain::PositiveHalfLine;
  if (name == "circle") return Domain::UnitCircle;
  throw DomainError("unknown domain '" + name + "'");
}

AtomicMeasure make_atomic_py(const std::string& domain,
                             const std::vector<std::pair<double, double>>& atoms) {
  std::vector<Atom> converted;
  converted.reserve(atoms.size());
  for (const auto& [x, w] : atoms) converted.push_back({x, w});
  return make_atomic(domain_from_string(domain), converted);
}

py::object result_value(const ConvolutionResult& result) {
  if (result.is_atomic()) return py::cast(result.atoms());
  if (result.is_undefined()) return py::cast(result.undefined().witness);
  return py::cast(result.handle());
}

struct PyConvolutionResult {
  ConvolutionResult inner;
};

}  // namespace

PYBIND11_MODULE(_ncconv, m) {
  m.doc() = "free, monotone and boolean convolutions of probability measures";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<WeightSumError>(m, "WeightSumError", PyExc_ValueError);
  py::register_exception<PoleError>(m, "PoleError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NoSolutionError>(m, "NoSolutionError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ExprParseError", PyExc_ValueError);

  py::class_<Atom>(m, "Atom")
      .def_readonly("position", &Atom::position)
      .def_readonly("weight", &Atom::weight)
      .def("__repr__", [](const Atom& a) {
        std::ostringstream oss;
        oss.precision(17);
        oss << "Atom(" << a.position << ", " << a.weight << ")";
        return oss.str();
      });

  py::class_<AtomicMeasure>(m, "AtomicMeasure")
      .def_property_readonly("domain",
                             [](const AtomicMeasure& mu) {
                               return std::string(domain_name(mu.domain()));
                             })
      .def_property_readonly(
          "atoms", [](const AtomicMeasure& mu) { return mu.atoms(); })
      .def("is_dirac", &AtomicMeasure::is_dirac)
      .def("to_json",
           [](const AtomicMeasure& mu) { return measure_to_json(Measure{mu}); });

  py::class_<DensityMeasure>(m, "DensityMeasure")
      .def_property_readonly("domain",
                             [](const DensityMeasure& mu) {
                               return std::string(domain_name(mu.domain()));
                             })
      .def_property_readonly("grid",
                             [](const DensityMeasure& mu) { return mu.grid(); })
      .def_property_readonly(
          "density", [](const DensityMeasure& mu) { return mu.density(); })
      .def_property_readonly(
          "atom_part", [](const DensityMeasure& mu) { return mu.atom_part(); })
      .def("density_mass", &DensityMeasure::density_mass)
      .def("to_json",
           [](const DensityMeasure& mu) { return measure_to_json(Measure{mu}); });

  py::class_<TransformHandle>(m, "TransformHandle")
      .def_property_readonly("domain",
                             [](const TransformHandle& h) {
                               return std::string(domain_name(h.domain()));
                             })
      .def("G", &TransformHandle::G)
      .def("F", &TransformHandle::F)
      .def("psi", &TransformHandle::psi)
      .def("K", &TransformHandle::K)
      .def("W", &TransformHandle::W);

  py::class_<ClassWitness>(m, "ClassWitness")
      .def_readonly("point", &ClassWitness::point)
      .def_readonly("violation", &ClassWitness::violation)
      .def_readonly("condition", &ClassWitness::condition);

  py::class_<ClassReport>(m, "ClassReport")
      .def_readonly("passed", &ClassReport::passed)
      .def_readonly("witnesses", &ClassReport::witnesses);

  py::class_<PyConvolutionResult>(m, "ConvolutionResult")
      .def_property_readonly(
          "method",
          [](const PyConvolutionResult& r) {
            switch (r.inner.method) {
              case ConvolutionMethod::OperatorModel: return "operator_model";
              case ConvolutionMethod::TransformFormula: return "transform_formula";
              case ConvolutionMethod::Subordination: return "subordination";
              case ConvolutionMethod::Shortcut: return "shortcut";
            }
            return "?";
          })
      .def_property_readonly(
          "is_atomic", [](const PyConvolutionResult& r) { return r.inner.is_atomic(); })
      .def_property_readonly(
          "is_undefined",
          [](const PyConvolutionResult& r) { return r.inner.is_undefined(); })
      .def_property_readonly(
          "value", [](const PyConvolutionResult& r) { return result_value(r.inner); })
      .def("atoms", [](const PyConvolutionResult& r) { return r.inner.atoms(); })
      .def("handle", [](const PyConvolutionResult& r) { return r.inner.handle(); });

  m.def("make_atomic", &make_atomic_py, py::arg("domain"), py::arg("atoms"));
  m.def("haar_circle", &haar_circle, py::arg("points") = 257);
  m.def("translate", [](const AtomicMeasure& mu, double x) {
    return push_map(mu, Translate{x});
  });
  m.def("dilate", [](const AtomicMeasure& mu, double a) {
    return push_map(mu, Dilate{a});
  });
  m.def("rotate", [](const AtomicMeasure& mu, double t) {
    return push_map(mu, Rotate{t});
  });
  m.def("mixture", [](const std::vector<double>& weights,
                      const std::vector<AtomicMeasure>& measures) {
    std::vector<Measure> wrapped(measures.begin(), measures.end());
    return std::get<AtomicMeasure>(mixture(weights, wrapped));
  });
  m.def("moments", [](const AtomicMeasure& mu, int n) {
    return moments(Measure{mu}, n);
  });
  m.def("moments", [](const DensityMeasure& mu, int n) {
    return moments(Measure{mu}, n);
  });

  m.def("handle_of", [](const AtomicMeasure& mu) { return handle_of(mu); });
  m.def("handle_of", [](const DensityMeasure& mu) { return handle_of(mu); });
  m.def("semicircle", &semicircle_handle, py::arg("mean"), py::arg("variance"));

  m.def("eval_G", [](const AtomicMeasure& mu, Complex z) { return eval_G(Measure{mu}, z); });
  m.def("eval_F", [](const AtomicMeasure& mu, Complex z) { return eval_F(Measure{mu}, z); });
  m.def("eval_psi", [](const AtomicMeasure& mu, Complex z) { return eval_psi(Measure{mu}, z); });
  m.def("eval_K", [](const AtomicMeasure& mu, Complex z) { return eval_K(Measure{mu}, z); });
  m.def("eval_W", [](const AtomicMeasure& mu, Complex z) { return eval_W(Measure{mu}, z); });

  auto conv2 = [](ConvolutionResult (*op)(const TransformHandle&, const TransformHandle&)) {
    return [op](const TransformHandle& mu, const TransformHandle& nu) {
      return PyConvolutionResult{op(mu, nu)};
    };
  };
  m.def("mono_add", conv2(&mono_add));
  m.def("bool_add", conv2(&bool_add));
  m.def("mono_mult", conv2(&mono_mult_pos));
  m.def("mono_mult_circle", conv2(&mono_mult_circle));
  m.def("mono_mult_alt", conv2(&mono_mult_alt));
  m.def("bool_mult_new", conv2(&bool_mult_new));
  m.def("bool_mult_circle", conv2(&bool_mult_circle));
  m.def("free_add",
        [](const TransformHandle& mu, const TransformHandle& nu, double tol,
           int max_iter) {
          return PyConvolutionResult{free_add(mu, nu, SolveOptions{tol, max_iter})};
        },
        py::arg("mu"), py::arg("nu"), py::arg("tol") = 1e-12,
        py::arg("max_iter") = 500);
  m.def("free_mult",
        [](const TransformHandle& mu, const TransformHandle& nu, double tol,
           int max_iter) {
          const SolveOptions opts{tol, max_iter};
          return PyConvolutionResult{mu.domain() == Domain::UnitCircle
                                         ? free_mult_circle(mu, nu, opts)
                                         : free_mult_pos(mu, nu, opts)};
        },
        py::arg("mu"), py::arg("nu"), py::arg("tol") = 1e-12,
        py::arg("max_iter") = 500);
  m.def("bool_mult_bercovici",
        [](const TransformHandle& mu, const TransformHandle& nu, int samples,
           std::uint64_t seed) {
          return PyConvolutionResult{bool_mult_bercovici_pos(mu, nu, samples, seed)};
        },
        py::arg("mu"), py::arg("nu"), py::arg("class_samples") = 200,
        py::arg("seed") = default_seed());

  m.def("solve_additive_subordination",
        [](const TransformHandle& mu, const TransformHandle& nu, Complex z,
           double tol, int max_iter) {
          const auto pair =
              solve_additive_subordination(mu, nu, z, SolveOptions{tol, max_iter});
          return py::make_tuple(pair.Z1, pair.Z2, pair.iterations, pair.residual);
        },
        py::arg("mu"), py::arg("nu"), py::arg("z"), py::arg("tol") = 1e-12,
        py::arg("max_iter") = 500);
  m.def("decompose_free",
        [](const TransformHandle& mu, const TransformHandle& nu) {
          return decompose_free(mu, nu);
        });

  m.def("class_check",
        [](const TransformHandle& h, const std::string& which, int samples,
           std::uint64_t seed) {
          FunctionClass cls;
          if (which == "F") cls = FunctionClass::F;
          else if (which == "S") cls = FunctionClass::S;
          else if (which == "P") cls = FunctionClass::P;
          else throw PreconditionError("class must be F, S or P");
          return class_check(h, cls, samples, seed);
        },
        py::arg("handle"), py::arg("which"), py::arg("samples") = 200,
        py::arg("seed") = default_seed());

  m.def("stieltjes_invert",
        [](const TransformHandle& h, const std::vector<double>& grid,
           const std::vector<double>& ladder) {
          InversionOptions options;
          if (!ladder.empty()) options.eps_ladder = ladder;
          InversionDiagnostics diag;
          DensityMeasure out = stieltjes_invert(h, grid, options, &diag);
          py::dict diagnostics;
          diagnostics["raw_mass"] = diag.raw_mass;
          diagnostics["worst_disagreement"] = diag.worst_disagreement;
          diagnostics["flagged_points"] = diag.flagged_points;
          return py::make_tuple(std::move(out), std::move(diagnostics));
        },
        py::arg("handle"), py::arg("grid"),
        py::arg("eps_ladder") = std::vector<double>{});
  m.def("transform_moments", &transform_moments, py::arg("handle"), py::arg("n"),
        py::arg("radius"), py::arg("points") = 1024);

  m.def("evaluate_expression",
        [](const std::string& text, const std::string& domain,
           std::uint64_t seed) {
          EvalOptions opts;
          if (!domain.empty()) opts.literal_domain = domain_from_string(domain);
          opts.seed = seed;
          const EvalValue v = evaluate_expression(parse_expression(text), opts);
          if (v.is_atomic()) return py::cast(v.atoms());
          if (v.is_undefined()) return py::cast(v.undefined().witness);
          return py::cast(v.handle());
        },
        py::arg("text"), py::arg("domain") = std::string(),
        py::arg("seed") = default_seed());
  m.def("pretty_print", [](const std::string& text) {
    return pretty_print(parse_expression(text));
  });
  m.def("measure_from_json", [](const std::string& text) -> py::object {
    const Measure mu = measure_from_json(text);
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) return py::cast(*a);
    return py::cast(std::get<DensityMeasure>(mu));
  });

  m.def("verify_suite",
        [](const std::string& suite, std::uint64_t seed) {
          std::vector<SuiteResult> results;
          if (suite == "all") results = run_all_suites(seed);
          else if (suite == "diracs") results = {run_suite_diracs(seed)};
          else if (suite == "oracles") results = {run_suite_oracles(seed)};
          else if (suite == "associativity")
            results = {run_suite_associativity(seed)};
          else throw PreconditionError("unknown suite '" + suite + "'");
          int failures = 0;
          std::vector<std::string> lines;
          for (const auto& r : results) {
            failures += r.failures;
            lines.insert(lines.end(), r.lines.begin(), r.lines.end());
          }
          return py::make_tuple(failures == 0, lines);
        },
        py::arg("suite") = "all", py::arg("seed") = default_seed());

  m.def("run_command", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });

  m.attr("__version__") = "0.1.0";
}
