// Python bindings. Spaces cross the boundary as Space objects; coefficient
// vectors and matrices as lists / numpy arrays of complex numbers.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opcert/certify.hpp"
#include "opcert/cstar.hpp"
#include "opcert/errors.hpp"
#include "opcert/funcspace.hpp"
#include "opcert/hermit.hpp"
#include "opcert/io.hpp"
#include "opcert/sysdetect.hpp"
#include "opcert/tro.hpp"

namespace py = pybind11;
using namespace opcert;

namespace {

struct Space {
  SpaceFile file;
  ConcreteOpSpace space;
  std::optional<SampledFunctionSpace> fspace;

  static Space from_file(SpaceFile f) {
    ConcreteOpSpace s = build_space(f);
    auto fs = build_function_space(f);
    return Space{std::move(f), std::move(s), std::move(fs)};
  }

  TroClosure closure() const {
    TroClosure c = generate_tro(space);
    c.envelope_exact = resolve_envelope_exact(file, c.z_basis.size());
    return c;
  }
};

CMat to_cmat(const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw InvalidInput("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  CMat m(rows, cols);
  auto r = a.unchecked<2>();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = r(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
  return m;
}

py::array_t<cplx> to_array(const CMat& m) {
  py::array_t<cplx> a({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
  return a;
}

Space matrix_space(const std::vector<py::array_t<cplx, py::array::c_style | py::array::forcecast>>& basis,
                   std::optional<CVec> unit, std::string name) {
  if (basis.empty()) throw InvalidInput("basis is empty");
  SpaceFile f;
  f.name = std::move(name);
  f.kind = SpaceKind::Matrix;
  for (const auto& b : basis) f.basis.push_back(to_cmat(b));
  f.rows = f.basis.front().rows();
  f.cols = f.basis.front().cols();
  f.unit = std::move(unit);
  return Space::from_file(std::move(f));
}

Space function_space(const std::vector<CVec>& values, std::optional<CVec> unit, std::string name) {
  if (values.empty()) throw InvalidInput("basis is empty");
  SpaceFile f;
  f.name = std::move(name);
  f.kind = SpaceKind::Function;
  f.points = values.front().size();
  for (const auto& v : values) f.basis.emplace_back(v.size(), 1, v);
  f.unit = std::move(unit);
  return Space::from_file(std::move(f));
}

CVec unit_or(const Space& s, const std::optional<CVec>& u) { return u ? *u : s.space.require_unit(); }

}  // namespace

PYBIND11_MODULE(_opcert, m) {
  m.doc() = "Numerical certificates for unital operator spaces";
  m.attr("__version__") = tool_version();

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("seed", &SolverConfig::seed)
      .def_readwrite("starts", &SolverConfig::starts)
      .def_readwrite("max_iterations", &SolverConfig::max_iterations)
      .def_readwrite("step0", &SolverConfig::step0)
      .def_readwrite("stationarity_tol", &SolverConfig::stationarity_tol)
      .def_readwrite("t_grid", &SolverConfig::t_grid)
      .def_readwrite("cert_tol", &SolverConfig::cert_tol)
      .def_readwrite("fail_factor", &SolverConfig::fail_factor)
      .def_readwrite("t_large", &SolverConfig::t_large)
      .def_readwrite("threads", &SolverConfig::threads)
      .def("validate", &SolverConfig::validate);

  py::class_<SolverDiagnostics>(m, "SolverDiagnostics")
      .def_readonly("starts", &SolverDiagnostics::starts)
      .def_readonly("iterations", &SolverDiagnostics::iterations)
      .def_readonly("evaluations", &SolverDiagnostics::evaluations)
      .def_readonly("fd_fallbacks", &SolverDiagnostics::fd_fallbacks)
      .def_readonly("best_start", &SolverDiagnostics::best_start)
      .def_readonly("converged", &SolverDiagnostics::converged);

  py::class_<CertificateReport>(m, "Report")
      .def_readonly("check", &CertificateReport::check)
      .def_property_readonly("verdict", [](const CertificateReport& r) { return std::string(to_string(r.verdict)); })
      .def_property_readonly("bound", [](const CertificateReport& r) { return std::string(to_string(r.bound)); })
      .def_property_readonly("scope", [](const CertificateReport& r) { return std::string(to_string(r.scope)); })
      .def_readonly("margin", &CertificateReport::margin)
      .def_readonly("witness", &CertificateReport::witness)
      .def_readonly("diagnostics", &CertificateReport::diagnostics)
      .def_property_readonly("metrics",
                             [](const CertificateReport& r) {
                               py::dict d;
                               for (const auto& [k, v] : r.metrics) d[py::str(k)] = v;
                               return d;
                             })
      .def_readonly("notes", &CertificateReport::notes)
      .def_readonly("parts", &CertificateReport::parts)
      .def("passed", &CertificateReport::passed)
      .def("to_json",
           [](const CertificateReport& r, std::uint64_t seed) {
             ReportFile f;
             f.report = r;
             f.seed = seed;
             f.exit_code = exit_code_for(r.verdict);
             return report_to_json_canonical(f);
           },
           py::arg("seed") = SolverConfig{}.seed)
      .def("__repr__", [](const CertificateReport& r) {
        return "<Report " + r.check + ": " + std::string(to_string(r.verdict)) + ", margin " +
               short_number(r.margin) + ">";
      });

  py::class_<Space>(m, "Space")
      .def_static("from_matrices", &matrix_space, py::arg("basis"), py::arg("unit") = std::nullopt,
                  py::arg("name") = "")
      .def_static("from_functions", &function_space, py::arg("values"), py::arg("unit") = std::nullopt,
                  py::arg("name") = "")
      .def_static("from_json", [](const std::string& text) { return Space::from_file(parse_space_file(text)); })
      .def_static("load", [](const std::string& path) { return Space::from_file(load_space_file(path)); })
      .def_static("catalog",
                  [](const std::string& name, std::size_t points) {
                    return Space::from_file(space_file_from_catalog(catalog(name, points)));
                  },
                  py::arg("name"), py::arg("points") = 360)
      .def("to_json", [](const Space& s) { return emit_space_file(s.file); })
      .def_property_readonly("name", [](const Space& s) { return s.file.name; })
      .def_property_readonly("dim", [](const Space& s) { return s.space.dim(); })
      .def_property_readonly("unit", [](const Space& s) { return s.space.unit(); })
      .def_property_readonly("is_function_space", [](const Space& s) { return s.fspace.has_value(); })
      .def("norm", [](const Space& s, const CVec& c) { return s.space.norm(c); })
      .def("element", [](const Space& s, const CVec& c) { return to_array(s.space.embed_dense(c)); })
      .def("tro_dim", [](const Space& s) { return generate_tro(s.space).z_basis.size(); });

  m.def("catalog_names", &catalog_names);

  m.def(
      "certify_unitary",
      [](const Space& s, std::optional<CVec> u, std::size_t level, const SolverConfig& c) {
        return certify_unitary(s.space, unit_or(s, u), level, c);
      },
      py::arg("space"), py::arg("u") = std::nullopt, py::arg("level") = 2, py::arg("config") = SolverConfig{},
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "detect_operator_system",
      [](const Space& s, std::optional<CVec> u, const SolverConfig& c) {
        const TroClosure closure = s.closure();
        DetectOptions opts;
        opts.closure = &closure;
        return detect_operator_system(s.space, unit_or(s, u), c, opts);
      },
      py::arg("space"), py::arg("u") = std::nullopt, py::arg("config") = SolverConfig{},
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "ambient_system_check",
      [](const Space& s, std::optional<CVec> u) { return ambient_system_check(s.closure(), unit_or(s, u)); },
      py::arg("space"), py::arg("u") = std::nullopt);

  m.def(
      "detect_cstar",
      [](const Space& s, std::optional<CVec> u, const SolverConfig& c) {
        const TroClosure closure = s.closure();
        CStarOptions opts;
        opts.closure = &closure;
        return detect_cstar(s.space, unit_or(s, u), c, opts).report;
      },
      py::arg("space"), py::arg("u") = std::nullopt, py::arg("config") = SolverConfig{},
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "recover_involution",
      [](const Space& s, const CVec& x, double t, const SolverConfig& c) {
        const InvolutionRecovery r = recover_involution(s.space, s.space.require_unit(), x, t, c);
        return py::make_tuple(r.coeffs, r.residual, r.bound);
      },
      py::arg("space"), py::arg("x"), py::arg("t") = 100.0, py::arg("config") = SolverConfig{},
      "Returns (coefficients of the recovered x*, partner residual, 1/t + 1/t^2 + tol).");

  m.def(
      "recover_product",
      [](const Space& s, const CVec& v, const CVec& y, double t, const SolverConfig& c) {
        const ProductRecovery r = recover_product(s.space, s.space.require_unit(), v, y, t, c);
        return py::make_tuple(r.coeffs, r.excess, std::string(to_string(r.verdict)));
      },
      py::arg("space"), py::arg("v"), py::arg("y"), py::arg("t") = 100.0, py::arg("config") = SolverConfig{},
      "Returns (coefficients of v y*, excess, verdict); a failing verdict means the product leaves X.");

  m.def(
      "hermitian_dims",
      [](const Space& s, const CVec& g) {
        if (!s.fspace) throw InvalidInput("hermitian_dims needs a function space");
        const GHermitianResult r = g_hermitian_solve(*s.fspace, g);
        return py::make_tuple(r.real_basis.size(), r.complex_dim);
      },
      py::arg("space"), py::arg("g"), "(real dimension, complex dimension) of the g-hermitian part.");

  m.def(
      "scalar_unitary_check",
      [](const Space& s, const CVec& g, const SolverConfig& c) {
        if (!s.fspace) throw InvalidInput("scalar_unitary_check needs a function space");
        return scalar_unitary_check(*s.fspace, g, c);
      },
      py::arg("space"), py::arg("g"), py::arg("config") = SolverConfig{});
}
