#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "occutime/error.hpp"
#include "occutime/gaussian.hpp"
#include "occutime/io.hpp"
#include "occutime/markov.hpp"
#include "occutime/simulate.hpp"
#include "occutime/transforms.hpp"

namespace py = pybind11;
using namespace occutime;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1))
    throw Error(ErrorCode::InvalidInput, "expected a square 2-d array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  Matrix m(n, n);
  const double* p = a.data();
  for (std::size_t i = 0; i < n * n; ++i) m(i / n, i % n) = p[i];
  return m;
}

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::InvalidInput, "expected a 1-d array");
  return Vector(a.data(), a.data() + a.shape(0));
}

Array from_matrix(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Array from_vector(const Vector& v) {
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.size())};
  const std::vector<py::ssize_t> strides{static_cast<py::ssize_t>(sizeof(double))};
  return Array(shape, strides, v.data());
}

McMethod method_from(const std::string& name) {
  if (name == "expweight") return McMethod::ExpWeight;
  if (name == "kill") return McMethod::KillSurvival;
  if (name == "comweight") return McMethod::CoMWeight;
  throw Error(ErrorCode::InvalidInput, "unknown method " + name);
}

SimOptions options(unsigned threads) {
  SimOptions o;
  o.threads = std::max(1u, threads);
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Occupation-time transforms and samplers for skip-free Markov chains";

  static py::exception<Error> error_type(m, "OccutimeError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      py::object row = e.row() == no_index ? py::none() : py::cast(e.row());
      py::object col = e.col() == no_index ? py::none() : py::cast(e.col());
      exc.attr("row") = row;
      exc.attr("col") = col;
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<GeneratorMatrix>(m, "Generator")
      .def_property_readonly("n", &GeneratorMatrix::n)
      .def_property_readonly("q", [](const GeneratorMatrix& g) { return from_matrix(g.q()); })
      .def_property_readonly("exit", [](const GeneratorMatrix& g) { return from_vector(g.exit()); })
      .def_property_readonly("kind", [](const GeneratorMatrix& g) {
        return g.kind() == GeneratorKind::FullConservative ? "full" : "sub";
      })
      .def_property_readonly("skip_free", &GeneratorMatrix::skip_free)
      .def_property_readonly("tridiagonal", &GeneratorMatrix::tridiagonal)
      .def_property_readonly("strictly_skip_free", &GeneratorMatrix::strictly_skip_free)
      .def_property_readonly("killing_reachable", &GeneratorMatrix::killing_reachable)
      .def_property_readonly("violation_index", [](const GeneratorMatrix& g) {
        return find_violation_index(g);
      })
      .def("to_json", [](const GeneratorMatrix& g) { return io::to_json(g).dump(); });

  m.def(
      "validate",
      [](const Array& q, const std::string& kind) {
        if (kind != "sub" && kind != "full")
          throw Error(ErrorCode::InvalidInput, "kind must be \"sub\" or \"full\"");
        return GeneratorMatrix::validate(
            to_matrix(q), kind == "full" ? GeneratorKind::FullConservative : GeneratorKind::SubGenerator);
      },
      py::arg("q"), py::arg("kind") = "sub");
  m.def("load", [](const std::string& path) { return io::load_generator(path); }, py::arg("path"));

  m.def(
      "joint_lt_skipfree",
      [](const GeneratorMatrix& g, const Array& d) {
        return joint_lt_skipfree(g, KillingVector(to_vector(d)));
      },
      py::arg("g"), py::arg("d"));
  m.def(
      "joint_lt_general",
      [](const GeneratorMatrix& g, std::size_t start, const Array& d) {
        return joint_lt_general(g, start, KillingVector(to_vector(d)));
      },
      py::arg("g"), py::arg("start"), py::arg("d"));
  m.def("green", [](const GeneratorMatrix& g) { return from_matrix(green(g).g); }, py::arg("g"));
  m.def("marginal_rates", [](const GeneratorMatrix& g) { return from_vector(marginal_rates(g)); },
        py::arg("g"));
  m.def(
      "occupation_covariance",
      [](const GeneratorMatrix& g, std::size_t start) {
        return from_matrix(occupation_covariance(g, start));
      },
      py::arg("g"), py::arg("start") = 0);

  m.def(
      "mc_transform",
      [](const GeneratorMatrix& g, const Array& d, std::size_t paths, std::uint64_t seed,
         const std::string& method, std::size_t start, unsigned threads) {
        McEstimate e;
        {
          py::gil_scoped_release release;
          e = mc_transform(g, start, KillingVector(to_vector(d)), paths, seed, method_from(method),
                           options(threads));
        }
        return py::dict(py::arg("mean") = e.mean, py::arg("std_error") = e.std_error,
                        py::arg("paths") = e.num_paths, py::arg("seed") = e.seed);
      },
      py::arg("g"), py::arg("d"), py::arg("paths"), py::arg("seed"),
      py::arg("method") = "expweight", py::arg("start") = 0, py::arg("threads") = 1);
  m.def(
      "simulate_occupations",
      [](const GeneratorMatrix& g, std::size_t paths, std::uint64_t seed, std::size_t start,
         unsigned threads) {
        const std::size_t n = g.n();
        const auto rows =
            simulate_paths(g, start, KillingVector::zeros(n), false, paths, seed, options(threads));
        Array out({paths, n});
        double* p = out.mutable_data();
        for (const PathSample& s : rows) p = std::copy(s.occupation.begin(), s.occupation.end(), p);
        return out;
      },
      py::arg("g"), py::arg("paths"), py::arg("seed"), py::arg("start") = 0,
      py::arg("threads") = 1);

  m.def(
      "markov_verdict",
      [](const GeneratorMatrix& g) { return io::to_json(markov_verdict(g)).dump(); },
      py::arg("g"), "Verdict as a JSON string; the Python wrapper decodes it.");

  m.def("gaussian_sigma", [](const GeneratorMatrix& g) { return from_matrix(gaussian_spec(g).sigma); },
        py::arg("g"));
  m.def(
      "sample_gaussian",
      [](const GeneratorMatrix& g, std::size_t samples, std::uint64_t seed, unsigned threads) {
        const GaussianSpec spec = gaussian_spec(g);
        const Vector flat = sample_occupations_gaussian(spec, samples, seed, options(threads));
        Array out({samples, g.n()});
        std::copy(flat.begin(), flat.end(), out.mutable_data());
        return out;
      },
      py::arg("g"), py::arg("samples"), py::arg("seed"), py::arg("threads") = 1);

  m.def(
      "phi",
      [](const Array& a, const Array& d) { return phi(to_matrix(a), KillingVector(to_vector(d))); },
      py::arg("a"), py::arg("d"));
  m.def(
      "mass_identity_residual",
      [](const Array& a) { return mass_identity_residual(SplitMatrix::from(to_matrix(a))); },
      py::arg("a"));
  m.def(
      "mu_total_mass", [](const Array& a) { return mu_total_mass(SplitMatrix::from(to_matrix(a))); },
      py::arg("a"));
}
