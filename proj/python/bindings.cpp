#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "heightdyn/coefficients.hpp"
#include "heightdyn/documents.hpp"
#include "heightdyn/dynamics.hpp"
#include "heightdyn/height_machine.hpp"
#include "heightdyn/product_classifier.hpp"
#include "heightdyn/registry.hpp"

namespace py = pybind11;
using namespace heightdyn;

namespace {

Integer to_integer(const py::handle& obj) { return Integer(py::str(obj).cast<std::string>()); }

py::int_ to_py(const Integer& x) { return py::int_(py::module_::import("builtins").attr("int")(x.get_str())); }

QuadraticNumber to_scalar(const py::handle& obj) {
  if (py::isinstance<QuadraticNumber>(obj)) return obj.cast<QuadraticNumber>();
  if (py::isinstance<py::int_>(obj)) return QuadraticNumber(to_integer(obj));
  if (py::isinstance<py::str>(obj)) return QuadraticNumber::parse(obj.cast<std::string>());
  throw py::type_error("expected int, str or QuadraticNumber");
}

DivisorClass to_divisor(const py::sequence& seq) {
  std::vector<QuadraticNumber> coeffs;
  for (const auto& item : seq) coeffs.push_back(to_scalar(item));
  return DivisorClass(std::move(coeffs));
}

py::list from_divisor(const DivisorClass& d) {
  py::list out;
  for (const auto& x : d.coeffs()) out.append(x);
  return out;
}

PullbackMap to_pullback_map(const py::sequence& rows) {
  std::vector<std::vector<QuadraticNumber>> out;
  for (const auto& row : rows) {
    out.emplace_back();
    for (const auto& item : row.cast<py::sequence>()) out.back().push_back(to_scalar(item));
  }
  return PullbackMap(std::move(out));
}

MultiPoint to_point(const py::sequence& factors) {
  std::vector<RationalProjectivePoint> out;
  for (const auto& f : factors) {
    std::vector<Integer> raw;
    for (const auto& x : f.cast<py::sequence>()) raw.push_back(to_integer(x));
    out.push_back(RationalProjectivePoint::normalize(std::move(raw)));
  }
  return MultiPoint(std::move(out));
}

py::list from_point(const MultiPoint& p) {
  py::list out;
  for (const auto& f : p.factors()) {
    py::list coords;
    for (const auto& x : f.coords()) coords.append(to_py(x));
    out.append(py::tuple(coords));
  }
  return out;
}

IntMatrix to_int_matrix(const py::sequence& rows) {
  std::vector<std::vector<Integer>> out;
  for (const auto& row : rows) {
    out.emplace_back();
    for (const auto& x : row.cast<py::sequence>()) out.back().push_back(to_integer(x));
  }
  return IntMatrix(out);
}

py::object from_json(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_heightdyn, m) {
  m.doc() = "Exact height coefficients and arithmetic dynamics on products of projective spaces";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", m.attr("Error"));
  py::register_exception<DomainError>(m, "DomainError", m.attr("Error"));
  py::register_exception<DimensionError>(m, "DimensionError", m.attr("Error"));
  py::register_exception<IncompatibleFieldError>(m, "IncompatibleFieldError", m.attr("Error"));
  py::register_exception<BasePointError>(m, "BasePointError", m.attr("Error"));
  py::register_exception<ClassificationError>(m, "ClassificationError", m.attr("Error"));

  py::class_<QuadraticNumber>(m, "QuadraticNumber")
      .def(py::init([](const py::object& obj) { return to_scalar(obj); }), py::arg("value") = 0)
      .def(py::init([](const py::object& a, const py::object& b, const py::object& d) {
             auto ra = to_scalar(a), rb = to_scalar(b);
             if (!ra.is_rational() || !rb.is_rational()) throw py::value_error("a and b must be rational");
             return QuadraticNumber(ra.rational_part(), rb.rational_part(), to_integer(d));
           }),
           py::arg("a"), py::arg("b"), py::arg("d"))
      .def_static("parse", [](const std::string& s) { return QuadraticNumber::parse(s); })
      .def_property_readonly("a", [](const QuadraticNumber& q) { return q.rational_part().get_str(); })
      .def_property_readonly("b", [](const QuadraticNumber& q) { return q.surd_coefficient().get_str(); })
      .def_property_readonly("d", [](const QuadraticNumber& q) { return to_py(q.radicand()); })
      .def("is_rational", &QuadraticNumber::is_rational)
      .def("conjugate", &QuadraticNumber::conjugate)
      .def("inverse", &QuadraticNumber::inverse)
      .def("sign", &QuadraticNumber::sign)
      .def("__float__", &QuadraticNumber::to_double)
      .def("__str__", &QuadraticNumber::to_string)
      .def("__repr__", [](const QuadraticNumber& q) { return "QuadraticNumber('" + q.to_string() + "')"; })
      .def("__hash__", [](const QuadraticNumber& q) { return py::hash(py::str(q.to_string())); })
      .def("__add__", [](const QuadraticNumber& x, const py::object& y) { return x + to_scalar(y); })
      .def("__radd__", [](const QuadraticNumber& x, const py::object& y) { return to_scalar(y) + x; })
      .def("__sub__", [](const QuadraticNumber& x, const py::object& y) { return x - to_scalar(y); })
      .def("__rsub__", [](const QuadraticNumber& x, const py::object& y) { return to_scalar(y) - x; })
      .def("__mul__", [](const QuadraticNumber& x, const py::object& y) { return x * to_scalar(y); })
      .def("__rmul__", [](const QuadraticNumber& x, const py::object& y) { return to_scalar(y) * x; })
      .def("__truediv__", [](const QuadraticNumber& x, const py::object& y) { return x / to_scalar(y); })
      .def("__rtruediv__", [](const QuadraticNumber& x, const py::object& y) { return to_scalar(y) / x; })
      .def("__neg__", [](const QuadraticNumber& x) { return -x; })
      .def("__eq__", [](const QuadraticNumber& x, const py::object& y) { return x == to_scalar(y); })
      .def("__lt__", [](const QuadraticNumber& x, const py::object& y) { return x < to_scalar(y); })
      .def("__le__", [](const QuadraticNumber& x, const py::object& y) { return x <= to_scalar(y); })
      .def("__gt__", [](const QuadraticNumber& x, const py::object& y) { return x > to_scalar(y); })
      .def("__ge__", [](const QuadraticNumber& x, const py::object& y) { return x >= to_scalar(y); });

  py::class_<PicardLattice>(m, "PicardLattice")
      .def_static("from_json", [](const std::string& text) { return parse_lattice(parse_json(text)); })
      .def_static("orthant", [](std::size_t rank) { return PicardLattice::orthant(rank); }, py::arg("rank"))
      .def_static(
          "quadratic",
          [](const py::sequence& gram, const py::sequence& linear, const py::sequence& witness) {
            QuadraticCone qc;
            for (const auto& row : gram) {
              qc.gram.emplace_back();
              for (const auto& x : row.cast<py::sequence>()) qc.gram.back().push_back(to_scalar(x).rational_part());
            }
            for (const auto& x : linear) qc.linear.push_back(to_scalar(x).rational_part());
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < qc.linear.size(); ++i) labels.push_back("E" + std::to_string(i + 1));
            return PicardLattice::create(std::move(labels), std::move(qc), 0, to_divisor(witness));
          },
          py::arg("gram"), py::arg("linear"), py::arg("witness"))
      .def_property_readonly("rank", &PicardLattice::rank)
      .def_property_readonly("labels", &PicardLattice::labels)
      .def("is_ample", [](const PicardLattice& l, const py::sequence& d) { return l.is_ample(to_divisor(d)); })
      .def("is_nef", [](const PicardLattice& l, const py::sequence& d) { return l.is_nef(to_divisor(d)); })
      .def("to_json", [](const PicardLattice& l) { return to_json(l).dump(); });

  py::class_<PullbackMap>(m, "PullbackMap")
      .def(py::init([](const py::sequence& rows) { return to_pullback_map(rows); }), py::arg("rows"))
      .def_static("from_json", [](const std::string& text) { return parse_pullback(parse_json(text)); })
      .def_property_readonly("rank", &PullbackMap::rank)
      .def("apply", [](const PullbackMap& map, const py::sequence& d) { return from_divisor(apply_pullback(map, to_divisor(d))); })
      .def("__matmul__", [](const PullbackMap& a, const PullbackMap& b) { return a * b; })
      .def("__eq__", [](const PullbackMap& a, const PullbackMap& b) { return a == b; })
      .def("to_json", [](const PullbackMap& p) { return to_json(p).dump(); });

  py::class_<CoefficientResult>(m, "CoefficientResult")
      .def_property_readonly("exact", [](const CoefficientResult& r) { return r.exact; })
      .def_property_readonly("method", [](const CoefficientResult& r) { return std::string(to_string(r.method)); })
      .def_property_readonly("value", [](const CoefficientResult& r) -> py::object {
        if (r.exact) return py::cast(r.exact_value());
        return py::float_(r.as_double());
      })
      .def("__float__", &CoefficientResult::as_double)
      .def("__str__", &CoefficientResult::to_string)
      .def("__repr__", [](const CoefficientResult& r) {
        return "CoefficientResult(" + r.to_string() + ", " + to_string(r.method) + ")";
      });

  auto strategy = [](bool bisection) { return bisection ? Strategy::bisection_only : Strategy::prefer_exact; };
  m.def(
      "mu1",
      [strategy](const PullbackMap& map, const py::sequence& d, const PicardLattice& l, bool bisection) {
        return mu1(map, to_divisor(d), l, strategy(bisection));
      },
      py::arg("pullback"), py::arg("divisor"), py::arg("lattice"), py::arg("bisection") = false);
  m.def(
      "mu2",
      [strategy](const PullbackMap& map, const py::sequence& d, const PicardLattice& l, bool bisection) {
        return mu2(map, to_divisor(d), l, strategy(bisection));
      },
      py::arg("pullback"), py::arg("divisor"), py::arg("lattice"), py::arg("bisection") = false);
  m.def(
      "seshadri_lower",
      [strategy](const PullbackMap& map, const py::sequence& d, const PicardLattice& l, bool bisection) {
        return seshadri_lower(map, to_divisor(d), l, strategy(bisection));
      },
      py::arg("pullback"), py::arg("divisor"), py::arg("lattice"), py::arg("bisection") = false);
  m.def(
      "global_mu",
      [](const PullbackMap& map, const PicardLattice& l, std::size_t samples, int refinement, unsigned workers) {
        GlobalMuConfig cfg{samples, refinement, workers};
        py::gil_scoped_release release;
        auto r = global_mu(map, l, cfg);
        py::gil_scoped_acquire acquire;
        py::dict out;
        out["value"] = r.value;
        out["best_divisor"] = from_divisor(r.best_divisor);
        out["best_value"] = r.best_value;
        out["evaluations"] = r.evaluations;
        out["certified_lower_bound"] = r.certified_lower_bound;
        return out;
      },
      py::arg("pullback"), py::arg("lattice"), py::arg("samples") = 10000, py::arg("refinement_steps") = 20,
      py::arg("workers") = 1);
  m.def(
      "polarization_check",
      [](const PullbackMap& map, const py::sequence& d) { return polarization_check(map, to_divisor(d)); },
      py::arg("pullback"), py::arg("divisor"));
  m.def(
      "validate_dominant_pullback", [](const PullbackMap& map, const PicardLattice& l) { return validate_dominant_pullback(map, l); },
      py::arg("pullback"), py::arg("lattice"));
  m.def(
      "dominance_scale",
      [](const PicardLattice& l, const py::sequence& d1, const py::sequence& d2) {
        return dominance_scale(l, to_divisor(d1), to_divisor(d2));
      },
      py::arg("lattice"), py::arg("d1"), py::arg("d2"));

  py::class_<MultiHomogeneousMap>(m, "MultiHomogeneousMap")
      .def_static("from_json", [](const std::string& text) { return parse_morphism(parse_json(text)); })
      .def_static("power_map", &MultiHomogeneousMap::power_map, py::arg("n"), py::arg("degree"))
      .def_static("identity", &MultiHomogeneousMap::identity, py::arg("signature"))
      .def_static("product", &MultiHomogeneousMap::product, py::arg("factors"))
      .def("permute_targets", &MultiHomogeneousMap::permute_targets, py::arg("permutation"))
      .def_property_readonly("signature", &MultiHomogeneousMap::source_signature)
      .def("__call__", [](const MultiHomogeneousMap& f, const py::sequence& p) { return from_point(f(to_point(p))); })
      .def("multidegree", [](const MultiHomogeneousMap& f) {
        const auto d = multidegree_matrix(f);
        py::list rows;
        for (const auto& row : d.to_rows()) {
          py::list r;
          for (const auto& x : row) r.append(to_py(x));
          rows.append(r);
        }
        return rows;
      })
      .def("pullback", &multidegree_pullback)
      .def("to_json", [](const MultiHomogeneousMap& f) { return to_json(f).dump(); });

  m.def(
      "normalize",
      [](const py::sequence& coords) {
        std::vector<Integer> raw;
        for (const auto& x : coords) raw.push_back(to_integer(x));
        py::list out;
        for (const auto& x : normalize(std::move(raw)).coords()) out.append(to_py(x));
        return py::tuple(out);
      },
      py::arg("coords"));
  m.def(
      "weil_height",
      [](const py::sequence& coords) {
        std::vector<Integer> raw;
        for (const auto& x : coords) raw.push_back(to_integer(x));
        return weil_height(normalize(std::move(raw)));
      },
      py::arg("coords"));
  m.def(
      "height_wrt",
      [](const std::vector<double>& d, const py::sequence& p) { return height_wrt(d, to_point(p)); },
      py::arg("divisor"), py::arg("point"));
  m.def(
      "enumerate_points",
      [](const Signature& sig, long bound) {
        py::list out;
        for_each_point(sig, bound, [&out](const MultiPoint& p) { out.append(from_point(p)); });
        return out;
      },
      py::arg("signature"), py::arg("bound"));

  m.def(
      "orbit",
      [](const MultiHomogeneousMap& f, const py::sequence& p, std::size_t max_iter, double ceiling) {
        const auto rec = orbit(f, to_point(p), max_iter, ceiling);
        py::dict out;
        py::list pts;
        for (const auto& q : rec.points) pts.append(from_point(q));
        out["points"] = pts;
        out["heights"] = rec.heights;
        if (const auto* per = std::get_if<Periodic>(&rec.status)) {
          out["status"] = "periodic";
          out["tail"] = per->tail;
          out["period"] = per->period;
        } else if (const auto* e = std::get_if<Escaped>(&rec.status)) {
          out["status"] = "escaped";
          out["at"] = e->at;
        } else {
          out["status"] = "truncated";
        }
        return out;
      },
      py::arg("map"), py::arg("point"), py::arg("max_iter"), py::arg("ceiling"));
  m.def(
      "find_preperiodic",
      [](const MultiHomogeneousMap& f, long bound, std::size_t max_iter, std::optional<double> ceiling) {
        const double c = ceiling.value_or(default_escape_ceiling(f, bound));
        PreperiodicSearch res;
        {
          py::gil_scoped_release release;
          res = find_preperiodic(f, bound, max_iter, c);
        }
        py::dict out;
        py::list pre, und;
        for (const auto& q : res.preperiodic) pre.append(from_point(q));
        for (const auto& q : res.undetermined) und.append(from_point(q));
        out["preperiodic"] = pre;
        out["undetermined"] = und;
        out["examined"] = res.examined;
        return out;
      },
      py::arg("map"), py::arg("bound"), py::arg("max_iter") = 64, py::arg("ceiling") = py::none());
  m.def(
      "estimate_silverman_mu",
      [](const MultiHomogeneousMap& f, const std::vector<double>& d, long bound, double h_min) {
        py::gil_scoped_release release;
        return estimate_silverman_mu(f, d, bound, h_min);
      },
      py::arg("map"), py::arg("divisor"), py::arg("bound"), py::arg("h_min"));
  m.def(
      "verify_weak_northcott",
      [](const MultiHomogeneousMap& f, const std::vector<double>& d, double mu1_v, double mu2_v, double eps,
         long bound) {
        NorthcottReport rep;
        {
          py::gil_scoped_release release;
          rep = verify_weak_northcott(f, d, mu1_v, mu2_v, eps, bound);
        }
        py::dict out;
        out["c1_emp"] = rep.c1_emp;
        out["c2_emp"] = rep.c2_emp;
        out["c1_argmax"] = from_point(rep.c1_argmax);
        out["c2_argmax"] = from_point(rep.c2_argmax);
        out["sample_size"] = rep.sample_size;
        return out;
      },
      py::arg("map"), py::arg("divisor"), py::arg("mu1"), py::arg("mu2"), py::arg("epsilon"), py::arg("bound"));
  m.def("preperiodic_height_bound", &preperiodic_height_bound, py::arg("mu1"), py::arg("constant"));

  m.def(
      "classify",
      [](const py::sequence& matrix, const std::vector<int>& dims) {
        const auto mat = to_int_matrix(matrix);
        const auto b = classify_dominant(mat, dims);
        const auto lattice = PicardLattice::orthant(mat.rows());
        const auto pc = power_coefficients(b, mat, lattice.witness(), lattice);
        py::dict out;
        out["dims"] = b.dims;
        out["blocks"] = b.blocks;
        out["sigma"] = b.sigma;
        py::list degrees;
        for (const auto& d : b.degrees) degrees.append(to_py(d));
        out["degrees"] = degrees;
        out["order"] = b.order;
        out["N"] = pc.power;
        out["mu1_pow"] = to_py(pc.mu1);
        out["mu2_pow"] = to_py(pc.mu2);
        return out;
      },
      py::arg("matrix"), py::arg("dims"));
  m.def(
      "check_block_triangular",
      [](const py::sequence& matrix, const std::vector<int>& dims) {
        return check_block_triangular(to_int_matrix(matrix), dims);
      },
      py::arg("matrix"), py::arg("dims"));

  m.def("run_example_registry", [] { return from_json(to_json(run_example_registry())); });
}
