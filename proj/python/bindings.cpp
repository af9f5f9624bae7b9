#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "semiform/cli.hpp"
#include "semiform/form_io.hpp"
#include "semiform/indecomposability.hpp"
#include "semiform/isometry.hpp"

namespace py = pybind11;
using namespace semiform;

namespace {

GramMatrix as_gram(const FormDocument& doc, const char* role) {
  if (const auto* g = std::get_if<GramMatrix>(&doc.form)) return *g;
  throw PreconditionError(std::string(role) + " must be a bilinear form");
}

QuadraticScheme as_scheme(const FormDocument& doc, const char* role) {
  if (const auto* q = std::get_if<QuadraticScheme>(&doc.form)) return *q;
  throw PreconditionError(std::string(role) + " must be a quadratic form");
}

GramMatrix companion_of(const FormDocument& q) {
  return q.companion ? *q.companion : balanced_companion(as_scheme(q, "q"));
}

std::vector<std::vector<std::size_t>> to_lists(const BasePartition& p) { return {p.begin(), p.end()}; }

}  // namespace

PYBIND11_MODULE(_semiform, m) {
  // Translators run newest first, so the base class goes in first.
  const auto base = py::register_exception<Error>(m, "SemiformError", PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<FormDocument>(m, "Form")
      .def_static("parse", [](const std::string& text) { return parse_form_text(text); })
      .def_static("load", &load_form_file)
      .def("to_json", [](const FormDocument& d) { return to_json(d).dump(); })
      .def_property_readonly("rank", [](const FormDocument& d) { return form_rank(d.form); })
      .def_property_readonly("kind", [](const FormDocument& d) { return is_quadratic(d.form) ? "quadratic" : "bilinear"; })
      .def_property_readonly("semiring", [](const FormDocument& d) { return d.semiring().name(); })
      .def("__repr__", [](const FormDocument& d) {
        return "<Form " + d.semiring().name() + " " + form_literal(d.form) + ">";
      });

  m.def("decompose", [](const FormDocument& f) { return to_lists(decompose(f.form)); });
  m.def("is_indecomposable", [](const FormDocument& f) { return is_indecomposable(f.form); });

  m.def("tensor", [](const FormDocument& b1, const FormDocument& b2) {
    return FormDocument{tensor_bilinear(as_gram(b1, "left factor"), as_gram(b2, "right factor")), std::nullopt};
  });
  m.def("tensor_quadratic", [](const FormDocument& gamma, const FormDocument& q) {
    const auto b = companion_of(q);
    const auto g = as_gram(gamma, "gamma");
    return FormDocument{tensor_quadratic(g, as_scheme(q, "q"), b), tensor_bilinear(g, b)};
  });

  m.def("predict_bilinear", [](const FormDocument& b1, const FormDocument& b2) {
    return to_lists(predict_bilinear_tensor(as_gram(b1, "left factor"), as_gram(b2, "right factor")).partition);
  });
  m.def("predict_quadratic", [](const FormDocument& gamma, const FormDocument& q) {
    return to_lists(predict_quadratic_tensor(as_gram(gamma, "gamma"), as_scheme(q, "q"), companion_of(q)).partition);
  });

  m.def("isometry", [](const FormDocument& f1, const FormDocument& f2) -> py::object {
    const auto w = isometry_search(f1.form, f2.form);
    if (!w) return py::none();
    const auto& s = f1.semiring();
    std::vector<std::string> units;
    for (const auto& u : w->units) units.push_back(s.format(u));
    py::dict out;
    out["perm"] = w->perm;
    out["units"] = units;
    return out;
  });

  m.def("run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
