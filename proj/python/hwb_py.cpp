#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hwb/cli.hpp"
#include "hwb/oracle.hpp"

namespace py = pybind11;
using namespace hwb;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::string kind_name(DeclKind k) {
  switch (k) {
    case DeclKind::Signature: return "signature";
    case DeclKind::Morphism: return "morphism";
    case DeclKind::Square: return "square";
    case DeclKind::Model: return "model";
    case DeclKind::Presentation: return "presentation";
    case DeclKind::Sentence: return "sentence";
  }
  return "";
}

std::string truth_name(Truth t) {
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    case Truth::Unknown: return "unknown";
  }
  return "";
}

// A declared sentence name, or sentence text over the given signature.
Sentence sentence_over(const Document& d, const SigPtr& sig, const std::string& text) {
  Scope sc(sig);
  Sentence s = d.sentences.count(text) ? d.sentence(text) : parse_sentence(sc, text);
  check_sentence(s, sc);
  return s;
}

int world_of(const KripkeStructure& m, const std::string& w) {
  int i = m.world_index(w);
  if (i < 0) throw ResolveError("unknown world " + w);
  return i;
}

}  // namespace

PYBIND11_MODULE(_hwb, m) {
  m.doc() = "Bindings for the hwb hybrid-logic toolkit";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&]() { return py::object(py::exception<Error>(m, "HwbError")); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = error_type.get_stored();
      py::object inst = type(e.kind() + ": " + e.what());
      inst.attr("kind") = e.kind();
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line with the given arguments; returns (exit code, stdout, stderr).");
  m.def("builtin_corpus_dir", [] { return std::string(HWB_CORPUS_DIR); });
  m.def("scenario_names", &cli::scenario_names);
  m.def(
      "suite_paper",
      [](const std::string& corpus_dir, std::optional<std::string> only) {
        py::list out;
        for (const auto& r : cli::run_paper_suite(corpus_dir, only)) {
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["seconds"] = r.seconds;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("corpus_dir"), py::arg("only") = py::none());

  py::class_<Document>(m, "Document")
      .def(py::init([](const std::string& text) { return parse_document(text); }), py::arg("text"))
      .def_static(
          "load", [](const std::string& path) { return cli::load_document(path); }, py::arg("path"),
          "Loads a file, falling back to the bundled corpus for bare names.")
      .def(
          "names",
          [](const Document& d, const std::string& kind) {
            std::vector<std::string> out;
            for (const auto& e : d.order)
              if (kind_name(e.kind) == kind) out.push_back(e.name);
            return out;
          },
          py::arg("kind"))
      .def("text", [](const Document& d) { return print_document(d); })
      .def(
          "signature", [](const Document& d, const std::string& n) { return to_py(to_json(*d.signature(n))); },
          py::arg("name"))
      .def(
          "model", [](const Document& d, const std::string& n) { return to_py(to_json(d.model(n))); },
          py::arg("name"))
      .def(
          "criterion",
          [](const Document& d, const std::string& square) {
            return to_py(to_json(check_cip_criterion(d.square(square))));
          },
          py::arg("square"))
      .def(
          "morphism_criterion",
          [](const Document& d, const std::string& n) { return to_py(to_json(check_cip_criterion(d.morphism(n)))); },
          py::arg("name"))
      .def(
          "evaluate",
          [](const Document& d, const std::string& model, const std::string& sentence, const std::string& world) {
            const KripkeStructure& mm = d.model(model);
            return truth_name(truth({&mm, world_of(mm, world)}, sentence_over(d, mm.sig, sentence)));
          },
          py::arg("model"), py::arg("sentence"), py::arg("world"))
      .def(
          "holds_globally",
          [](const Document& d, const std::string& model, const std::string& sentence) {
            const KripkeStructure& mm = d.model(model);
            return satisfies_globally(mm, sentence_over(d, mm.sig, sentence));
          },
          py::arg("model"), py::arg("sentence"))
      .def(
          "reduct",
          [](const Document& d, const std::string& model, const std::string& morphism) {
            return to_py(to_json(reduct(d.morphism(morphism), d.model(model))));
          },
          py::arg("model"), py::arg("morphism"))
      .def(
          "quasi_isomorphic",
          [](const Document& d, const std::string& a, const std::string& b) {
            return quasi_isomorphic(d.model(a), d.model(b)).has_value();
          },
          py::arg("a"), py::arg("b"))
      .def(
          "entails",
          [](const Document& d, const std::string& presentation, const std::string& goal, int max_worlds,
             int max_carrier, const std::string& mode) {
            const Presentation& p = d.presentation(presentation);
            SearchBounds b;
            b.max_worlds = max_worlds;
            b.max_carrier = max_carrier;
            if (mode != "open" && mode != "closed") throw PreconditionFailed("mode must be open or closed");
            b.mode = mode == "closed" ? SearchMode::Closed : SearchMode::Open;
            b.validate(*p.sig);
            return to_py(to_json(entails(p.sig, p.sentences, sentence_over(d, p.sig, goal), b)));
          },
          py::arg("presentation"), py::arg("goal"), py::arg("max_worlds") = 2, py::arg("max_carrier") = 2,
          py::arg("mode") = "closed");
}
