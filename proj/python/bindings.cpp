#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scatterbd/detect.hpp"
#include "scatterbd/gen.hpp"
#include "scatterbd/io.hpp"
#include "scatterbd/oracle.hpp"
#include "scatterbd/solve.hpp"

namespace py = pybind11;
using namespace scatterbd;

namespace {

struct Doc {
  CspbDocument doc;
};

LanguageList langs_of(const Doc& d, std::vector<std::string> specs, bool closure) {
  if (specs.empty())
    for (const auto& l : d.doc.languages) specs.push_back(l.name);
  if (specs.empty()) throw Error("no languages given and none declared");
  return resolve_languages(d.doc, specs, closure);
}

DetectConfig config(const std::string& mode, int threads, bool exhaustive) {
  DetectConfig cfg;
  if (exhaustive) cfg.replacement = ReplacementConfig::exhaustive();
  if (mode == "abstract") {
    cfg.replacement.mode = ReplacementMode::abstract;
  } else if (mode != "instance-derived") {
    throw Error("unknown mode '" + mode + "'");
  }
  cfg.threads = threads;
  return cfg;
}

std::string evaluate(const Doc& d, std::optional<int> k, std::optional<std::vector<std::string>> backdoor,
                     std::vector<std::string> langs, bool closure, bool counting) {
  auto L = langs_of(d, std::move(langs), closure);
  if (backdoor)
    return evaluation_json(d.doc, evaluate_with_backdoor(d.doc.instance, d.doc.vars_by_name(*backdoor), L, counting))
        .dump();
  if (!k) throw Error("pass k or backdoor");
  try {
    auto r = counting ? count(d.doc.instance, *k, L) : solve(d.doc.instance, *k, L);
    return evaluation_json(d.doc, r).dump();
  } catch (const NoBackdoor& e) {
    return detection_json(d.doc, e.result).dump();
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  // Later registrations are tried first, so the subclass goes last.
  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  py::class_<Doc>(m, "Document")
      .def_property_readonly("variables", [](const Doc& d) { return d.doc.var_names; })
      .def_property_readonly("num_constraints", [](const Doc& d) { return d.doc.instance.constraints().size(); })
      .def_property_readonly("domain", [](const Doc& d) { return d.doc.instance.domain().size; })
      .def_property_readonly("languages",
                             [](const Doc& d) {
                               std::vector<std::string> out;
                               for (const auto& l : d.doc.languages) out.push_back(l.name);
                               return out;
                             })
      .def_property_readonly("planted",
                             [](const Doc& d) -> std::optional<std::vector<std::string>> {
                               if (!d.doc.planted) return std::nullopt;
                               return d.doc.names_of(*d.doc.planted);
                             })
      .def("serialize", [](const Doc& d) { return serialize_cspb(d.doc); });

  m.def("parse", [](const std::string& text) { return Doc{parse_cspb(text)}; }, py::arg("text"));
  m.def("read", [](const std::string& path) { return Doc{read_cspb_file(path)}; }, py::arg("path"));

  m.def(
      "detect",
      [](const Doc& d, int k, std::vector<std::string> langs, bool closure, const std::string& mode, int threads,
         bool exhaustive) {
        auto L = langs_of(d, std::move(langs), closure);
        py::gil_scoped_release release;
        return detection_json(d.doc, detect_backdoor(d.doc.instance, k, L, config(mode, threads, exhaustive))).dump();
      },
      py::arg("doc"), py::arg("k"), py::arg("langs") = std::vector<std::string>{}, py::arg("closure") = true,
      py::arg("mode") = "instance-derived", py::arg("threads") = 1, py::arg("exhaustive") = false);

  m.def(
      "verify",
      [](const Doc& d, const std::vector<std::string>& backdoor, std::vector<std::string> langs, bool closure) {
        auto L = langs_of(d, std::move(langs), closure);
        return verdict_json(d.doc, verify_strong_backdoor(d.doc.instance, d.doc.vars_by_name(backdoor), L)).dump();
      },
      py::arg("doc"), py::arg("backdoor"), py::arg("langs") = std::vector<std::string>{}, py::arg("closure") = true);

  for (bool counting : {false, true})
    m.def(
        counting ? "count" : "solve",
        [counting](const Doc& d, std::optional<int> k, std::optional<std::vector<std::string>> backdoor,
                   std::vector<std::string> langs, bool closure) {
          return evaluate(d, k, std::move(backdoor), std::move(langs), closure, counting);
        },
        py::arg("doc"), py::arg("k") = py::none(), py::arg("backdoor") = py::none(),
        py::arg("langs") = std::vector<std::string>{}, py::arg("closure") = true);

  m.def("oracle_count", [](const Doc& d) { return oracle_count(d.doc.instance).str(); }, py::arg("doc"));
  m.def("oracle_decide", [](const Doc& d) { return oracle_decide(d.doc.instance); }, py::arg("doc"));
  m.def(
      "oracle_detect",
      [](const Doc& d, int k, std::vector<std::string> langs) -> std::optional<std::vector<std::string>> {
        auto z = oracle_detect(d.doc.instance, k, langs_of(d, std::move(langs), true));
        if (!z) return std::nullopt;
        return d.doc.names_of(*z);
      },
      py::arg("doc"), py::arg("k"), py::arg("langs") = std::vector<std::string>{});

  m.def(
      "generate",
      [](std::uint64_t seed, int blocks, int block_vars, int block_cons, int bridges, int noise_unaries,
         const std::vector<std::string>& tokens) {
        GenSpec spec{seed, blocks, block_vars, block_cons, bridges, noise_unaries, 2};
        spec.validate();
        auto store = std::make_shared<RelationStore>();
        LanguageList L;
        for (const auto& t : tokens) {
          if (t.empty() || t[0] != '@') throw Error("generate takes built-in @tokens");
          L.push_back(builtin_language(t.substr(1), Domain{2}, store));
        }
        Generated g = generate(spec, L);
        CspbDocument doc = document_from_instance(g.instance, g.names, g.planted);
        for (std::size_t i = 0; i < tokens.size(); ++i) doc.languages.push_back({"L" + std::to_string(i + 1), {tokens[i]}});
        return serialize_cspb(doc);
      },
      py::arg("seed") = 1, py::arg("blocks") = 2, py::arg("block_vars") = 10, py::arg("block_cons") = 12,
      py::arg("bridges") = 1, py::arg("noise_unaries") = 0,
      py::arg("langs") = std::vector<std::string>{"@horn3", "@dualhorn3"});

  m.def("schema", [] { return report_schema().dump(); });
}
