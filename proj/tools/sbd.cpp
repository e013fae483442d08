#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <json.hpp>

#include "scatterbd/detect.hpp"
#include "scatterbd/forbidden.hpp"
#include "scatterbd/gen.hpp"
#include "scatterbd/io.hpp"
#include "scatterbd/languages.hpp"
#include "scatterbd/oracle.hpp"
#include "scatterbd/solve.hpp"

using namespace scatterbd;
using nlohmann::json;

namespace {

enum Exit { ok = 0, negative = 1, budget = 2, usage = 64, invalid = 65 };

struct Common {
  std::string file;
  std::vector<std::string> langs;
  bool no_closure = false;
  bool json = false;
  bool stats = false;
};

struct DetectOpts {
  int k = -1;
  std::string mode = "instance-derived";
  int gadget_cap = ReplacementConfig{}.gadget_cap;
  int annotation_cap = -1;
  int marked_cap = ReplacementConfig{}.marked_cap;
  int threads = 1;
  bool exhaustive = false;
};

void add_common(CLI::App* app, Common& c, bool reports = true) {
  app->add_option("file", c.file, "CSPB instance")->required()->check(CLI::ExistingFile);
  app->add_option("--langs", c.langs, "languages: names declared in the file or @tokens")->delimiter(',');
  app->add_flag("--no-closure", c.no_closure, "use languages exactly as declared");
  if (reports) app->add_flag("--json", c.json, "JSON report");
}

void add_detect(CLI::App* app, DetectOpts& d, bool need_k) {
  auto* k = app->add_option("-k", d.k, "backdoor size bound")->check(CLI::NonNegativeNumber);
  if (need_k) k->required();
  app->add_option("--mode", d.mode, "replacement mode")->check(CLI::IsMember({"instance-derived", "abstract"}));
  app->add_option("--gadget-cap", d.gadget_cap)->check(CLI::PositiveNumber);
  app->add_option("--annotation-cap", d.annotation_cap, "default: k")->check(CLI::NonNegativeNumber);
  app->add_option("--marked-cap", d.marked_cap)->check(CLI::NonNegativeNumber);
  app->add_flag("--exhaustive", d.exhaustive, "caps that never bind on small inputs");
  app->add_option("--threads", d.threads)->check(CLI::PositiveNumber);
}

DetectConfig detect_config(const DetectOpts& d) {
  DetectConfig cfg;
  if (d.exhaustive) {
    cfg.replacement = ReplacementConfig::exhaustive();
  } else {
    cfg.replacement.gadget_cap = d.gadget_cap;
    cfg.replacement.annotation_cap = d.annotation_cap;
    cfg.replacement.marked_cap = d.marked_cap;
  }
  cfg.replacement.mode = d.mode == "abstract" ? ReplacementMode::abstract : ReplacementMode::instance_derived;
  cfg.threads = d.threads;
  return cfg;
}

struct Loaded {
  CspbDocument doc;
  LanguageList langs;
};

Loaded load(const Common& c, bool need_langs = true) {
  Loaded l{read_cspb_file(c.file), {}};
  std::vector<std::string> specs = c.langs;
  if (specs.empty())
    for (const auto& decl : l.doc.languages) specs.push_back(decl.name);
  if (specs.empty() && need_langs) throw Error("no languages: pass --langs or declare 'lang' in the file");
  l.langs = resolve_languages(l.doc, specs, !c.no_closure);
  return l;
}

std::string join(const std::vector<std::string>& xs, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
  return s;
}

void print_stats(const DetectStats& s) {
  std::cout << "nodes " << s.nodes << "\nseparators " << s.separators << "\ngadgets " << s.gadgets << "\ntruncated "
            << s.truncated << "\n";
}

int status_exit(DetectStatus s) {
  switch (s) {
    case DetectStatus::found: return ok;
    case DetectStatus::none_certified: return negative;
    case DetectStatus::none_budget: return budget;
  }
  return negative;
}

int run_detect(const Common& c, const DetectOpts& d) {
  Loaded l = load(c);
  auto r = detect_backdoor(l.doc.instance, d.k, l.langs, detect_config(d));
  if (c.json) {
    std::cout << detection_json(l.doc, r).dump() << "\n";
  } else {
    std::cout << to_string(r.status);
    if (r.found()) std::cout << " " << join(l.doc.names_of(r.backdoor));
    std::cout << "\n";
    if (c.stats) print_stats(r.stats);
  }
  return status_exit(r.status);
}

int run_verify(const Common& c, const std::vector<std::string>& backdoor) {
  Loaded l = load(c);
  const VarSet X = l.doc.vars_by_name(backdoor);
  auto v = verify_strong_backdoor(l.doc.instance, X, l.langs);
  if (c.json) {
    std::cout << verdict_json(l.doc, v).dump() << "\n";
  } else if (v.ok) {
    std::cout << "ok\n";
  } else {
    std::cout << "violated";
    for (int i : v.witness->constraints) std::cout << " C" << i + 1;
    for (auto [x, val] : v.witness->tau.bindings()) std::cout << " " << l.doc.var_name(x) << "=" << val;
    std::cout << "\n";
  }
  return v.ok ? ok : negative;
}

int run_evaluate(const Common& c, const DetectOpts& d, const std::optional<std::vector<std::string>>& backdoor,
                 bool counting) {
  Loaded l = load(c);
  const Instance& I = l.doc.instance;
  EvaluationReport r;
  try {
    if (backdoor) {
      r = evaluate_with_backdoor(I, l.doc.vars_by_name(*backdoor), l.langs, counting);
    } else {
      r = counting ? count(I, d.k, l.langs, detect_config(d)) : solve(I, d.k, l.langs, detect_config(d));
    }
  } catch (const NoBackdoor& e) {
    if (c.json) {
      std::cout << detection_json(l.doc, e.result).dump() << "\n";
    } else {
      std::cout << to_string(e.result.status) << "\n";
      if (c.stats) print_stats(e.result.stats);
    }
    std::cerr << "sbd: " << e.what() << "\n";
    return status_exit(e.result.status);
  }
  if (c.json) {
    std::cout << evaluation_json(l.doc, r).dump() << "\n";
  } else {
    std::cout << (counting ? r.count.str() : std::string(r.sat ? "sat" : "unsat")) << "\n";
    if (c.stats && r.stats) print_stats(*r.stats);
  }
  return r.sat ? ok : negative;
}

int run_oracle(const std::string& what, const Common& c, int k) {
  Loaded l = load(c, what == "detect");
  const Instance& I = l.doc.instance;
  json j;
  int code = ok;
  if (what == "detect") {
    if (k < 0) throw CLI::RequiredError("-k");
    auto z = oracle_detect(I, k, l.langs);
    j["status"] = z ? "found" : "none";
    if (z) j["backdoor"] = l.doc.names_of(*z);
    code = z ? ok : negative;
    if (!c.json) std::cout << (z ? "found " + join(l.doc.names_of(*z)) : std::string("none")) << "\n";
  } else if (what == "decide") {
    const bool sat = oracle_decide(I);
    j["status"] = sat ? "sat" : "unsat";
    code = sat ? ok : negative;
    if (!c.json) std::cout << (sat ? "sat" : "unsat") << "\n";
  } else {
    const BigInt n = oracle_count(I);
    j["status"] = n > 0 ? "sat" : "unsat";
    j["count"] = n.str();
    code = n > 0 ? ok : negative;
    if (!c.json) std::cout << n.str() << "\n";
  }
  if (c.json) std::cout << j.dump() << "\n";
  return code;
}

int run_gen(const GenSpec& spec, const std::vector<std::string>& lang_tokens, const std::string& out) {
  spec.validate();
  auto store = std::make_shared<RelationStore>();
  LanguageList langs;
  for (const auto& t : lang_tokens) {
    if (t.empty() || t[0] != '@') throw Error("gen takes built-in @tokens only");
    langs.push_back(builtin_language(t.substr(1), Domain{spec.domain}, store));
  }
  Generated g = generate(spec, langs);
  CspbDocument doc = document_from_instance(g.instance, g.names, g.planted);
  // Declare the generating languages so the file is self-describing.
  for (std::size_t i = 0; i < lang_tokens.size(); ++i)
    doc.languages.push_back({"L" + std::to_string(i + 1), {lang_tokens[i]}});
  const std::string text = serialize_cspb(doc);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot write '" + out + "'");
    f << text;
  }
  return ok;
}

int run_closure(const std::vector<std::string>& tokens, int domain, bool as_json) {
  auto store = std::make_shared<RelationStore>();
  json arr = json::array();
  for (const auto& t : tokens) {
    if (t.empty() || t[0] != '@') throw Error("closure takes built-in @tokens");
    Language l = builtin_language(t.substr(1), Domain{domain}, store);
    std::vector<std::string> members;
    for (RelId r : l.members()) members.push_back(store->get(r).to_string());
    if (as_json) {
      arr.push_back({{"name", l.name()}, {"size", l.size()}, {"members", members}});
    } else {
      std::cout << l.name() << " " << l.size() << "\n";
      for (const auto& m : members) std::cout << "  " << m << "\n";
    }
  }
  if (as_json) std::cout << json{{"status", "ok"}, {"languages", arr}}.dump() << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strong backdoors into scattered constraint classes"};
  app.require_subcommand(1);

  Common common;
  DetectOpts dopts;
  std::vector<std::string> backdoor;

  auto* detect = app.add_subcommand("detect", "find a strong backdoor of size at most k");
  add_common(detect, common);
  add_detect(detect, dopts, true);
  detect->add_flag("--stats", common.stats, "print search statistics");

  auto* verify = app.add_subcommand("verify", "check a strong backdoor, printing a forbidden set if it fails");
  add_common(verify, common);
  verify->add_option("--backdoor", backdoor, "variable names")->delimiter(',')->required();

  CLI::App* eval[2];
  for (int i = 0; i < 2; ++i) {
    eval[i] = app.add_subcommand(i ? "count" : "solve", i ? "count solutions" : "decide satisfiability");
    add_common(eval[i], common);
    add_detect(eval[i], dopts, false);
    eval[i]->add_flag("--stats", common.stats, "print search statistics");
    auto* b = eval[i]->add_option("--backdoor", backdoor, "use this backdoor instead of detecting")->delimiter(',');
    eval[i]->get_option("-k")->excludes(b);
  }

  auto* oracle = app.add_subcommand("oracle", "brute-force reference answers");
  std::string oracle_what;
  int oracle_k = -1;
  oracle->add_option("what", oracle_what)->required()->check(CLI::IsMember({"detect", "decide", "count"}));
  add_common(oracle, common);
  oracle->add_option("-k", oracle_k)->check(CLI::NonNegativeNumber);

  auto* gen = app.add_subcommand("gen", "generate a planted instance");
  GenSpec spec;
  std::string out;
  std::vector<std::string> gen_langs{"@horn3", "@dualhorn3"};
  gen->add_option("--seed", spec.seed);
  gen->add_option("--blocks", spec.blocks);
  gen->add_option("--block-vars", spec.block_vars);
  gen->add_option("--block-cons", spec.block_cons);
  gen->add_option("--bridges", spec.bridges);
  gen->add_option("--noise-unaries", spec.noise_unaries);
  gen->add_option("--domain", spec.domain);
  gen->add_option("--langs", gen_langs, "built-in @tokens, one per block (cycled)")->delimiter(',');
  gen->add_option("-o,--output", out, "output file (default stdout)");

  auto* closure = app.add_subcommand("closure", "print the closure of built-in languages");
  std::vector<std::string> closure_langs;
  int closure_domain = 2;
  bool closure_json = false;
  closure->add_option("--langs", closure_langs)->delimiter(',')->required();
  closure->add_option("--domain", closure_domain)->check(CLI::PositiveNumber);
  closure->add_flag("--json", closure_json);

  auto* schema = app.add_subcommand("schema", "print the JSON Schema of all reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  std::erase(backdoor, std::string());  // --backdoor "" is the empty set

  try {
    if (*detect) return run_detect(common, dopts);
    if (*verify) return run_verify(common, backdoor);
    for (int i = 0; i < 2; ++i) {
      if (!*eval[i]) continue;
      const bool has_b = eval[i]->count("--backdoor") > 0;
      if (!has_b && dopts.k < 0) {
        std::cerr << "sbd: " << eval[i]->get_name() << " needs -k or --backdoor\n";
        return usage;
      }
      return run_evaluate(common, dopts, has_b ? std::optional(backdoor) : std::nullopt, i == 1);
    }
    if (*oracle) return run_oracle(oracle_what, common, oracle_k);
    if (*gen) return run_gen(spec, gen_langs, out);
    if (*closure) return run_closure(closure_langs, closure_domain, closure_json);
    if (*schema) {
      std::cout << report_schema().dump(2) << "\n";
      return ok;
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "sbd: " << e.what() << "\n";
    return usage;
  } catch (const OracleOverflow& e) {
    std::cerr << "sbd: " << e.what() << "\n";
    return budget;
  } catch (const Error& e) {
    std::cerr << "sbd: " << e.what() << "\n";
    return invalid;
  }
  return usage;
}
