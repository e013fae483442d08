#include "scatterbd/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace scatterbd {

using nlohmann::json;

std::optional<VarId> CspbDocument::find_var(std::string_view name) const {
  for (std::size_t i = 0; i < var_names.size(); ++i)
    if (var_names[i] == name) return static_cast<VarId>(i);
  return std::nullopt;
}

std::string CspbDocument::var_name(VarId v) const {
  if (v >= 0 && static_cast<std::size_t>(v) < var_names.size()) return var_names[static_cast<std::size_t>(v)];
  return "_" + std::to_string(v);
}

VarSet CspbDocument::vars_by_name(const std::vector<std::string>& names) const {
  std::unordered_map<std::string_view, VarId> index;
  for (std::size_t i = 0; i < var_names.size(); ++i) index.emplace(var_names[i], static_cast<VarId>(i));
  VarSet out;
  for (const auto& n : names) {
    auto it = index.find(n);
    if (it == index.end()) throw Error("unknown variable '" + n + "'");
    out.push_back(it->second);
  }
  return make_set(std::move(out));
}

std::vector<std::string> CspbDocument::names_of(const VarSet& xs) const {
  std::vector<std::string> out;
  for (VarId v : xs) out.push_back(var_name(v));
  return out;
}

namespace {

struct Token {
  enum Kind { word, number, punct } kind;
  std::string text;
};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'' || c == '@' || c == '-';
}

std::vector<Token> tokenize(std::string_view line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '{' || c == '}' || c == '(' || c == ')' || c == ',' || c == ';') {
      out.push_back({Token::punct, std::string(1, c)});
      ++i;
    } else if (word_char(c)) {
      std::size_t j = i;
      while (j < line.size() && word_char(line[j])) ++j;
      std::string w(line.substr(i, j - i));
      const bool num = std::all_of(w.begin(), w.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
      out.push_back({num ? Token::number : Token::word, w});
      i = j;
    } else {
      throw ParseError(lineno, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return word_char(c) && c != '@' && c != '-'; });
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line) : toks_(std::move(toks)), line_(line) {}

  bool done() const { return pos_ == toks_.size(); }
  const Token* peek() const { return done() ? nullptr : &toks_[pos_]; }
  bool peek_punct(char c) const { return peek() && peek()->kind == Token::punct && peek()->text[0] == c; }

  std::string word(const char* what) {
    if (done() || toks_[pos_].kind != Token::word) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }
  std::string name(const char* what) {
    std::string w = word(what);
    if (!valid_name(w)) fail("invalid name '" + w + "'");
    return w;
  }
  long number(const char* what) {
    if (done() || toks_[pos_].kind != Token::number) fail(std::string("expected ") + what);
    const std::string& t = toks_[pos_++].text;
    if (t.size() > 9) fail("number too large");
    return std::stol(t);
  }
  void punct(char c) {
    if (!peek_punct(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void end() {
    if (!done()) fail("unexpected '" + toks_[pos_].text + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg); }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

std::string tuple_text(std::span<const Value> t) {
  if (t.empty()) return "()";
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(t[i]);
  }
  return s;
}

}  // namespace

CspbDocument parse_cspb(std::string_view text, std::shared_ptr<RelationStore> store) {
  if (!store) store = std::make_shared<RelationStore>();
  CspbDocument doc;
  bool header = false;
  std::optional<Domain> domain;
  std::unordered_map<std::string, VarId> vars;
  std::unordered_map<std::string, int> rels;
  std::unordered_map<std::string, int> langs;
  int lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    auto toks = tokenize(line, lineno);
    if (toks.empty()) continue;
    LineParser p(std::move(toks), lineno);
    const std::string kw = p.word("a statement keyword");
    if (!header) {
      if (kw != "csp") p.fail("document must start with 'csp 1'");
      if (p.number("format version") != 1) p.fail("unsupported format version");
      p.end();
      header = true;
      continue;
    }
    if (kw == "domain") {
      if (domain) p.fail("domain declared twice");
      const long d = p.number("domain size");
      if (d < 1 || d > 1 << 16) p.fail("domain size out of range");
      p.end();
      domain = Domain{static_cast<int>(d)};
      doc.instance = Instance(*domain, store);
    } else if (!domain) {
      p.fail("'domain' must precede '" + kw + "'");
    } else if (kw == "var") {
      if (p.done()) p.fail("expected at least one variable name");
      while (!p.done()) {
        std::string n = p.name("variable name");
        if (vars.count(n)) p.fail("variable '" + n + "' declared twice");
        const VarId id = static_cast<VarId>(doc.var_names.size());
        vars.emplace(n, id);
        doc.var_names.push_back(n);
        doc.instance.add_variable(id);
      }
    } else if (kw == "rel") {
      std::string n = p.name("relation name");
      if (rels.count(n)) p.fail("relation '" + n + "' declared twice");
      const long arity = p.number("arity");
      if (arity > 64) p.fail("arity too large");
      p.punct('{');
      std::vector<std::vector<Value>> tuples;
      while (!p.peek_punct('}')) {
        std::vector<Value> t;
        if (p.peek_punct('(')) {
          p.punct('(');
          p.punct(')');
        } else {
          while (true) {
            const long v = p.number("tuple value");
            if (v >= domain->size) p.fail("value " + std::to_string(v) + " outside the domain");
            t.push_back(static_cast<Value>(v));
            if (!p.peek_punct(',')) break;
            p.punct(',');
          }
        }
        if (static_cast<long>(t.size()) != arity)
          p.fail("tuple of length " + std::to_string(t.size()) + " in relation of arity " + std::to_string(arity));
        tuples.push_back(std::move(t));
        if (!p.peek_punct(';')) break;
        p.punct(';');
      }
      p.punct('}');
      p.end();
      rels.emplace(n, static_cast<int>(doc.relations.size()));
      doc.relations.push_back({n, store->intern(Relation(static_cast<int>(arity), tuples))});
    } else if (kw == "lang") {
      std::string n = p.name("language name");
      if (langs.count(n)) p.fail("language '" + n + "' declared twice");
      LanguageDecl decl{n, {}};
      p.punct('{');
      while (!p.peek_punct('}')) {
        std::string m = p.word("language member");
        if (m[0] == '@') {
          try {
            builtin_relations(m.substr(1), *domain, *store);
          } catch (const ParseError&) {
            throw;
          } catch (const Error& e) {
            p.fail(e.what());
          }
        } else if (!rels.count(m)) {
          p.fail("unknown relation '" + m + "'");
        }
        decl.members.push_back(m);
        if (!p.peek_punct(',')) break;
        p.punct(',');
      }
      p.punct('}');
      p.end();
      langs.emplace(n, static_cast<int>(doc.languages.size()));
      doc.languages.push_back(std::move(decl));
    } else if (kw == "con") {
      std::string rn = p.word("relation name");
      auto it = rels.find(rn);
      if (it == rels.end()) p.fail("unknown relation '" + rn + "'");
      p.punct('(');
      std::vector<VarId> scope;
      while (!p.peek_punct(')')) {
        std::string vn = p.word("variable name");
        auto v = vars.find(vn);
        if (v == vars.end()) p.fail("unknown variable '" + vn + "'");
        scope.push_back(v->second);
        if (!p.peek_punct(',')) break;
        p.punct(',');
      }
      p.punct(')');
      p.end();
      const RelId rid = doc.relations[static_cast<std::size_t>(it->second)].id;
      if (store->get(rid).arity() != static_cast<int>(scope.size()))
        p.fail("relation '" + rn + "' has arity " + std::to_string(store->get(rid).arity()) + " but scope has " +
               std::to_string(scope.size()) + " variables");
      doc.instance.add_constraint({scope, rid});
      doc.constraint_relation.push_back(it->second);
    } else if (kw == "planted") {
      if (doc.planted) p.fail("planted declared twice");
      p.punct('{');
      VarSet xs;
      while (!p.peek_punct('}')) {
        std::string vn = p.word("variable name");
        auto v = vars.find(vn);
        if (v == vars.end()) p.fail("unknown variable '" + vn + "'");
        xs.push_back(v->second);
        if (!p.peek_punct(',')) break;
        p.punct(',');
      }
      p.punct('}');
      p.end();
      doc.planted = make_set(std::move(xs));
    } else {
      p.fail("unknown statement '" + kw + "'");
    }
  }
  if (!header) throw ParseError(lineno, "empty document");
  if (!domain) throw ParseError(lineno, "missing 'domain'");
  return doc;
}

std::string serialize_cspb(const CspbDocument& doc) {
  std::ostringstream os;
  os << "csp 1\n";
  os << "domain " << doc.instance.domain().size << "\n";
  for (std::size_t i = 0; i < doc.var_names.size(); i += 16) {
    os << "var";
    for (std::size_t j = i; j < std::min(i + 16, doc.var_names.size()); ++j) os << ' ' << doc.var_names[j];
    os << "\n";
  }
  for (const auto& r : doc.relations) {
    const Relation& rel = doc.instance.store().get(r.id);
    os << "rel " << r.name << ' ' << rel.arity() << " {";
    for (std::size_t i = 0; i < rel.size(); ++i) os << (i ? " ; " : " ") << tuple_text(rel.tuple(i));
    os << (rel.empty() ? "}" : " }") << "\n";
  }
  for (const auto& l : doc.languages) {
    os << "lang " << l.name << " {";
    for (std::size_t i = 0; i < l.members.size(); ++i) os << (i ? ", " : " ") << l.members[i];
    os << (l.members.empty() ? "}" : " }") << "\n";
  }
  const auto& cons = doc.instance.constraints();
  for (std::size_t i = 0; i < cons.size(); ++i) {
    os << "con " << doc.relations[static_cast<std::size_t>(doc.constraint_relation[i])].name << " (";
    for (std::size_t j = 0; j < cons[i].scope.size(); ++j) os << (j ? ", " : " ") << doc.var_name(cons[i].scope[j]);
    os << (cons[i].scope.empty() ? ")" : " )") << "\n";
  }
  if (doc.planted) {
    os << "planted {";
    for (std::size_t i = 0; i < doc.planted->size(); ++i) os << (i ? ", " : " ") << doc.var_name((*doc.planted)[i]);
    os << (doc.planted->empty() ? "}" : " }") << "\n";
  }
  return os.str();
}

CspbDocument read_cspb_file(const std::string& path, std::shared_ptr<RelationStore> store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cspb(ss.str(), std::move(store));
}

CspbDocument document_from_instance(const Instance& inst, std::vector<std::string> names,
                                    std::optional<VarSet> planted) {
  CspbDocument doc;
  doc.instance = Instance(inst.domain(), inst.store_ptr());
  const VarId top = inst.max_variable();
  if (static_cast<VarId>(names.size()) <= top) names.resize(static_cast<std::size_t>(top) + 1);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) names[i] = "x" + std::to_string(i);
    doc.instance.add_variable(static_cast<VarId>(i));
  }
  doc.var_names = std::move(names);
  std::map<RelId, int> seen;
  for (const auto& c : inst.constraints()) {
    auto [it, fresh] = seen.emplace(c.relation, static_cast<int>(doc.relations.size()));
    if (fresh) doc.relations.push_back({"r" + std::to_string(doc.relations.size()), c.relation});
    Constraint copy{c.scope, c.relation};
    doc.instance.add_constraint(copy);
    doc.constraint_relation.push_back(it->second);
  }
  doc.planted = std::move(planted);
  return doc;
}

LanguageList resolve_languages(const CspbDocument& doc, const std::vector<std::string>& specs, bool close) {
  const Domain& D = doc.instance.domain();
  const auto& store = doc.instance.store_ptr();
  LanguageList out;
  for (const auto& spec : specs) {
    if (spec.empty()) throw Error("empty language name");
    if (spec[0] == '@') {
      const std::string token = spec.substr(1);
      if (close) {
        out.push_back(builtin_language(token, D, store));
      } else {
        Language l(spec, D, store, builtin_relations(token, D, *store), false);
        l.set_capabilities(builtin_capabilities(token));
        out.push_back(std::move(l));
      }
      continue;
    }
    auto it = std::find_if(doc.languages.begin(), doc.languages.end(), [&](const auto& l) { return l.name == spec; });
    if (it == doc.languages.end()) throw Error("unknown language '" + spec + "'");
    std::vector<RelId> gens;
    for (const auto& m : it->members) {
      if (m[0] == '@') {
        auto g = builtin_relations(m.substr(1), D, *store);
        gens.insert(gens.end(), g.begin(), g.end());
      } else {
        auto r = std::find_if(doc.relations.begin(), doc.relations.end(), [&](const auto& d) { return d.name == m; });
        gens.push_back(r->id);
      }
    }
    Language l = close ? closure_star(spec, gens, D, store) : Language(spec, D, store, gens, false);
    if (it->members.size() == 1 && it->members[0][0] == '@') l.set_capabilities(builtin_capabilities(it->members[0].substr(1)));
    out.push_back(std::move(l));
  }
  return out;
}

json stats_json(const DetectStats& s) {
  return {{"nodes", s.nodes}, {"separators", s.separators}, {"gadgets", s.gadgets}, {"truncated", s.truncated}};
}

json detection_json(const CspbDocument& doc, const DetectionResult& r) {
  json j;
  j["status"] = to_string(r.status);
  if (r.found()) j["backdoor"] = doc.names_of(r.backdoor);
  j["stats"] = stats_json(r.stats);
  return j;
}

json verdict_json(const CspbDocument& doc, const BackdoorVerdict& v) {
  json j;
  j["status"] = v.ok ? "ok" : "violated";
  if (v.witness) {
    json tau = json::object();
    for (auto [x, val] : v.witness->tau.bindings()) tau[doc.var_name(x)] = val;
    json cons = json::array();
    for (int c : v.witness->constraints) cons.push_back("C" + std::to_string(c + 1));
    j["witness"] = {{"constraints", cons}, {"tau", tau}};
  }
  return j;
}

json evaluation_json(const CspbDocument& doc, const EvaluationReport& r) {
  json j;
  j["status"] = r.sat ? "sat" : "unsat";
  if (r.counting) j["count"] = r.count.str();
  j["backdoor"] = doc.names_of(r.backdoor);
  if (r.stats) j["stats"] = stats_json(*r.stats);
  return j;
}

const json& report_schema() {
  static const json schema = json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "sbd report",
  "type": "object",
  "required": ["status"],
  "additionalProperties": false,
  "properties": {
    "status": {"enum": ["found", "none", "none-budget", "ok", "violated", "sat", "unsat"]},
    "backdoor": {"type": "array", "items": {"type": "string"}},
    "witness": {
      "type": "object",
      "required": ["constraints", "tau"],
      "additionalProperties": false,
      "properties": {
        "constraints": {"type": "array", "items": {"type": "string", "pattern": "^C[1-9][0-9]*$"}},
        "tau": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}}
      }
    },
    "count": {"type": "string", "pattern": "^[0-9]+$"},
    "languages": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["name", "size", "members"],
        "properties": {
          "name": {"type": "string"},
          "size": {"type": "integer", "minimum": 0},
          "members": {"type": "array", "items": {"type": "string"}}
        }
      }
    },
    "stats": {
      "type": "object",
      "required": ["nodes", "separators", "gadgets", "truncated"],
      "additionalProperties": false,
      "properties": {
        "nodes": {"type": "integer", "minimum": 0},
        "separators": {"type": "integer", "minimum": 0},
        "gadgets": {"type": "integer", "minimum": 0},
        "truncated": {"type": "integer", "minimum": 0}
      }
    }
  }
})");
  return schema;
}

}  // namespace scatterbd
