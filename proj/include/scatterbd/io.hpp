#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scatterbd/core.hpp"
#include "scatterbd/detect.hpp"
#include "scatterbd/forbidden.hpp"
#include "scatterbd/languages.hpp"
#include "scatterbd/solve.hpp"

namespace scatterbd {

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& msg) : Error("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

struct RelationDecl {
  std::string name;
  RelId id = -1;
};

struct LanguageDecl {
  std::string name;
  std::vector<std::string> members;  // relation names or @tokens, as written
};

// Variable ids are declaration positions.
struct CspbDocument {
  Instance instance;
  std::vector<std::string> var_names;
  std::vector<RelationDecl> relations;
  std::vector<int> constraint_relation;  // index into relations, per constraint
  std::vector<LanguageDecl> languages;
  std::optional<VarSet> planted;

  std::optional<VarId> find_var(std::string_view name) const;
  std::string var_name(VarId v) const;
  VarSet vars_by_name(const std::vector<std::string>& names) const;  // throws Error on unknown
  std::vector<std::string> names_of(const VarSet& xs) const;
};

CspbDocument parse_cspb(std::string_view text, std::shared_ptr<RelationStore> store = nullptr);
std::string serialize_cspb(const CspbDocument& doc);

CspbDocument read_cspb_file(const std::string& path, std::shared_ptr<RelationStore> store = nullptr);

// Document for a generated instance; relations are named r0, r1, ... in order
// of first use.
CspbDocument document_from_instance(const Instance& inst, std::vector<std::string> names,
                                    std::optional<VarSet> planted = std::nullopt);

// Each spec is a language declared in the document or a built-in @token.
// Closure to Γ* is applied unless close is false.
LanguageList resolve_languages(const CspbDocument& doc, const std::vector<std::string>& specs, bool close = true);

// ---- JSON reports ------------------------------------------------------------

nlohmann::json stats_json(const DetectStats& s);
nlohmann::json detection_json(const CspbDocument& doc, const DetectionResult& r);
nlohmann::json verdict_json(const CspbDocument& doc, const BackdoorVerdict& v);
nlohmann::json evaluation_json(const CspbDocument& doc, const EvaluationReport& r);

// JSON Schema (draft 2020-12) for every report above.
const nlohmann::json& report_schema();

}  // namespace scatterbd
