#pragma once

#include <optional>
#include <vector>

#include "scatterbd/core.hpp"
#include "scatterbd/detect.hpp"
#include "scatterbd/forbidden.hpp"
#include "scatterbd/languages.hpp"

namespace scatterbd {

struct ComponentReport {
  std::vector<int> constraints;  // positions in I|α
  int language = -1;             // index into langs
  bool sat = false;
  BigInt count = 0;
};

struct AssignmentReport {
  Assignment alpha;
  std::vector<ComponentReport> components;
  int free_variables = 0;  // unassigned and in no constraint of I|α
  bool sat = false;
  BigInt cost = 0;
};

struct EvaluationReport {
  bool counting = false;
  bool sat = false;
  BigInt count = 0;  // counting only
  VarSet backdoor;
  std::vector<AssignmentReport> breakdown;
  std::optional<DetectStats> stats;
};

// Raised by solve/count when detection does not produce a backdoor.
class NoBackdoor : public Error {
 public:
  NoBackdoor(const std::string& what, DetectionResult r) : Error(what), result(std::move(r)) {}
  DetectionResult result;
};

EvaluationReport evaluate_with_backdoor(const Instance& inst, const VarSet& X, const LanguageList& langs,
                                        bool counting, bool keep_breakdown = false);

bool solve_with_backdoor(const Instance& inst, const VarSet& X, const LanguageList& langs);
BigInt count_with_backdoor(const Instance& inst, const VarSet& X, const LanguageList& langs);

EvaluationReport solve(const Instance& inst, int k, const LanguageList& langs, const DetectConfig& cfg = {});
EvaluationReport count(const Instance& inst, int k, const LanguageList& langs, const DetectConfig& cfg = {});

}  // namespace scatterbd
