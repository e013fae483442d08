#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scatterbd/core.hpp"
#include "scatterbd/forbidden.hpp"
#include "scatterbd/separators.hpp"

namespace scatterbd {

enum class ReplacementMode { instance_derived, abstract };

struct ReplacementConfig {
  ReplacementMode mode = ReplacementMode::instance_derived;
  int gadget_cap = 512;
  int annotation_cap = -1;  // -1: k
  int marked_cap = 6;
  int abstract_vars = 1;    // fresh variables per gadget in abstract mode

  // Caps that never bind at desk scale.
  static ReplacementConfig exhaustive();
  void validate() const;
};

struct DetectStats {
  std::uint64_t nodes = 0;
  std::uint64_t separators = 0;
  std::uint64_t gadgets = 0;
  std::uint64_t truncated = 0;
  std::uint64_t monotonicity_violations = 0;
  std::uint64_t compress_calls = 0;
};

enum class DetectStatus { found, none_certified, none_budget };

std::string to_string(DetectStatus s);

struct DetectionResult {
  DetectStatus status = DetectStatus::none_certified;
  VarSet backdoor;  // meaningful when found
  DetectStats stats;

  bool found() const { return status == DetectStatus::found; }
};

// One classified tight sequence, as seen by full_algo.
struct TightAudit {
  const Instance* instance = nullptr;
  VarSet S, W1, W2;
  int lambda = 0;
  int ell = 0;
  std::vector<Separator> sequence;  // nearest W2 first
  std::vector<bool> good;
};

struct DetectConfig {
  ReplacementConfig replacement;
  int threads = 1;
  bool compression_shortcut = true;
  // Called from worker threads; must be thread-safe when threads > 1.
  std::function<void(const TightAudit&)> audit;
};

struct ExtInstance {
  Instance instance;
  int k = 0;
  VarSet S;
  VarSet W;

  // S ∩ W = ∅, W ∪ S a strong backdoor, |W ∪ S| ≤ 2k + rho. Throws Error.
  void validate(const LanguageList& langs) const;
};

struct SepInstance {
  ExtInstance ext;  // instance carries the gadget on W1
  VarSet W1;
  VarSet W2;

  // Installs the connecting gadget on W1; W2 := W \ W1.
  static SepInstance make(const ExtInstance& e, const VarSet& W1);
};

DetectionResult detect_backdoor(const Instance& inst, int k, const LanguageList& langs,
                                const DetectConfig& cfg = {});
DetectionResult sbd_compress(const Instance& inst, int k, const VarSet& X_old, const LanguageList& langs,
                             const DetectConfig& cfg = {});
DetectionResult ext_sbd_comp(const ExtInstance& e, const LanguageList& langs, const DetectConfig& cfg = {});
DetectionResult solve_nonseparating(const ExtInstance& e, const LanguageList& langs);
DetectionResult solve_separating(const SepInstance& si, const LanguageList& langs, const DetectConfig& cfg = {});

bool is_ell_good(const SepInstance& si, const VarSet& P, int ell, const LanguageList& langs);

struct FullAlgoResult {
  bool valid = false;
  VarSet candidates;
  bool truncated = false;
};
FullAlgoResult full_algo(const SepInstance& si, int lambda, int ell, const LanguageList& langs,
                         const DetectConfig& cfg = {});

struct ReplacementCandidate {
  BoundariedInstance gadget;                      // boundary P^r ∪ S, annotated Δ
  std::vector<std::pair<VarId, VarId>> delta;     // boundary bijection
};

struct ReplacementFamily {
  std::vector<ReplacementCandidate> members;
  bool truncated = false;
};

struct ReplacementQuery {
  VarSet S, W1, W2, P, Pr;
  int min_annotation = 0;
  int max_annotation = 0;
};

ReplacementFamily replacement_family(const Instance& inst, const ReplacementQuery& q, const LanguageList& langs,
                                     const ReplacementConfig& cfg);

struct Rule2Result {
  bool applicable = false;
  bool solvable = false;
  VarSet committed;    // Z'
  ExtInstance reduced; // (I[NR[W1,S]], k - |Z' \ S|, S, W2)
};
Rule2Result rule2_reduce(const SepInstance& si, const LanguageList& langs);

}  // namespace scatterbd
