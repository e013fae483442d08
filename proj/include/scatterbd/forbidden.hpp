#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "scatterbd/core.hpp"
#include "scatterbd/graph.hpp"
#include "scatterbd/languages.hpp"

namespace scatterbd {

using LanguageList = std::vector<Language>;

struct ForbiddenWitness {
  std::vector<int> constraints;  // positions in the instance, ascending
  Assignment tau;                // over S ∩ var(constraints)
  int component = -1;
};

struct BackdoorVerdict {
  bool ok = true;
  std::optional<ForbiddenWitness> witness;
};

// Certificate search with a per-relation cache of violation masks: bit i of
// mask(R, pattern) is set iff R restricted by pattern is outside langs[i].
// Safe to share between threads.
class ForbiddenChecker {
 public:
  explicit ForbiddenChecker(const LanguageList& langs);
  ~ForbiddenChecker();
  ForbiddenChecker(const ForbiddenChecker&) = delete;
  ForbiddenChecker& operator=(const ForbiddenChecker&) = delete;

  const LanguageList& languages() const { return langs_; }
  int d() const { return static_cast<int>(langs_.size()); }
  std::uint32_t full_mask() const { return (std::uint32_t{1} << langs_.size()) - 1; }

  std::uint32_t mask(const Instance& inst, const Constraint& c, const Assignment& tau) const;
  std::uint32_t mask(const Instance& inst, RelId rel, std::span<const Value> pattern) const;

  std::optional<Assignment> is_j_forbidden(const Instance& inst, std::span<const int> cons, std::uint32_t J,
                                           const VarSet& S) const;
  std::optional<ForbiddenWitness> find_forbidden_set(const Instance& inst, const VarSet& S) const;
  // Search restricted to one component of B_S.
  std::optional<ForbiddenWitness> find_in_component(const Instance& inst, std::span<const int> cons,
                                                    const VarSet& S) const;
  BackdoorVerdict verify(const Instance& inst, const VarSet& X) const;

 private:
  struct Table;
  Table* table_for(const Instance& inst, RelId rel) const;
  std::uint32_t compute(const Relation& r, std::span<const Value> pattern) const;

  LanguageList langs_;
  int domain_size_;
  std::shared_ptr<RelationStore> store_;
  static constexpr std::size_t kSegBits = 10;
  static constexpr std::size_t kSegSize = std::size_t{1} << kSegBits;
  static constexpr std::size_t kSegments = 4096;
  mutable std::mutex mu_;
  mutable std::array<std::atomic<std::atomic<Table*>*>, kSegments> segs_{};
};

std::optional<Assignment> is_j_forbidden(const Instance& inst, std::span<const int> cons, std::uint32_t J,
                                         const VarSet& S, const LanguageList& langs);
std::optional<ForbiddenWitness> find_forbidden_set(const Instance& inst, const VarSet& S, const LanguageList& langs);
BackdoorVerdict verify_strong_backdoor(const Instance& inst, const VarSet& X, const LanguageList& langs);

// Definition-level check: every total assignment of X leaves components each
// inside a single language.
bool verify_by_definition(const Instance& inst, const VarSet& X, const LanguageList& langs);

struct PruneResult {
  Instance instance;
  VarSet W;                  // W restricted to the surviving part
  std::vector<int> kept;     // positions of surviving constraints
};

// Deletes every component of B_S without a forbidden set. With check_w set,
// throws std::logic_error if a surviving component misses W.
PruneResult rule1_prune(const Instance& inst, const VarSet& S, const VarSet& W, const ForbiddenChecker& chk,
                        bool check_w = true);
PruneResult rule1_prune(const Instance& inst, const VarSet& S, const VarSet& W, const LanguageList& langs);

}  // namespace scatterbd
