#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "scatterbd/core.hpp"
#include "scatterbd/forbidden.hpp"
#include "scatterbd/graph.hpp"
#include "scatterbd/languages.hpp"

namespace scatterbd {

struct OracleBudget {
  int max_variables = 24;
  std::uint64_t max_enumerations = std::uint64_t{1} << 24;  // |D|^|X| per check
  std::uint64_t max_subsets = std::uint64_t{1} << 22;
};

class OracleOverflow : public Error {
 public:
  using Error::Error;
};

// Smallest backdoor, lexicographically first among those of that size.
std::optional<VarSet> oracle_detect(const Instance& inst, int k, const LanguageList& langs,
                                    const OracleBudget& budget = {});

// All important X-Y separators of size <= k straight from the definition.
std::vector<VarSet> oracle_important_separators(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, int k,
                                                const VarSet& undeletable = {}, const VarSet& removed = {},
                                                const OracleBudget& budget = {});

bool oracle_decide(const Instance& inst, const OracleBudget& budget = {});
BigInt oracle_count(const Instance& inst, const OracleBudget& budget = {});

// Calls f(subset) for every subset of `pool` of size <= k, by size then
// lexicographically; stops early when f returns true.
template <class F>
bool for_each_subset(const VarSet& pool, int k, F&& f) {
  const int n = static_cast<int>(pool.size());
  std::vector<int> idx;
  VarSet cur;
  for (int size = 0; size <= std::min(k, n); ++size) {
    idx.resize(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
      cur.clear();
      for (int i : idx) cur.push_back(pool[static_cast<std::size_t>(i)]);
      if (f(static_cast<const VarSet&>(cur))) return true;
      int i = size - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - size + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j) - 1] + 1;
    }
  }
  return false;
}

}  // namespace scatterbd
