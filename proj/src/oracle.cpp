#include "scatterbd/oracle.hpp"

#include <algorithm>

#include "scatterbd/separators.hpp"

namespace scatterbd {

namespace {

std::uint64_t binomial_prefix(std::uint64_t n, int k, std::uint64_t cap) {
  std::uint64_t total = 0, c = 1;
  for (int i = 0; i <= k && static_cast<std::uint64_t>(i) <= n; ++i) {
    total += c;
    if (total > cap) return cap + 1;
    c = c * (n - static_cast<std::uint64_t>(i)) / static_cast<std::uint64_t>(i + 1);
  }
  return total;
}

std::uint64_t power_or_cap(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

}  // namespace

std::optional<VarSet> oracle_detect(const Instance& inst, int k, const LanguageList& langs,
                                    const OracleBudget& budget) {
  const VarSet& vars = inst.variables();
  if (static_cast<int>(vars.size()) > budget.max_variables) throw OracleOverflow("oracle: too many variables");
  if (binomial_prefix(vars.size(), k, budget.max_subsets) > budget.max_subsets)
    throw OracleOverflow("oracle: too many subsets");
  const auto D = static_cast<std::uint64_t>(inst.domain().size);
  if (power_or_cap(D, static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), vars.size())),
                   budget.max_enumerations) > budget.max_enumerations)
    throw OracleOverflow("oracle: too many assignments");
  std::optional<VarSet> found;
  for_each_subset(vars, k, [&](const VarSet& x) {
    if (!verify_by_definition(inst, x, langs)) return false;
    found = x;
    return true;
  });
  return found;
}

std::vector<VarSet> oracle_important_separators(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, int k,
                                                const VarSet& undeletable, const VarSet& removed,
                                                const OracleBudget& budget) {
  VarSet pool;
  for (int v = 0; v < g.num_vars(); ++v) {
    VarId x = g.var_id(v);
    if (!set_contains(X, x) && !set_contains(Y, x) && !set_contains(undeletable, x) && !set_contains(removed, x))
      pool.push_back(x);
  }
  if (static_cast<int>(pool.size()) > budget.max_variables) throw OracleOverflow("oracle: too many variables");
  if (binomial_prefix(pool.size(), k, budget.max_subsets) > budget.max_subsets)
    throw OracleOverflow("oracle: too many subsets");

  // Every separator of size <= k, with its X-side reach.
  std::vector<std::pair<VarSet, std::vector<int>>> seps;
  for_each_subset(pool, k, [&](const VarSet& s) {
    if (disconnects(g, X, Y, s, removed)) seps.emplace_back(s, reach(g, X, s, removed).members);
    return false;
  });
  auto is_sep = [&](const VarSet& s) {
    return std::any_of(seps.begin(), seps.end(), [&](const auto& p) { return p.first == s; });
  };
  std::vector<VarSet> out;
  for (const auto& [s, r] : seps) {
    bool minimal = true;
    for (VarId u : s)
      if (is_sep(set_minus(s, {u}))) minimal = false;
    if (!minimal) continue;
    bool dominated = false;
    for (const auto& [t, rt] : seps)
      if (t.size() <= s.size() && rt.size() > r.size() && std::includes(rt.begin(), rt.end(), r.begin(), r.end()))
        dominated = true;
    if (!dominated) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const VarSet& a, const VarSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

BigInt oracle_count(const Instance& inst, const OracleBudget& budget) {
  const VarSet& vars = inst.variables();
  const int D = inst.domain().size;
  if (static_cast<int>(vars.size()) > budget.max_variables ||
      power_or_cap(static_cast<std::uint64_t>(D), vars.size(), budget.max_enumerations) > budget.max_enumerations)
    throw OracleOverflow("oracle: too many assignments");
  std::vector<Value> val(vars.size(), 0);
  std::vector<std::vector<std::size_t>> pos;
  for (const auto& c : inst.constraints()) {
    pos.emplace_back();
    for (VarId x : c.scope)
      pos.back().push_back(static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), x) - vars.begin()));
  }
  std::uint64_t count = 0;
  std::vector<Value> t;
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < pos.size() && ok; ++i) {
      t.clear();
      for (std::size_t p : pos[i]) t.push_back(val[p]);
      ok = inst.relation_of(inst.constraints()[i]).contains(t);
    }
    if (ok) ++count;
    std::size_t i = 0;
    while (i < val.size() && ++val[i] == D) val[i++] = 0;
    if (i == val.size()) break;
  }
  return BigInt(count);
}

bool oracle_decide(const Instance& inst, const OracleBudget& budget) { return oracle_count(inst, budget) > 0; }

}  // namespace scatterbd
