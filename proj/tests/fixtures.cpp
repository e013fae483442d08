#include "fixtures.hpp"

namespace fx {

Setting horn_dual() {
  Setting s;
  s.H = s.store->intern(horn_h());
  s.A = s.store->intern(dual_horn_a());
  s.taut = s.store->intern(Relation::full(2, s.domain));
  s.langs.push_back(builtin_language("horn3", s.domain, s.store));
  s.langs.push_back(builtin_language("dualhorn3", s.domain, s.store));
  return s;
}

Instance i_pair(const Setting& s) {
  Instance I(s.domain, s.store);
  for (VarId v = 1; v <= 5; ++v) I.add_variable(v);
  I.add_constraint({{1, 2, 3}, s.H});
  I.add_constraint({{3, 4, 5}, s.A});
  return I;
}

Instance chain(const Setting& s, int n) {
  Instance I(s.domain, s.store);
  for (VarId v = 1; v <= n; ++v) I.add_variable(v);
  for (VarId v = 1; v < n; ++v) I.add_constraint({{v, v + 1}, s.taut});
  return I;
}

Instance diamond(const Setting& s) {
  Instance I(s.domain, s.store);
  for (VarId v = 1; v <= 4; ++v) I.add_variable(v);
  I.add_constraint({{1, 2}, s.taut});
  I.add_constraint({{1, 3}, s.taut});
  I.add_constraint({{2, 4}, s.taut});
  I.add_constraint({{3, 4}, s.taut});
  return I;
}

Instance random_instance(const Setting& s, std::mt19937_64& rng, int nvars, int ncons, bool arbitrary) {
  Instance I(s.domain, s.store);
  for (VarId v = 0; v < nvars; ++v) I.add_variable(v);
  std::vector<RelId> pool;
  for (const auto& l : s.langs)
    for (RelId r : l.members())
      if (s.store->get(r).arity() >= 1) pool.push_back(r);
  for (int c = 0; c < ncons; ++c) {
    RelId rel;
    if (arbitrary && rng() % 3 == 0) {
      int a = 1 + static_cast<int>(rng() % 3);
      Relation full = Relation::full(a, s.domain);
      std::vector<std::vector<Value>> ts;
      for (std::size_t i = 0; i < full.size(); ++i)
        if (rng() % 4 != 0) ts.emplace_back(full.tuple(i).begin(), full.tuple(i).end());
      rel = s.store->intern(Relation(a, ts));
    } else {
      rel = pool[rng() % pool.size()];
    }
    Constraint con;
    con.relation = rel;
    for (int i = 0; i < s.store->get(rel).arity(); ++i) con.scope.push_back(static_cast<VarId>(rng() % static_cast<unsigned>(nvars)));
    I.add_constraint(con);
  }
  return I;
}

Instance random_graph(const Setting& s, std::mt19937_64& rng, int nvars, int nedges) {
  Instance I(s.domain, s.store);
  for (VarId v = 0; v < nvars; ++v) I.add_variable(v);
  for (int e = 0; e < nedges; ++e) {
    VarId a = static_cast<VarId>(rng() % static_cast<unsigned>(nvars));
    VarId b = static_cast<VarId>(rng() % static_cast<unsigned>(nvars));
    if (a == b) continue;
    I.add_constraint({{a, b}, s.taut});
  }
  return I;
}

}  // namespace fx
