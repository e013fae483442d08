#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "fixtures.hpp"
#include "scatterbd/graph.hpp"

using namespace scatterbd;

TEST(Relation, CanonicalForm) {
  Relation r(2, {{1, 0}, {0, 1}, {1, 0}});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(r.tuple(0)[0], 0);
  EXPECT_EQ(r, Relation(2, {{0, 1}, {1, 0}}));
  EXPECT_TRUE(Relation(0, {}).empty());
  EXPECT_EQ(Relation(0, {{}, {}}).size(), 1u);
}

TEST(Restrict, HornFixture) {
  auto s = fx::horn_dual();
  Constraint c{{1, 2, 3}, s.H};
  Constraint r = restrict_constraint(c, Assignment{{1, 1}}, *s.store);
  EXPECT_EQ(r.scope, (std::vector<VarId>{2, 3}));
  EXPECT_EQ(s.store->get(r.relation), Relation(2, {{0, 0}, {0, 1}, {1, 0}}));

  Constraint same = restrict_constraint(c, Assignment{}, *s.store);
  EXPECT_EQ(same.scope, c.scope);
  EXPECT_EQ(same.relation, c.relation);

  Constraint z = restrict_constraint(c, Assignment{{1, 0}, {2, 0}, {3, 0}}, *s.store);
  EXPECT_TRUE(z.scope.empty());
  EXPECT_EQ(s.store->get(z.relation), Relation(0, {{}}));
  Constraint o = restrict_constraint(c, Assignment{{1, 1}, {2, 1}, {3, 1}}, *s.store);
  EXPECT_TRUE(s.store->get(o.relation).empty());
}

TEST(Restrict, InstanceLevel) {
  auto s = fx::horn_dual();
  Instance I = fx::i_pair(s);
  Instance r = restrict_instance(I, Assignment{{3, 0}});
  ASSERT_EQ(r.constraints().size(), 2u);
  EXPECT_EQ(r.constraints()[0].scope, (std::vector<VarId>{1, 2}));
  EXPECT_EQ(r.constraints()[1].scope, (std::vector<VarId>{4, 5}));
  EXPECT_EQ(r.variables(), (VarSet{1, 2, 4, 5}));
  // x3 = 0 leaves H unconstrained and A as OR.
  EXPECT_EQ(r.relation_of(r.constraints()[0]), Relation::full(2, s.domain));
  EXPECT_EQ(r.relation_of(r.constraints()[1]), Relation(2, {{0, 1}, {1, 0}, {1, 1}}));
  Instance same = restrict_instance(I, {});
  EXPECT_EQ(same.variables(), I.variables());
}

TEST(Restrict, CompositionAndArity) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 400; ++iter) {
    const int D = 2 + static_cast<int>(rng() % 2);
    auto store = std::make_shared<RelationStore>();
    const int a = 1 + static_cast<int>(rng() % 4);
    Relation full = Relation::full(a, Domain{D});
    std::vector<std::vector<Value>> ts;
    for (std::size_t i = 0; i < full.size(); ++i)
      if (rng() % 2) ts.emplace_back(full.tuple(i).begin(), full.tuple(i).end());
    Constraint c;
    c.relation = store->intern(Relation(a, ts));
    for (int i = 0; i < a; ++i) c.scope.push_back(static_cast<VarId>(rng() % 4));
    Assignment alpha, beta;
    for (VarId v = 0; v < 4; ++v) {
      auto pick = rng() % 3;
      if (pick == 1) alpha.set(v, static_cast<Value>(rng() % static_cast<unsigned>(D)));
      if (pick == 2) beta.set(v, static_cast<Value>(rng() % static_cast<unsigned>(D)));
    }
    Constraint two = restrict_constraint(restrict_constraint(c, alpha, *store), beta, *store);
    Constraint one = restrict_constraint(c, alpha.merged(beta), *store);
    EXPECT_EQ(two.scope, one.scope);
    EXPECT_EQ(store->get(two.relation), store->get(one.relation));
    int assigned = 0;
    for (VarId x : c.scope) assigned += alpha.contains(x) ? 1 : 0;
    EXPECT_EQ(store->get(restrict_constraint(c, alpha, *store).relation).arity(), a - assigned);
  }
}

TEST(ArityGuard, Bounds) {
  auto s = fx::horn_dual();
  RelId r5 = s.store->intern(Relation::full(5, s.domain));
  RelId r4 = s.store->intern(Relation::full(4, s.domain));
  Instance I(s.domain, s.store);
  I.add_constraint({{1, 2, 3, 4, 5}, r5});
  auto v = arity_guard(I, 1, 3);
  EXPECT_FALSE(v.accepted);
  EXPECT_EQ(v.witness, 0);
  Instance J(s.domain, s.store);
  J.add_constraint({{1, 2, 3, 4}, r4});
  EXPECT_TRUE(arity_guard(J, 1, 3).accepted);
  EXPECT_TRUE(arity_guard(fx::i_pair(s), 0, 3).accepted);
  // Repeated variables count once.
  Instance K(s.domain, s.store);
  K.add_constraint({{1, 1, 2, 2, 3}, r5});
  EXPECT_TRUE(arity_guard(K, 0, 3).accepted);
}

TEST(Graph, IncidenceAndComponents) {
  auto s = fx::horn_dual();
  Instance I = fx::i_pair(s);
  IncidenceGraph g(I);
  EXPECT_EQ(g.num_vars(), 5);
  EXPECT_EQ(g.num_constraints(), 2);
  EXPECT_EQ(g.num_edges(), 6u);
  EXPECT_EQ(IncidenceGraph(Instance(s.domain, s.store)).num_vertices(), 0);
  Instance R(s.domain, s.store);
  R.add_constraint({{7, 7}, s.taut});
  EXPECT_EQ(IncidenceGraph(R).num_edges(), 1u);

  Components c = components(g, {3});
  ASSERT_EQ(c.count(), 2);
  EXPECT_EQ(c.constraints[0], (std::vector<int>{0}));
  EXPECT_EQ(c.variables[0], (VarSet{1, 2}));
  EXPECT_EQ(c.variables[1], (VarSet{4, 5}));
  EXPECT_EQ(components(g, {}).count(), 1);
  Components all = components(g, {1, 2, 3, 4, 5});
  EXPECT_EQ(all.count(), 2);
  EXPECT_TRUE(all.variables[0].empty());
}

TEST(Graph, ComponentPartitionProperty) {
  auto s = fx::horn_dual();
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    Instance I = fx::random_instance(s, rng, 8, 6, true);
    VarSet S;
    for (VarId v = 0; v < 8; ++v)
      if (rng() % 4 == 0) S.push_back(v);
    IncidenceGraph g(I);
    Components c = components(g, S);
    std::size_t total = 0;
    for (int k = 0; k < c.count(); ++k) total += c.constraints[k].size() + c.variables[k].size();
    EXPECT_EQ(total, I.variables().size() + I.constraints().size() - set_intersect(S, I.variables()).size());
  }
}

TEST(Gadget, Connecting) {
  auto s = fx::horn_dual();
  Instance I = fx::i_pair(s);
  std::vector<VarId> X{1, 4};
  Instance J = add_connecting_gadget(I, X);
  ASSERT_EQ(J.constraints().size(), 3u);
  EXPECT_TRUE(J.constraints()[2].gadget);
  EXPECT_EQ(J.constraints()[2].scope, (std::vector<VarId>{1, 4}));
  std::vector<VarId> one{2};
  EXPECT_EQ(add_connecting_gadget(I, one).constraints().size(), 2u);
  std::vector<VarId> three{1, 2, 5};
  Instance K = add_connecting_gadget(I, three);
  EXPECT_EQ(K.constraints().size(), 4u);
  EXPECT_EQ(K.constraints()[3].scope, (std::vector<VarId>{2, 5}));
  // X in one component even after deleting x3.
  Components c = components(IncidenceGraph(J), {3});
  IncidenceGraph gj(J);
  EXPECT_EQ(c.of[gj.var_vertex(1)], c.of[gj.var_vertex(4)]);
}

namespace {

BoundariedInstance bi(Instance I, std::vector<VarId> boundary) { return {std::move(I), std::move(boundary), {}}; }

// Isomorphism of small instances by trying every variable bijection.
bool isomorphic(const Instance& a, const Instance& b) {
  if (a.variables().size() != b.variables().size() || a.constraints().size() != b.constraints().size()) return false;
  std::vector<VarId> perm = b.variables();
  auto key = [](const Instance& I, const std::map<VarId, VarId>& m) {
    std::vector<std::pair<Relation, std::vector<VarId>>> out;
    for (auto& c : I.constraints()) {
      std::vector<VarId> sc;
      for (VarId x : c.scope) sc.push_back(m.at(x));
      out.push_back({I.relation_of(c), sc});
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  std::map<VarId, VarId> idb;
  for (VarId v : b.variables()) idb[v] = v;
  auto kb = key(b, idb);
  std::sort(perm.begin(), perm.end());
  do {
    std::map<VarId, VarId> m;
    for (std::size_t i = 0; i < perm.size(); ++i) m[a.variables()[i]] = perm[i];
    if (key(a, m) == kb) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST(Glue, Counts) {
  auto s = fx::horn_dual();
  Instance I1(s.domain, s.store), I2(s.domain, s.store);
  for (VarId v = 1; v <= 5; ++v) I1.add_variable(v);
  for (VarId v = 1; v <= 4; ++v) I2.add_variable(v);
  std::vector<std::pair<VarId, VarId>> mu{{1, 3}, {2, 4}};
  Instance G = glue(bi(I1, {1, 2}), bi(I2, {3, 4}), mu);
  EXPECT_EQ(G.variables().size(), 7u);

  Instance P = fx::i_pair(s);
  Instance B(s.domain, s.store);
  B.add_variable(9);
  std::vector<std::pair<VarId, VarId>> m1{{3, 9}};
  Instance G2 = glue(bi(P, {3}), bi(B, {9}), m1);
  EXPECT_EQ(G2.constraints().size(), 2u);
  EXPECT_EQ(G2.variables(), P.variables());

  Instance a(s.domain, s.store), b(s.domain, s.store);
  a.add_constraint({{1, 2}, s.taut});
  b.add_constraint({{5, 6}, s.taut});
  std::vector<std::pair<VarId, VarId>> m2{{2, 5}};
  Instance g2 = glue(bi(a, {2}), bi(b, {5}), m2);
  EXPECT_EQ(g2.constraints().size(), 2u);
  EXPECT_EQ(components(IncidenceGraph(g2), {}).count(), 1);

  std::vector<std::pair<VarId, VarId>> bad{{1, 3}, {1, 4}};
  EXPECT_THROW(glue(bi(I1, {1, 2}), bi(I2, {3, 4}), bad), Error);
}

TEST(Glue, AssociativeOnChains) {
  auto s = fx::horn_dual();
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 20; ++iter) {
    auto piece = [&](VarId base) {
      Instance I(s.domain, s.store);
      for (int c = 0; c < 2; ++c) {
        VarId x = base + static_cast<VarId>(rng() % 3), y = base + static_cast<VarId>(rng() % 3);
        I.add_constraint({{x, y}, (rng() % 2) ? s.taut : s.store->intern(Relation(2, {{0, 1}, {1, 0}}))});
      }
      for (VarId v = base; v < base + 3; ++v) I.add_variable(v);
      return I;
    };
    Instance A = piece(0), B = piece(10), C = piece(20);
    // A's 2 glued to B's 10, B's 12 glued to C's 20.
    std::vector<std::pair<VarId, VarId>> ab{{2, 10}}, bc{{12, 20}};
    GlueResult lr = glue_with_map(bi(A, {2}), bi(B, {10}), ab);
    std::vector<std::pair<VarId, VarId>> lbc{{lr.second_map.at(12), 20}};
    Instance left = glue(bi(lr.instance, {lr.second_map.at(12)}), bi(C, {20}), lbc);
    Instance bcg = glue(bi(B, {12}), bi(C, {20}), bc);
    Instance right = glue(bi(A, {2}), bi(bcg, {10}), ab);
    EXPECT_TRUE(isomorphic(left, right));
  }
}
