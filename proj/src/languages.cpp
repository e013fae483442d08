#include "scatterbd/languages.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <unordered_map>

#include "scatterbd/graph.hpp"

namespace scatterbd {

Language::Language(std::string name, Domain domain, std::shared_ptr<RelationStore> store, std::vector<RelId> members,
                   bool closed)
    : name_(std::move(name)), domain_(domain), store_(std::move(store)), closed_(closed) {
  std::sort(members.begin(), members.end(), [&](RelId a, RelId b) { return store_->get(a) < store_->get(b); });
  members.erase(std::unique(members.begin(), members.end()), members.end());
  members_ = std::move(members);
  for (RelId id : members_) {
    const Relation& r = store_->get(id);
    if (r.max_value() >= domain_.size) throw Error("relation value outside the language domain");
    set_.insert(r);
    max_arity_ = std::max(max_arity_, r.arity());
  }
}

Language closure_star(const std::string& name, const std::vector<RelId>& gamma, const Domain& domain,
                      std::shared_ptr<RelationStore> store) {
  std::vector<RelId> members;
  std::unordered_set<RelId> seen;
  std::deque<RelId> queue;
  auto push = [&](RelId id) {
    if (seen.insert(id).second) {
      members.push_back(id);
      queue.push_back(id);
    }
  };
  for (RelId id : gamma) push(id);
  push(store->intern(Relation::full(2, domain)));
  while (!queue.empty()) {
    Relation r = store->get(queue.front());
    queue.pop_front();
    std::vector<Value> pattern(static_cast<std::size_t>(r.arity()), -1);
    for (int i = 0; i < r.arity(); ++i) {
      for (Value a = 0; a < domain.size; ++a) {
        pattern[static_cast<std::size_t>(i)] = a;
        push(store->intern(r.restrict(pattern)));
      }
      pattern[static_cast<std::size_t>(i)] = -1;
    }
  }
  return Language(name, domain, std::move(store), std::move(members), true);
}

Language closure_star(const Language& lang) {
  Language out = closure_star(lang.name(), lang.members(), lang.domain(), lang.store_ptr());
  out.set_capabilities(lang.capabilities());
  return out;
}

std::vector<RelId> closure_audit(const Language& lang) {
  std::vector<RelId> bad;
  for (RelId id : lang.members()) {
    const Relation& r = lang.store_ptr()->get(id);
    std::vector<Value> pattern(static_cast<std::size_t>(r.arity()), -1);
    bool ok = true;
    for (int i = 0; i < r.arity() && ok; ++i) {
      for (Value a = 0; a < lang.domain().size && ok; ++a) {
        pattern[static_cast<std::size_t>(i)] = a;
        ok = lang.contains(r.restrict(pattern));
      }
      pattern[static_cast<std::size_t>(i)] = -1;
    }
    if (!ok) bad.push_back(id);
  }
  return bad;
}

namespace {

std::vector<std::vector<Value>> tuples_of(const Relation& r) {
  std::vector<std::vector<Value>> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    auto t = r.tuple(i);
    out.emplace_back(t.begin(), t.end());
  }
  return out;
}

template <class Op>
bool closed_binary(const Relation& r, Op op) {
  auto ts = tuples_of(r);
  std::vector<Value> u(static_cast<std::size_t>(r.arity()));
  for (auto& a : ts)
    for (auto& b : ts) {
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = op(a[i], b[i]);
      if (!r.contains(u)) return false;
    }
  return true;
}

bool closed_majority(const Relation& r) {
  auto ts = tuples_of(r);
  std::vector<Value> u(static_cast<std::size_t>(r.arity()));
  for (auto& a : ts)
    for (auto& b : ts)
      for (auto& c : ts) {
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = (a[i] == b[i] || a[i] == c[i]) ? a[i] : b[i] == c[i] ? b[i] : a[i];
        if (!r.contains(u)) return false;
      }
  return true;
}

// Closure under x^y^z for all triples; fixing one tuple as a pivot suffices.
bool closed_affine(const Relation& r) {
  if (r.empty()) return true;
  auto ts = tuples_of(r);
  const auto& p = ts.front();
  std::vector<Value> u(static_cast<std::size_t>(r.arity()));
  for (auto& a : ts)
    for (auto& b : ts) {
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = a[i] ^ b[i] ^ p[i];
      if (!r.contains(u)) return false;
    }
  return true;
}

bool min_closed(const Relation& r) { return closed_binary(r, [](Value a, Value b) { return std::min(a, b); }); }
bool max_closed(const Relation& r) { return closed_binary(r, [](Value a, Value b) { return std::max(a, b); }); }

}  // namespace

SchaeferProfile classify_schaefer(const Relation& r) {
  if (r.max_value() > 1) throw Error("Schaefer classification needs a Boolean domain");
  SchaeferProfile p;
  std::vector<Value> zeros(static_cast<std::size_t>(r.arity()), 0), ones(static_cast<std::size_t>(r.arity()), 1);
  p.zero_valid = r.contains(zeros);
  p.one_valid = r.contains(ones);
  p.horn = min_closed(r);
  p.dual_horn = max_closed(r);
  p.bijunctive = closed_majority(r);
  p.affine = closed_affine(r);
  return p;
}

SchaeferProfile classify_schaefer(const Language& lang) {
  if (lang.domain().size != 2) throw Error("Schaefer classification needs a Boolean domain");
  SchaeferProfile acc;
  for (RelId id : lang.members()) {
    SchaeferProfile p = classify_schaefer(lang.store_ptr()->get(id));
    acc.zero_valid = acc.zero_valid && p.zero_valid;
    acc.one_valid = acc.one_valid && p.one_valid;
    acc.bijunctive = acc.bijunctive && p.bijunctive;
    acc.horn = acc.horn && p.horn;
    acc.dual_horn = acc.dual_horn && p.dual_horn;
    acc.affine = acc.affine && p.affine;
  }
  return acc;
}

Relation horn_h() {
  std::vector<std::vector<Value>> ts;
  for (int m = 0; m < 7; ++m) ts.push_back({(m >> 2) & 1, (m >> 1) & 1, m & 1});
  return Relation(3, ts);
}

Relation dual_horn_a() {
  std::vector<std::vector<Value>> ts;
  for (int m = 1; m < 8; ++m) ts.push_back({(m >> 2) & 1, (m >> 1) & 1, m & 1});
  return Relation(3, ts);
}

namespace {

void require_boolean(const std::string& token, const Domain& d) {
  if (d.size != 2) throw Error("@" + token + " is only defined over the Boolean domain");
}

std::vector<RelId> all_relations(int arity, const Domain& d, RelationStore& store) {
  Relation full = Relation::full(arity, d);
  std::vector<RelId> out;
  const std::size_t n = full.size();
  if (n > 16) throw Error("too many tuples to enumerate all relations");
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    std::vector<std::vector<Value>> ts;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1u) ts.emplace_back(full.tuple(i).begin(), full.tuple(i).end());
    out.push_back(store.intern(Relation(arity, ts)));
  }
  return out;
}

}  // namespace

std::vector<RelId> builtin_relations(const std::string& token, const Domain& d, RelationStore& store) {
  std::vector<RelId> out;
  if (token == "unary") return all_relations(1, d, store);
  if (token == "units") {
    for (Value a = 0; a < d.size; ++a) out.push_back(store.intern(Relation(1, {{a}})));
    return out;
  }
  if (token == "taut2") return {store.intern(Relation::full(2, d))};
  if (token == "horn3" || token == "dualhorn3") {
    require_boolean(token, d);
    out = all_relations(1, d, store);
    out.push_back(store.intern(token == "horn3" ? horn_h() : dual_horn_a()));
    return out;
  }
  if (token == "twosat") {
    require_boolean(token, d);
    for (int a = 0; a <= 2; ++a) {
      auto rs = all_relations(a, d, store);
      out.insert(out.end(), rs.begin(), rs.end());
    }
    return out;
  }
  if (token == "affine3") {
    require_boolean(token, d);
    for (int a = 1; a <= 3; ++a)
      for (int c = 0; c < 2; ++c) {
        std::vector<std::vector<Value>> ts;
        for (int m = 0; m < (1 << a); ++m) {
          if (__builtin_popcount(static_cast<unsigned>(m)) % 2 != c) continue;
          std::vector<Value> t;
          for (int i = a - 1; i >= 0; --i) t.push_back((m >> i) & 1);
          ts.push_back(t);
        }
        out.push_back(store.intern(Relation(a, ts)));
      }
    return out;
  }
  throw Error("unknown language token @" + token);
}

Capabilities builtin_capabilities(const std::string& token) {
  if (token == "horn3" || token == "unary" || token == "units" || token == "taut2") return {SolverKind::horn, false};
  if (token == "dualhorn3") return {SolverKind::dual_horn, false};
  if (token == "twosat") return {SolverKind::bijunctive, false};
  if (token == "affine3") return {SolverKind::affine, true};
  return {};
}

Language builtin_language(const std::string& token, const Domain& d, std::shared_ptr<RelationStore> store) {
  auto gens = builtin_relations(token, d, *store);
  Language l = closure_star("@" + token, gens, d, std::move(store));
  l.set_capabilities(builtin_capabilities(token));
  return l;
}

// ---- component solvers --------------------------------------------------

namespace {

void check_membership(const Instance& inst, const Language& lang) {
  if (inst.domain().size != lang.domain().size) throw Error("instance and language domains differ");
  for (const auto& c : inst.constraints())
    if (!lang.contains(inst.relation_of(c)))
      throw Error("constraint relation " + inst.relation_of(c).to_string() + " is not in language " + lang.name());
}

bool satisfied(const Instance& inst, const std::vector<Value>& val, const IncidenceGraph& g) {
  std::vector<Value> t;
  for (const auto& c : inst.constraints()) {
    t.clear();
    for (VarId x : c.scope) t.push_back(val[static_cast<std::size_t>(g.var_vertex(x))]);
    if (!inst.relation_of(c).contains(t)) return false;
  }
  return true;
}

// Generalized arc consistency followed by the pointwise min (or max)
// assignment, which is a solution for min-closed (max-closed) relations.
std::optional<bool> lattice_decide(const Instance& inst, bool use_max) {
  const int D = inst.domain().size;
  if (D > 63) return std::nullopt;
  IncidenceGraph g(inst);
  const int n = g.num_vars();
  const std::uint64_t all = (std::uint64_t{1} << D) - 1;
  std::vector<std::uint64_t> dom(static_cast<std::size_t>(n), all);
  const auto& cs = inst.constraints();
  std::deque<int> work;
  std::vector<char> queued(cs.size(), 1);
  for (std::size_t c = 0; c < cs.size(); ++c) work.push_back(static_cast<int>(c));
  std::vector<int> pos;
  std::vector<std::uint64_t> support;
  while (!work.empty()) {
    int c = work.front();
    work.pop_front();
    queued[static_cast<std::size_t>(c)] = 0;
    const Constraint& con = cs[static_cast<std::size_t>(c)];
    const Relation& r = inst.relation_of(con);
    if (r.arity() == 0) {
      if (r.empty()) return false;
      continue;
    }
    pos.assign(con.scope.size(), 0);
    for (std::size_t i = 0; i < con.scope.size(); ++i) pos[i] = g.var_vertex(con.scope[i]);
    support.assign(static_cast<std::size_t>(n > 0 ? 1 : 0), 0);
    std::unordered_map<int, std::uint64_t> sup;
    for (std::size_t ti = 0; ti < r.size(); ++ti) {
      auto t = r.tuple(ti);
      bool ok = true;
      for (std::size_t i = 0; i < t.size() && ok; ++i) {
        if (!(dom[static_cast<std::size_t>(pos[i])] >> t[i] & 1)) ok = false;
        for (std::size_t j = 0; j < i && ok; ++j)
          if (pos[j] == pos[i] && t[j] != t[i]) ok = false;
      }
      if (!ok) continue;
      for (std::size_t i = 0; i < t.size(); ++i) sup[pos[i]] |= std::uint64_t{1} << t[i];
    }
    for (int p : pos) {
      std::uint64_t nd = dom[static_cast<std::size_t>(p)] & sup[p];
      if (nd == dom[static_cast<std::size_t>(p)]) continue;
      if (nd == 0) return false;
      dom[static_cast<std::size_t>(p)] = nd;
      for (int cv : g.neighbors(p)) {
        int ci = g.constraint_index(cv);
        if (ci != c && !queued[static_cast<std::size_t>(ci)]) {
          queued[static_cast<std::size_t>(ci)] = 1;
          work.push_back(ci);
        }
      }
    }
  }
  std::vector<Value> val(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    std::uint64_t d = dom[static_cast<std::size_t>(v)];
    val[static_cast<std::size_t>(v)] = use_max ? 63 - __builtin_clzll(d) : __builtin_ctzll(d);
  }
  if (satisfied(inst, val, g)) return true;
  return std::nullopt;  // relations were not lattice-closed after all
}

// 2-SAT over the binary projections of each constraint.
std::optional<bool> bijunctive_decide(const Instance& inst) {
  if (inst.domain().size != 2) return std::nullopt;
  IncidenceGraph g(inst);
  const int n = g.num_vars();
  const int L = 2 * n;  // literal 2v+b means "v = b"
  std::vector<std::vector<int>> imp(static_cast<std::size_t>(L));
  auto clause = [&](int a, int b) {  // a or b
    imp[static_cast<std::size_t>(a ^ 1)].push_back(b);
    imp[static_cast<std::size_t>(b ^ 1)].push_back(a);
  };
  for (const auto& c : inst.constraints()) {
    const Relation& r = inst.relation_of(c);
    if (r.empty()) return false;
    const int a = r.arity();
    for (int i = 0; i < a; ++i) {
      int vi = g.var_vertex(c.scope[static_cast<std::size_t>(i)]);
      bool has[2] = {false, false};
      for (std::size_t t = 0; t < r.size(); ++t) has[r.tuple(t)[static_cast<std::size_t>(i)]] = true;
      for (int x = 0; x < 2; ++x)
        if (!has[x]) clause(2 * vi + (1 - x), 2 * vi + (1 - x));
      for (int j = i + 1; j < a; ++j) {
        int vj = g.var_vertex(c.scope[static_cast<std::size_t>(j)]);
        bool pair[2][2] = {{false, false}, {false, false}};
        for (std::size_t t = 0; t < r.size(); ++t)
          pair[r.tuple(t)[static_cast<std::size_t>(i)]][r.tuple(t)[static_cast<std::size_t>(j)]] = true;
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) {
            if (pair[x][y]) continue;
            if (vi == vj) {
              if (x == y) clause(2 * vi + (1 - x), 2 * vi + (1 - x));
            } else {
              clause(2 * vi + (1 - x), 2 * vj + (1 - y));
            }
          }
      }
    }
  }
  // Iterative Tarjan.
  std::vector<int> index(static_cast<std::size_t>(L), -1), low(static_cast<std::size_t>(L), 0),
      comp(static_cast<std::size_t>(L), -1);
  std::vector<char> on(static_cast<std::size_t>(L), 0);
  std::vector<int> st;
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0, ncomp = 0;
  for (int s = 0; s < L; ++s) {
    if (index[static_cast<std::size_t>(s)] >= 0) continue;
    call.push_back({s, 0});
    index[static_cast<std::size_t>(s)] = low[static_cast<std::size_t>(s)] = counter++;
    st.push_back(s);
    on[static_cast<std::size_t>(s)] = 1;
    while (!call.empty()) {
      auto& [u, it] = call.back();
      auto& out = imp[static_cast<std::size_t>(u)];
      if (it < out.size()) {
        int w = out[it++];
        if (index[static_cast<std::size_t>(w)] < 0) {
          index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
          st.push_back(w);
          on[static_cast<std::size_t>(w)] = 1;
          call.push_back({w, 0});
        } else if (on[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(u)] = std::min(low[static_cast<std::size_t>(u)], index[static_cast<std::size_t>(w)]);
        }
        continue;
      }
      int done = u;
      if (low[static_cast<std::size_t>(done)] == index[static_cast<std::size_t>(done)]) {
        while (true) {
          int w = st.back();
          st.pop_back();
          on[static_cast<std::size_t>(w)] = 0;
          comp[static_cast<std::size_t>(w)] = ncomp;
          if (w == done) break;
        }
        ++ncomp;
      }
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().first;
        low[static_cast<std::size_t>(parent)] = std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(done)]);
      }
    }
  }
  std::vector<Value> val(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    if (comp[static_cast<std::size_t>(2 * v)] == comp[static_cast<std::size_t>(2 * v + 1)]) return false;
    // Tarjan numbers components in reverse topological order.
    val[static_cast<std::size_t>(v)] = comp[static_cast<std::size_t>(2 * v + 1)] < comp[static_cast<std::size_t>(2 * v)] ? 1 : 0;
  }
  if (satisfied(inst, val, g)) return true;
  return std::nullopt;
}

// Gaussian elimination over GF(2). Returns nullopt when some relation is not
// an affine subspace; otherwise the rank, or -1 when inconsistent.
std::optional<long> affine_rank(const Instance& inst) {
  if (inst.domain().size != 2) return std::nullopt;
  IncidenceGraph g(inst);
  const int n = g.num_vars();
  const std::size_t words = static_cast<std::size_t>(n) / 64 + 1;  // last bit column = rhs
  const int rhs_bit = n;
  std::vector<std::vector<std::uint64_t>> rows;
  auto flip = [](std::vector<std::uint64_t>& row, int b) { row[static_cast<std::size_t>(b) / 64] ^= std::uint64_t{1} << (b % 64); };
  auto test = [](const std::vector<std::uint64_t>& row, int b) { return row[static_cast<std::size_t>(b) / 64] >> (b % 64) & 1; };
  const std::size_t W = (static_cast<std::size_t>(n) + 1 + 63) / 64;
  (void)words;
  for (const auto& c : inst.constraints()) {
    const Relation& r = inst.relation_of(c);
    const int a = r.arity();
    if (r.empty()) return -1;
    if (a == 0) continue;
    if (a > 20) return std::nullopt;
    // Bit encodings of tuples.
    std::vector<std::uint32_t> ts;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::uint32_t m = 0;
      for (int j = 0; j < a; ++j) m |= static_cast<std::uint32_t>(r.tuple(i)[static_cast<std::size_t>(j)]) << j;
      ts.push_back(m);
    }
    // Basis of the difference space.
    std::vector<std::uint32_t> basis;
    for (std::uint32_t t : ts) {
      std::uint32_t v = t ^ ts[0];
      for (std::uint32_t b : basis) v = std::min(v, v ^ b);
      if (v) basis.push_back(v);
    }
    if ((std::size_t{1} << basis.size()) != ts.size()) return std::nullopt;
    // Equations a.x = a.t0 for all a orthogonal to the basis.
    for (std::uint32_t eq = 1; eq < (1u << a); ++eq) {
      bool orth = true;
      for (std::uint32_t b : basis)
        if (__builtin_popcount(eq & b) & 1) orth = false;
      if (!orth) continue;
      std::vector<std::uint64_t> row(W, 0);
      for (int j = 0; j < a; ++j)
        if (eq >> j & 1) flip(row, g.var_vertex(c.scope[static_cast<std::size_t>(j)]));
      if (__builtin_popcount(eq & ts[0]) & 1) flip(row, rhs_bit);
      rows.push_back(std::move(row));
    }
  }
  long rank = 0;
  for (int col = 0; col < n; ++col) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < rows.size() && !test(rows[piv], col)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[static_cast<std::size_t>(rank)]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == static_cast<std::size_t>(rank) || !test(rows[i], col)) continue;
      for (std::size_t w = 0; w < W; ++w) rows[i][w] ^= rows[static_cast<std::size_t>(rank)][w];
    }
    ++rank;
  }
  for (std::size_t i = static_cast<std::size_t>(rank); i < rows.size(); ++i)
    if (test(rows[i], rhs_bit)) return -1;
  return rank;
}

// Backtracking over one connected group of variables and constraints.
struct Brute {
  const Instance& inst;
  const IncidenceGraph& g;
  std::vector<int> order;                   // variable vertices
  std::vector<std::vector<int>> check_at;   // constraints completed at depth i
  std::vector<Value> val;
  std::vector<Value> tup;

  Brute(const Instance& i, const IncidenceGraph& gr, std::vector<int> vars, const std::vector<int>& cons)
      : inst(i), g(gr), order(std::move(vars)), check_at(order.size() + 1),
        val(static_cast<std::size_t>(gr.num_vars()), -1) {
    std::vector<int> depth(static_cast<std::size_t>(g.num_vars()), -1);
    for (std::size_t d = 0; d < order.size(); ++d) depth[static_cast<std::size_t>(order[d])] = static_cast<int>(d);
    for (int c : cons) {
      int last = 0;
      for (VarId x : inst.constraints()[static_cast<std::size_t>(c)].scope)
        last = std::max(last, depth[static_cast<std::size_t>(g.var_vertex(x))] + 1);
      check_at[static_cast<std::size_t>(last)].push_back(c);
    }
  }

  bool ok_at(std::size_t d) {
    for (int c : check_at[d]) {
      const Constraint& con = inst.constraints()[static_cast<std::size_t>(c)];
      tup.clear();
      for (VarId x : con.scope) tup.push_back(val[static_cast<std::size_t>(g.var_vertex(x))]);
      if (!inst.relation_of(con).contains(tup)) return false;
    }
    return true;
  }

  template <bool Count>
  BigInt run(std::size_t d) {
    if (!ok_at(d)) return 0;
    if (d == order.size()) return 1;
    BigInt total = 0;
    int v = order[d];
    for (Value a = 0; a < inst.domain().size; ++a) {
      val[static_cast<std::size_t>(v)] = a;
      total += run<Count>(d + 1);
      if (!Count && total > 0) break;
    }
    val[static_cast<std::size_t>(v)] = -1;
    return total;
  }
};

template <bool Count>
BigInt brute(const Instance& inst) {
  IncidenceGraph g(inst);
  Components comps = components(g, {});
  BigInt total = 1;
  for (int k = 0; k < comps.count(); ++k) {
    Brute b(inst, g, g.var_vertices(comps.variables[static_cast<std::size_t>(k)]), comps.constraints[static_cast<std::size_t>(k)]);
    BigInt c = b.template run<Count>(0);
    if (c == 0) return 0;
    total *= c;
  }
  return total;
}

}  // namespace

bool brute_decide(const Instance& inst) { return brute<false>(inst) > 0; }
BigInt brute_count(const Instance& inst) { return brute<true>(inst); }

bool solve_component(const Instance& inst, const Language& lang) {
  check_membership(inst, lang);
  std::optional<bool> r;
  switch (lang.capabilities().decide) {
    case SolverKind::horn: r = lattice_decide(inst, false); break;
    case SolverKind::dual_horn: r = lattice_decide(inst, true); break;
    case SolverKind::bijunctive: r = bijunctive_decide(inst); break;
    case SolverKind::affine:
      if (auto rk = affine_rank(inst)) r = *rk >= 0;
      break;
    case SolverKind::brute: break;
  }
  if (r) return *r;
  return brute_decide(inst);
}

BigInt count_component(const Instance& inst, const Language& lang) {
  check_membership(inst, lang);
  if (lang.capabilities().count_polynomial && lang.capabilities().decide == SolverKind::affine) {
    if (auto rk = affine_rank(inst)) {
      if (*rk < 0) return 0;
      return BigInt(1) << static_cast<unsigned>(static_cast<long>(inst.variables().size()) - *rk);
    }
  }
  return brute_count(inst);
}

}  // namespace scatterbd
