#include "scatterbd/detect.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "scatterbd/graph.hpp"
#include "scatterbd/oracle.hpp"

namespace scatterbd {

ReplacementConfig ReplacementConfig::exhaustive() {
  ReplacementConfig c;
  c.gadget_cap = INT_MAX;
  c.marked_cap = INT_MAX;
  c.annotation_cap = -1;
  return c;
}

void ReplacementConfig::validate() const {
  if (gadget_cap <= 0 || marked_cap <= 0 || annotation_cap == 0 || annotation_cap < -1)
    throw Error("replacement caps must be positive");
  if (mode == ReplacementMode::abstract && abstract_vars <= 0) throw Error("abstract mode needs abstract_vars > 0");
}

std::string to_string(DetectStatus s) {
  switch (s) {
    case DetectStatus::found: return "found";
    case DetectStatus::none_certified: return "none";
    case DetectStatus::none_budget: return "none-budget";
  }
  return "?";
}

namespace {

int rho_of(const LanguageList& langs) {
  int r = 2;
  for (const auto& l : langs) r = std::max(r, l.max_arity());
  return r;
}

struct AtomicStats {
  std::atomic<std::uint64_t> nodes{0}, separators{0}, gadgets{0}, truncated{0}, mono{0}, compress{0};

  DetectStats snapshot() const {
    return {nodes.load(), separators.load(), gadgets.load(), truncated.load(), mono.load(), compress.load()};
  }
};

enum class Out { found, none, budget };

struct Res {
  Out out = Out::none;
  VarSet z;
};

Res found(VarSet z) { return {Out::found, std::move(z)}; }

struct Cancelled {};

VarSet constraint_vars(const Instance& I, std::span<const int> cons) {
  VarSet out;
  for (int c : cons) {
    const auto& sc = I.constraints()[static_cast<std::size_t>(c)].scope;
    out.insert(out.end(), sc.begin(), sc.end());
  }
  return make_set(std::move(out));
}

// Union of two instances over a shared variable namespace.
Instance union_instance(const Instance& a, const Instance& b) {
  Instance out = a;
  out.add_variables(b.variables());
  for (const auto& c : b.constraints()) out.add_constraint(c);
  return out;
}

VarSet concat_chain(const VarSet& a, const VarSet& b) {
  VarSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Subsets of `pool` with size in [lo, hi], by size then lexicographically.
template <class F>
bool for_each_sized_subset(const VarSet& pool, int lo, int hi, F&& f) {
  return for_each_subset(pool, hi, [&](const VarSet& s) {
    if (static_cast<int>(s.size()) < lo) return false;
    return f(s);
  });
}

// ---- replacement families --------------------------------------------------

using ReplacementSink = std::function<bool(const ReplacementCandidate&)>;

ReplacementCandidate make_candidate(const Instance& I, const ReplacementQuery& q, const std::vector<Constraint>& M,
                                    const VarSet& delta, const VarSet& extra_vars) {
  Instance J(I.domain(), I.store_ptr());
  J.add_variables(q.Pr);
  J.add_variables(q.S);
  J.add_variables(delta);
  J.add_variables(extra_vars);
  VarSet pool = q.Pr;
  for (const auto& c : M) {
    J.add_constraint(c);
    pool = set_union(pool, c.vars());
  }
  pool = set_minus(pool, set_union(q.S, delta));
  ReplacementCandidate out;
  out.gadget.instance = add_connecting_gadget(J, pool);
  out.gadget.boundary = set_union(q.Pr, q.S);
  out.gadget.annotated = delta;
  for (VarId b : out.gadget.boundary) out.delta.emplace_back(b, b);
  return out;
}

// Enumerates the family; returns true when a cap bound the enumeration.
bool enumerate_replacements(const Instance& I, const IncidenceGraph& g, const ForbiddenChecker& chk,
                            const ReplacementQuery& q, const ReplacementConfig& rc, const ReplacementSink& sink) {
  const VarSet Pnr = set_minus(q.P, q.Pr);
  const int hi = rc.annotation_cap >= 0 ? std::min(q.max_annotation, rc.annotation_cap) : q.max_annotation;
  bool truncated = false;
  const std::size_t marked_cap = static_cast<std::size_t>(rc.marked_cap);
  long long emitted = 0;
  bool stop = false;

  auto emit = [&](const std::vector<Constraint>& M, const VarSet& delta, const VarSet& extra) {
    if (emitted >= rc.gadget_cap) {
      truncated = true;
      stop = true;
      return;
    }
    ++emitted;
    if (sink(make_candidate(I, q, M, delta, extra))) stop = true;
  };

  if (rc.mode == ReplacementMode::abstract) {
    VarSet fresh;
    for (int i = 0; i < rc.abstract_vars; ++i) fresh.push_back(I.max_variable() + 1 + i);
    const VarSet pool = set_union(fresh, q.Pr);
    std::vector<Constraint> atoms;
    std::set<RelId> seen;
    for (const auto& L : chk.languages())
      for (RelId r : L.members()) {
        if (!seen.insert(r).second) continue;
        const Relation& rel = I.store().get(r);
        if (rel.arity() == 0 || rel.arity() > static_cast<int>(pool.size())) continue;
        std::vector<Value> free(static_cast<std::size_t>(rel.arity()), -1);
        if (chk.mask(I, r, free) == 0) continue;
        // Injective scopes over the pool.
        std::vector<int> idx(static_cast<std::size_t>(rel.arity()), 0);
        std::function<void(std::size_t)> rec = [&](std::size_t pos) {
          if (pos == idx.size()) {
            Constraint c;
            c.relation = r;
            for (int i : idx) c.scope.push_back(pool[static_cast<std::size_t>(i)]);
            c.gadget = true;
            atoms.push_back(std::move(c));
            return;
          }
          for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
            if (std::find(idx.begin(), idx.begin() + static_cast<long>(pos), i) != idx.begin() + static_cast<long>(pos))
              continue;
            idx[pos] = i;
            rec(pos + 1);
          }
        };
        rec(0);
      }
    VarSet atom_ids;
    for (std::size_t i = 0; i < atoms.size(); ++i) atom_ids.push_back(static_cast<VarId>(i));
    // The fresh-variable bound always limits this mode.
    truncated = true;
    for_each_sized_subset(fresh, std::max(q.min_annotation, 0), hi, [&](const VarSet& delta) {
      for_each_subset(atom_ids, static_cast<int>(std::min(marked_cap, atoms.size())), [&](const VarSet& pick) {
        std::vector<Constraint> M;
        for (VarId a : pick) M.push_back(atoms[static_cast<std::size_t>(a)]);
        emit(M, delta, fresh);
        return stop;
      });
      return stop;
    });
    return truncated;
  }

  // Instance-derived: real constraints beyond P on the W1 side.
  const ReachSet nearR = reach(g, q.W1, q.P, q.S);
  const ReachSet comp = reach(g, q.W1, {}, q.S);
  std::vector<char> blocked(static_cast<std::size_t>(g.num_vertices()), 0);
  for (const VarSet* s : {&q.S, &q.W2, &Pnr, &q.W1})
    for (int v : g.var_vertices(*s)) blocked[static_cast<std::size_t>(v)] = 1;
  std::vector<char> allowed(static_cast<std::size_t>(g.num_vertices()), 0);
  std::vector<int> F0;
  VarSet far;
  for (int v : comp.members) {
    if (nearR.contains(v)) continue;
    if (g.is_constraint(v)) {
      bool ok = true;
      for (int x : g.neighbors(v)) ok = ok && !blocked[static_cast<std::size_t>(x)];
      if (!ok) continue;
      allowed[static_cast<std::size_t>(v)] = 1;
      const int ci = g.constraint_index(v);
      const Constraint& c = I.constraints()[static_cast<std::size_t>(ci)];
      if (!c.gadget && chk.mask(I, c, Assignment{}) != 0) F0.push_back(ci);
    } else if (!blocked[static_cast<std::size_t>(v)] && !set_contains(q.P, g.var_id(v))) {
      far.push_back(g.var_id(v));
    }
  }
  far = make_set(std::move(far));
  if (hi < q.max_annotation && static_cast<int>(far.size()) > hi) truncated = true;

  for_each_sized_subset(far, std::max(q.min_annotation, 0), hi, [&](const VarSet& delta) {
    // Marked constraints must be connected to P^r avoiding S ∪ Δ.
    std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()), 0);
    for (int v : g.var_vertices(delta)) seen[static_cast<std::size_t>(v)] = 1;
    std::vector<int> queue;
    for (int v : g.var_vertices(q.Pr)) seen[static_cast<std::size_t>(v)] = 1, queue.push_back(v);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      for (int w : g.neighbors(queue[qi])) {
        if (seen[static_cast<std::size_t>(w)]) continue;
        if (g.is_constraint(w) ? !allowed[static_cast<std::size_t>(w)] : blocked[static_cast<std::size_t>(w)] != 0)
          continue;
        if (!g.is_constraint(w) && nearR.contains(w)) continue;
        seen[static_cast<std::size_t>(w)] = 1;
        queue.push_back(w);
      }
    }
    VarSet pick_pool;  // constraint positions
    for (int ci : F0)
      if (seen[static_cast<std::size_t>(g.constraint_vertex(ci))]) pick_pool.push_back(ci);
    if (pick_pool.size() > marked_cap) truncated = true;
    for_each_subset(pick_pool, static_cast<int>(std::min(marked_cap, pick_pool.size())), [&](const VarSet& pick) {
      std::vector<Constraint> M;
      for (VarId ci : pick) M.push_back(I.constraints()[static_cast<std::size_t>(ci)]);
      emit(M, delta, {});
      return stop;
    });
    return stop;
  });
  return truncated;
}

// ---- search engine -----------------------------------------------------------

struct NonsepCtx {
  VarSet W;
  int k = 0;
  std::set<VarSet> failed;
};

struct FullCtx {
  const Instance& I;
  IncidenceGraph g;
  VarSet W1, W2;
  int k;
  std::map<std::pair<VarSet, int>, std::vector<Separator>> tight;
  std::map<std::tuple<VarSet, VarSet, int>, bool> good;

  FullCtx(const Instance& inst, VarSet w1, VarSet w2, int budget)
      : I(inst), g(inst), W1(std::move(w1)), W2(std::move(w2)), k(budget) {}
};

class Engine {
 public:
  Engine(const ForbiddenChecker& chk, const DetectConfig& cfg, AtomicStats& st, std::function<bool()> cancel = {})
      : chk_(chk), cfg_(cfg), st_(st), cancel_(std::move(cancel)) {}

  void expect(const Instance& I, const Res& r, int k, const VarSet& S, const VarSet& W) const {
    if (r.out != Out::found) return;
    if (static_cast<int>(r.z.size()) > k || !set_subset(S, r.z) || !set_disjoint(r.z, W) || !chk_.verify(I, r.z).ok)
      throw std::logic_error("detect produced an unverified solution");
  }

  Res ext(const Instance& I, int k, const VarSet& S, const VarSet& W) {
    Res r = nonsep(I, k, S, W);
    if (r.out == Out::found) return r;
    if (W.size() < 2) return r;
    bool budget = false;
    // Some component of a separating solution holds W[0]; W1 is that part.
    const VarId anchor = W.front();
    const VarSet rest(W.begin() + 1, W.end());
    Res best;
    for_each_subset(rest, static_cast<int>(rest.size()) - 1, [&](const VarSet& t) {
      const VarSet W1 = set_insert(t, anchor);
      const VarSet W2 = set_minus(W, W1);
      Instance Ig = add_connecting_gadget(I, W1);
      Res s = sep(Ig, k, S, W1, W2);
      if (s.out == Out::found) {
        best = std::move(s);
        return true;
      }
      budget = budget || s.out == Out::budget;
      return false;
    });
    if (best.out == Out::found) {
      expect(I, best, k, S, W);
      return best;
    }
    return {budget ? Out::budget : Out::none, {}};
  }

  Res nonsep(const Instance& I, int k, const VarSet& S, const VarSet& W) {
    NonsepCtx c{W, k, {}};
    Res r = nonsep_rec(c, I, S);
    expect(I, r, k, S, W);
    return r;
  }

  Res nonsep_rec(NonsepCtx& c, const Instance& I, const VarSet& S) {
    tick();
    if (static_cast<int>(S.size()) > c.k) throw std::logic_error("non-separating branch exceeded depth k");
    if (c.failed.count(S)) return {};
    PruneResult pr = rule1_prune(I, S, c.W, chk_, false);
    if (pr.kept.empty()) return found(S);
    if (static_cast<int>(S.size()) == c.k) {
      c.failed.insert(S);
      return {};
    }
    auto C = chk_.find_forbidden_set(pr.instance, S);
    if (!C) return found(S);
    const VarSet vc = set_minus(constraint_vars(pr.instance, C->constraints), S);
    VarSet direct = set_minus(vc, c.W);
    VarSet pushed;
    IncidenceGraph g(pr.instance);
    const VarSet Y = set_intersect(c.W, pr.instance.variables());
    if (!Y.empty())
      for (VarId v : direct) {
        auto seps = enumerate_important_separators(g, {v}, Y, c.k - static_cast<int>(S.size()), {}, S);
        st_.separators += seps.size();
        for (const auto& s : seps) pushed = set_union(pushed, s.vertices);
      }
    pushed = set_minus(pushed, direct);
    for (const VarSet* cand : {&direct, &pushed})
      for (VarId u : *cand) {
        Res r = nonsep_rec(c, pr.instance, set_insert(S, u));
        if (r.out == Out::found) return r;
      }
    c.failed.insert(S);
    return {};
  }

  // Rule 2 by side-splitting.
  struct Rule2 {
    bool solvable = false;
    VarSet committed;
    Instance rest;
    int k = 0;
  };

  Rule2 rule2(const Instance& I, const IncidenceGraph& g, int k, const VarSet& S, const VarSet& W1,
              const VarSet& W2) {
    Rule2 out;
    const std::vector<int> side = reach(g, W1, S).constraints(g);
    std::vector<char> in_side(I.constraints().size(), 0);
    for (int c : side) in_side[static_cast<std::size_t>(c)] = 1;
    std::vector<int> other;
    for (std::size_t i = 0; i < in_side.size(); ++i)
      if (!in_side[i]) other.push_back(static_cast<int>(i));
    const Instance Is = I.induced(side, set_union(W1, S));
    for (int kk = static_cast<int>(S.size()); kk <= k; ++kk) {
      Res r = nonsep(Is, kk, S, W1);
      if (r.out == Out::found) {
        out.solvable = true;
        out.committed = r.z;
        break;
      }
    }
    if (!out.solvable) return out;
    out.rest = I.induced(other, set_union(S, W2));
    out.k = k - static_cast<int>(set_minus(out.committed, S).size());
    return out;
  }

  struct SepCtx {
    const Instance& I;
    int k;
    VarSet W1, W2, W;
    FullCtx full;
    NonsepCtx nonsep;
    std::map<VarSet, Out> done;

    SepCtx(const Instance& inst, int budget, const VarSet& w1, const VarSet& w2)
        : I(inst), k(budget), W1(w1), W2(w2), W(set_union(w1, w2)), full(inst, w1, w2, budget),
          nonsep{set_union(w1, w2), budget, {}} {}
  };

  Res sep(const Instance& Ig, int k, const VarSet& S, const VarSet& W1, const VarSet& W2) {
    SepCtx c(Ig, k, W1, W2);
    Res r = sep_rec(c, S);
    expect(Ig, r, k, S, c.W);
    return r;
  }

  Res sep_rec(SepCtx& c, const VarSet& S) {
    tick();
    if (static_cast<int>(S.size()) > c.k) return {};
    if (auto it = c.done.find(S); it != c.done.end()) return {it->second, {}};
    Res r = nonsep_rec(c.nonsep, c.I, S);
    if (r.out == Out::found) return r;
    const IncidenceGraph& g = c.full.g;
    if (disconnects(g, c.W1, c.W2, S)) {
      Rule2 r2 = rule2(c.I, g, c.k, S, c.W1, c.W2);
      Res out;
      if (r2.solvable) {
        Res rest = ext(r2.rest, r2.k, S, c.W2);
        if (rest.out == Out::found) out = found(set_union(r2.committed, rest.z));
        else out.out = rest.out;
      }
      if (out.out != Out::found) c.done[S] = out.out;
      return out;
    }
    bool budget = false;
    VarSet R;
    const int room = c.k - static_cast<int>(S.size());
    for (int lambda = 1; lambda <= room; ++lambda)
      for (int ell = 0; lambda + ell <= room; ++ell) {
        FullAlgoResult fa = full(c.full, S, lambda, ell);
        if (!fa.valid) continue;
        R = set_union(R, fa.candidates);
        budget = budget || fa.truncated;
      }
    R = set_minus(R, set_union(S, c.W));
    VarSet pushed;
    for (VarId v : R) {
      auto seps = enumerate_important_separators(g, {v}, c.W, room, {}, S);
      st_.separators += seps.size();
      for (const auto& s : seps) pushed = set_union(pushed, s.vertices);
    }
    pushed = set_minus(pushed, set_union(R, S));
    for (const VarSet* cand : {&R, &pushed})
      for (VarId u : *cand) {
        Res s = sep_rec(c, set_insert(S, u));
        if (s.out == Out::found) return s;
        budget = budget || s.out == Out::budget;
      }
    const Out out = budget ? Out::budget : Out::none;
    c.done[S] = out;
    return {out, {}};
  }

  bool good(FullCtx& c, const VarSet& S, const Separator& P, int ell) {
    auto key = std::make_tuple(S, P.vertices, ell);
    if (auto it = c.good.find(key); it != c.good.end()) return it->second;
    // Monotone in ell.
    for (auto it = c.good.begin(); it != c.good.end(); ++it) {
      const auto& [s2, p2, l2] = it->first;
      if (s2 == S && p2 == P.vertices && ((it->second && l2 <= ell) || (!it->second && l2 >= ell)))
        return c.good[key] = it->second;
    }
    const VarSet PS = set_union(P.vertices, S);
    const Instance sub = c.I.induced(P.reach.constraints(c.g), set_union(c.W1, PS));
    NonsepCtx nc{c.W1, static_cast<int>(PS.size()) + ell, {}};
    const bool ok = nonsep_rec(nc, sub, PS).out == Out::found;
    return c.good[key] = ok;
  }

  const std::vector<Separator>& tight(FullCtx& c, const VarSet& S, int lambda) {
    auto key = std::make_pair(S, lambda);
    auto it = c.tight.find(key);
    if (it == c.tight.end()) {
      auto seq = tight_separator_sequence(c.g, c.W1, c.W2, lambda, {}, S);
      st_.separators += seq.size();
      it = c.tight.emplace(key, std::move(seq)).first;
    }
    return it->second;
  }

  FullAlgoResult full(FullCtx& c, const VarSet& S, int lambda, int ell) {
    tick();
    FullAlgoResult out;
    if (lambda < 1 || ell < 0) return out;
    if (disconnects(c.g, c.W1, c.W2, S)) return out;
    if (min_cut_size(c.g, c.W1, c.W2, {}, lambda, S) > lambda) return out;
    out.valid = true;
    const auto& seq = tight(c, S, lambda);
    if (seq.empty()) return out;
    std::vector<bool> good_at(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) good_at[i] = good(c, S, seq[i], ell);
    // Members are ordered nearest W2 first, so goodness may only switch on.
    const auto first_good = std::find(good_at.begin(), good_at.end(), true);
    if (std::find(first_good, good_at.end(), false) != good_at.end()) ++st_.mono;
    if (cfg_.audit) cfg_.audit(TightAudit{&c.I, S, c.W1, c.W2, lambda, ell, seq, good_at});

    int p1 = -1, p2 = -1;
    for (int i = 0; i < static_cast<int>(seq.size()); ++i)
      if (good_at[static_cast<std::size_t>(i)] && p1 < 0) p1 = i;
    for (int i = static_cast<int>(seq.size()) - 1; i >= 0; --i)
      if (!good_at[static_cast<std::size_t>(i)] && p2 < 0) p2 = i;
    VarSet R;
    std::vector<int> frontier;
    for (int p : {p1, p2})
      if (p >= 0 && std::find(frontier.begin(), frontier.end(), p) == frontier.end()) {
        frontier.push_back(p);
        R = set_union(R, seq[static_cast<std::size_t>(p)].vertices);
      }

    const int room = c.k - static_cast<int>(S.size());
    ReplacementConfig rc = cfg_.replacement;
    if (rc.annotation_cap < 0) rc.annotation_cap = c.k;
    // Everything R could still gain lives in the W1 component.
    const VarSet universe = set_minus(reach(c.g, c.W1, {}, S).variables(c.g), set_union(S, set_union(c.W1, c.W2)));
    for (int p : frontier) {
      const Separator& P = seq[static_cast<std::size_t>(p)];
      if (P.size() < 2 || lambda < 2 || room - 1 < 1) continue;
      const Instance I1 = c.I.induced(P.reach.constraints(c.g), set_union(c.W1, set_union(P.vertices, S)));
      const VarSet inner(P.vertices);
      for_each_sized_subset(inner, 1, static_cast<int>(inner.size()) - 1, [&](const VarSet& Pr) {
        const VarSet Pnr = set_minus(P.vertices, Pr);
        ReplacementQuery q{S, c.W1, c.W2, P.vertices, Pr, 1, room - 1};
        const bool trunc = enumerate_replacements(c.I, c.g, chk_, q, rc, [&](const ReplacementCandidate& cand) {
          tick();
          ++st_.gadgets;
          const VarSet& delta = cand.gadget.annotated;
          Instance glued = add_connecting_gadget(union_instance(I1, cand.gadget.instance), concat_chain(c.W1, Pr));
          const VarSet S2 = set_union(S, delta);
          if (!chk_.verify(glued, set_union(c.W1, set_union(Pnr, S2))).ok) return false;
          FullCtx sub(glued, c.W1, Pnr, c.k);
          for (int l2 = 1; l2 < lambda; ++l2)
            for (int e2 = 0; e2 <= ell && static_cast<int>(S2.size()) + l2 + e2 <= c.k; ++e2) {
              FullAlgoResult fr = full(sub, S2, l2, e2);
              if (!fr.valid) continue;
              R = set_union(R, set_intersect(fr.candidates, c.I.variables()));
              out.truncated = out.truncated || fr.truncated;
            }
          return set_subset(universe, R);
        });
        if (trunc) {
          out.truncated = true;
          ++st_.truncated;
        }
        return set_subset(universe, R);
      });
    }
    out.candidates = set_minus(R, S);
    return out;
  }

 private:
  void tick() {
    ++st_.nodes;
    if (cancel_ && cancel_()) throw Cancelled{};
  }

  const ForbiddenChecker& chk_;
  const DetectConfig& cfg_;
  AtomicStats& st_;
  std::function<bool()> cancel_;
};

DetectionResult to_result(const Res& r, const AtomicStats& st) {
  DetectionResult out;
  out.status = r.out == Out::found    ? DetectStatus::found
               : r.out == Out::budget ? DetectStatus::none_budget
                                      : DetectStatus::none_certified;
  out.backdoor = r.z;
  out.stats = st.snapshot();
  return out;
}

void check_languages(const Instance& inst, const LanguageList& langs) {
  if (langs.empty()) throw Error("at least one language is required");
  for (const auto& l : langs) {
    if (!(l.domain() == inst.domain())) throw Error("language domain differs from the instance domain");
    if (!l.closed()) throw Error("language " + l.name() + " is not closed under partial assignments");
  }
}

// Canonical-order compression over S ⊆ X_old, optionally in parallel.
Res compress(const Instance& I, int k, const VarSet& X_old, const ForbiddenChecker& chk, const DetectConfig& cfg,
             AtomicStats& st) {
  ++st.compress;
  std::vector<VarSet> branches;
  for_each_subset(X_old, k, [&](const VarSet& s) {
    branches.push_back(s);
    return false;
  });
  const int n = static_cast<int>(branches.size());
  std::vector<Res> results(static_cast<std::size_t>(n));
  std::atomic<int> next{0}, best{INT_MAX};
  auto worker = [&] {
    while (true) {
      const int i = next++;
      if (i >= n || i > best.load()) return;
      Engine eng(chk, cfg, st, [&best, i] { return best.load(std::memory_order_relaxed) < i; });
      try {
        const VarSet& S = branches[static_cast<std::size_t>(i)];
        Res r = eng.ext(I, k, S, set_minus(X_old, S));
        if (r.out == Out::found) {
          int cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
        }
        results[static_cast<std::size_t>(i)] = std::move(r);
      } catch (const Cancelled&) {
      }
    }
  };
  int threads = cfg.threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (best.load() < n) return results[static_cast<std::size_t>(best.load())];
  bool budget = std::any_of(results.begin(), results.end(), [](const Res& r) { return r.out == Out::budget; });
  return {budget ? Out::budget : Out::none, {}};
}

}  // namespace

void ExtInstance::validate(const LanguageList& langs) const {
  if (k < 0) throw Error("k must be non-negative");
  if (!set_disjoint(S, W)) throw Error("S and W must be disjoint");
  if (static_cast<int>(set_union(S, W).size()) > 2 * k + rho_of(langs)) throw Error("|W ∪ S| exceeds 2k + rho");
  if (!verify_strong_backdoor(instance, set_union(S, W), langs).ok) throw Error("W ∪ S is not a strong backdoor");
}

SepInstance SepInstance::make(const ExtInstance& e, const VarSet& W1) {
  if (W1.empty() || !set_subset(W1, e.W) || W1.size() == e.W.size()) throw Error("W1 must be a nonempty proper subset of W");
  SepInstance si;
  si.ext = e;
  si.ext.instance = add_connecting_gadget(e.instance, W1);
  si.W1 = W1;
  si.W2 = set_minus(e.W, W1);
  return si;
}

DetectionResult detect_backdoor(const Instance& inst, int k, const LanguageList& langs, const DetectConfig& cfg) {
  if (k < 0) throw Error("k must be non-negative");
  check_languages(inst, langs);
  cfg.replacement.validate();
  AtomicStats st;
  if (!arity_guard(inst, k, rho_of(langs)).accepted) return to_result({}, st);

  // Without the empty nullary relation, a fully assigned constraint can never
  // be repaired; the only backdoors are then those of instances whose
  // constraints are all tautological.
  const Relation empty0(0, {});
  if (std::none_of(langs.begin(), langs.end(), [&](const Language& l) { return l.contains(empty0); })) {
    const bool all_full = std::all_of(inst.constraints().begin(), inst.constraints().end(), [&](const Constraint& c) {
      return inst.relation_of(c) == Relation::full(inst.relation_of(c).arity(), inst.domain());
    });
    return to_result(all_full ? found({}) : Res{}, st);
  }

  ForbiddenChecker chk(langs);
  Instance cur(inst.domain(), inst.store_ptr());
  std::unordered_map<VarId, std::vector<int>> occurs;
  VarSet X;
  const auto& cons = inst.constraints();
  for (std::size_t i = 0; i < cons.size(); ++i) {
    cur.add_constraint(cons[i]);
    for (VarId v : cons[i].vars()) occurs[v].push_back(static_cast<int>(i));
    if (cfg.compression_shortcut) {
      // Only the component of the new constraint can have changed.
      std::vector<int> comp{static_cast<int>(i)};
      std::vector<char> seen(i + 1, 0);
      std::set<VarId> seen_vars;
      seen[i] = 1;
      for (std::size_t qi = 0; qi < comp.size(); ++qi)
        for (VarId v : cur.constraints()[static_cast<std::size_t>(comp[qi])].scope) {
          if (set_contains(X, v) || !seen_vars.insert(v).second) continue;
          for (int c2 : occurs[v])
            if (!seen[static_cast<std::size_t>(c2)]) seen[static_cast<std::size_t>(c2)] = 1, comp.push_back(c2);
        }
      std::sort(comp.begin(), comp.end());
      if (!chk.find_in_component(cur, comp, X)) continue;
    }
    Res r = compress(cur, k, set_union(X, cons[i].vars()), chk, cfg, st);
    if (r.out != Out::found) return to_result(r, st);
    X = r.z;
  }
  if (!chk.verify(inst, X).ok || static_cast<int>(X.size()) > k)
    throw std::logic_error("detect produced an unverified solution");
  return to_result(found(X), st);
}

DetectionResult sbd_compress(const Instance& inst, int k, const VarSet& X_old, const LanguageList& langs,
                             const DetectConfig& cfg) {
  if (k < 0) throw Error("k must be non-negative");
  check_languages(inst, langs);
  if (!verify_strong_backdoor(inst, X_old, langs).ok) throw Error("X_old is not a strong backdoor");
  ForbiddenChecker chk(langs);
  AtomicStats st;
  return to_result(compress(inst, k, X_old, chk, cfg, st), st);
}

DetectionResult ext_sbd_comp(const ExtInstance& e, const LanguageList& langs, const DetectConfig& cfg) {
  e.validate(langs);
  ForbiddenChecker chk(langs);
  AtomicStats st;
  Engine eng(chk, cfg, st);
  return to_result(eng.ext(e.instance, e.k, e.S, e.W), st);
}

DetectionResult solve_nonseparating(const ExtInstance& e, const LanguageList& langs) {
  e.validate(langs);
  ForbiddenChecker chk(langs);
  AtomicStats st;
  DetectConfig cfg;
  Engine eng(chk, cfg, st);
  return to_result(eng.nonsep(e.instance, e.k, e.S, e.W), st);
}

DetectionResult solve_separating(const SepInstance& si, const LanguageList& langs, const DetectConfig& cfg) {
  ForbiddenChecker chk(langs);
  AtomicStats st;
  Engine eng(chk, cfg, st);
  return to_result(eng.sep(si.ext.instance, si.ext.k, si.ext.S, si.W1, si.W2), st);
}

bool is_ell_good(const SepInstance& si, const VarSet& P, int ell, const LanguageList& langs) {
  ForbiddenChecker chk(langs);
  AtomicStats st;
  DetectConfig cfg;
  Engine eng(chk, cfg, st);
  FullCtx c(si.ext.instance, si.W1, si.W2, si.ext.k);
  return eng.good(c, si.ext.S, make_separator(c.g, si.W1, P, si.ext.S), ell);
}

FullAlgoResult full_algo(const SepInstance& si, int lambda, int ell, const LanguageList& langs,
                         const DetectConfig& cfg) {
  ForbiddenChecker chk(langs);
  AtomicStats st;
  Engine eng(chk, cfg, st);
  FullCtx c(si.ext.instance, si.W1, si.W2, si.ext.k);
  return eng.full(c, si.ext.S, lambda, ell);
}

ReplacementFamily replacement_family(const Instance& inst, const ReplacementQuery& q, const LanguageList& langs,
                                     const ReplacementConfig& cfg) {
  cfg.validate();
  ForbiddenChecker chk(langs);
  IncidenceGraph g(inst);
  ReplacementFamily out;
  out.truncated = enumerate_replacements(inst, g, chk, q, cfg, [&](const ReplacementCandidate& c) {
    out.members.push_back(c);
    return false;
  });
  return out;
}

Rule2Result rule2_reduce(const SepInstance& si, const LanguageList& langs) {
  ForbiddenChecker chk(langs);
  AtomicStats st;
  DetectConfig cfg;
  Engine eng(chk, cfg, st);
  IncidenceGraph g(si.ext.instance);
  Rule2Result out;
  if (!disconnects(g, si.W1, si.W2, si.ext.S)) return out;
  out.applicable = true;
  auto r = eng.rule2(si.ext.instance, g, si.ext.k, si.ext.S, si.W1, si.W2);
  out.solvable = r.solvable;
  if (!r.solvable) return out;
  out.committed = r.committed;
  out.reduced = ExtInstance{r.rest, r.k, si.ext.S, si.W2};
  return out;
}

}  // namespace scatterbd
