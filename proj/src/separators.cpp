#include "scatterbd/separators.hpp"

#include <algorithm>
#include <stdexcept>

namespace scatterbd {

namespace {

constexpr int kInf = 1 << 29;

std::vector<char> vertex_mask(const IncidenceGraph& g, const VarSet& xs) {
  std::vector<char> m(g.num_vertices(), 0);
  for (int v : g.var_vertices(xs)) m[v] = 1;
  return m;
}

// Vertex-split network: in(v) = 2v, out(v) = 2v + 1. Forward-star edge lists;
// edge i and i ^ 1 are mutual reverses.
class FlowNet {
 public:
  FlowNet(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, const VarSet& undeletable,
          const VarSet& removed)
      : g_(g), V_(g.num_vertices()), s_(2 * V_), t_(2 * V_ + 1), head_(2 * V_ + 2, -1) {
    dead_ = vertex_mask(g, removed);
    std::vector<char> hard = vertex_mask(g, undeletable);
    for (int v : g.var_vertices(X)) hard[v] = 1;
    for (int v : g.var_vertices(Y)) hard[v] = 1;
    for (int v = 0; v < V_; ++v) {
      if (dead_[v]) continue;
      const bool unit = !g.is_constraint(v) && !hard[v];
      unit_.push_back(unit ? v : -1);
      add(2 * v, 2 * v + 1, unit ? 1 : kInf);
      if (g.is_constraint(v)) continue;
      for (int c : g.neighbors(v)) {
        add(2 * v + 1, 2 * c, kInf);
        add(2 * c + 1, 2 * v, kInf);
      }
    }
    for (int x : g.var_vertices(X))
      if (!dead_[x]) add(s_, 2 * x, kInf);
    for (int y : g.var_vertices(Y))
      if (!dead_[y]) add(2 * y + 1, t_, kInf);
  }

  // Max flow capped at limit + 1; returns the flow value (> limit means "too big").
  int max_flow(int limit) {
    int flow = 0;
    std::vector<int> pe(head_.size());
    std::vector<int> queue;
    while (flow <= limit) {
      std::fill(pe.begin(), pe.end(), -2);
      pe[s_] = -1;
      queue.assign(1, s_);
      for (std::size_t qi = 0; qi < queue.size() && pe[t_] == -2; ++qi) {
        int u = queue[qi];
        for (int e = head_[u]; e != -1; e = next_[e]) {
          int w = to_[e];
          if (cap_[e] > 0 && pe[w] == -2) {
            pe[w] = e;
            queue.push_back(w);
          }
        }
      }
      if (pe[t_] == -2) break;
      int push = limit + 1 - flow;
      for (int w = t_; w != s_; w = to_[pe[w] ^ 1]) push = std::min(push, cap_[pe[w]]);
      for (int w = t_; w != s_; w = to_[pe[w] ^ 1]) {
        cap_[pe[w]] -= push;
        cap_[pe[w] ^ 1] += push;
      }
      flow += push;
    }
    return flow;
  }

  VarSet cut(CutSide side) const {
    std::vector<char> mark(head_.size(), 0);
    std::vector<int> queue;
    if (side == CutSide::closest) {
      mark[s_] = 1;
      queue.push_back(s_);
      for (std::size_t qi = 0; qi < queue.size(); ++qi)
        for (int e = head_[queue[qi]]; e != -1; e = next_[e])
          if (cap_[e] > 0 && !mark[to_[e]]) {
            mark[to_[e]] = 1;
            queue.push_back(to_[e]);
          }
    } else {
      mark[t_] = 1;
      queue.push_back(t_);
      for (std::size_t qi = 0; qi < queue.size(); ++qi)
        for (int e = head_[queue[qi]]; e != -1; e = next_[e])
          if (cap_[e ^ 1] > 0 && !mark[to_[e]]) {
            mark[to_[e]] = 1;
            queue.push_back(to_[e]);
          }
    }
    VarSet out;
    for (int v : unit_) {
      if (v < 0) continue;
      bool in = mark[2 * v], o = mark[2 * v + 1];
      if (side == CutSide::closest ? (in && !o) : (o && !in)) out.push_back(g_.var_id(v));
    }
    return make_set(std::move(out));
  }

 private:
  void add(int u, int w, int c) {
    to_.push_back(w), cap_.push_back(c), next_.push_back(head_[u]), head_[u] = static_cast<int>(to_.size()) - 1;
    to_.push_back(u), cap_.push_back(0), next_.push_back(head_[w]), head_[w] = static_cast<int>(to_.size()) - 1;
  }

  const IncidenceGraph& g_;
  int V_, s_, t_;
  std::vector<char> dead_;
  std::vector<int> unit_;
  std::vector<int> head_, next_, to_, cap_;
};

}  // namespace

bool ReachSet::contains(int vertex) const { return std::binary_search(members.begin(), members.end(), vertex); }

VarSet ReachSet::variables(const IncidenceGraph& g) const { return g.var_ids(members); }

std::vector<int> ReachSet::constraints(const IncidenceGraph& g) const {
  std::vector<int> out;
  for (int v : members)
    if (g.is_constraint(v)) out.push_back(g.constraint_index(v));
  return out;
}

ReachSet reach(const IncidenceGraph& g, const VarSet& X, const VarSet& S, const VarSet& removed) {
  ReachSet r{X, S, {}};
  std::vector<char> mark = vertex_mask(g, removed);
  for (int v : g.var_vertices(S)) mark[v] = 1;
  std::vector<int>& q = r.members;
  for (int x : g.var_vertices(X))
    if (!mark[x]) mark[x] = 1, q.push_back(x);
  for (std::size_t qi = 0; qi < q.size(); ++qi)
    for (int w : g.neighbors(q[qi]))
      if (!mark[w]) mark[w] = 1, q.push_back(w);
  std::sort(q.begin(), q.end());
  return r;
}

bool disconnects(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, const VarSet& S, const VarSet& removed) {
  if (!set_disjoint(S, X) || !set_disjoint(S, Y)) return false;
  ReachSet r = reach(g, X, S, removed);
  for (int y : g.var_vertices(Y))
    if (r.contains(y)) return false;
  return true;
}

bool is_minimal_separator(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, const VarSet& S,
                          const VarSet& removed) {
  if (!disconnects(g, X, Y, S, removed)) return false;
  ReachSet rx = reach(g, X, S, removed);
  ReachSet ry = reach(g, Y, S, removed);
  for (VarId u : S) {
    int v = g.var_vertex(u);
    if (v < 0 || set_contains(removed, u)) return false;
    bool near_x = false, near_y = false;
    for (int c : g.neighbors(v)) {
      near_x = near_x || rx.contains(c);
      near_y = near_y || ry.contains(c);
    }
    if (!near_x || !near_y) return false;
  }
  return true;
}

Separator make_separator(const IncidenceGraph& g, const VarSet& X, const VarSet& S, const VarSet& removed) {
  return Separator{S, reach(g, X, S, removed)};
}

std::optional<Separator> min_vertex_cut(const IncidenceGraph& g, const VarSet& X, const VarSet& Y,
                                        const VarSet& undeletable, int k, CutSide side, const VarSet& removed) {
  if (k < 0) return std::nullopt;
  FlowNet net(g, X, Y, undeletable, removed);
  if (net.max_flow(k) > k) return std::nullopt;
  return make_separator(g, X, net.cut(side), removed);
}

int min_cut_size(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, const VarSet& undeletable, int k,
                 const VarSet& removed) {
  if (k < 0) return 0;
  FlowNet net(g, X, Y, undeletable, removed);
  return std::min(net.max_flow(k), k + 1);
}

namespace {

void important_rec(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, int k, const VarSet& undeletable,
                   const VarSet& blocked, const VarSet& chosen, std::vector<VarSet>& out) {
  auto cut = min_vertex_cut(g, X, Y, undeletable, k, CutSide::furthest, blocked);
  if (!cut) return;
  if (cut->vertices.empty()) {
    out.push_back(chosen);
    return;
  }
  const VarId v = cut->vertices.front();
  if (k >= 1) important_rec(g, X, Y, k - 1, undeletable, set_insert(blocked, v), set_insert(chosen, v), out);
  VarSet x2 = set_insert(cut->reach.variables(g), v);
  important_rec(g, x2, Y, k, undeletable, blocked, chosen, out);
}

}  // namespace

std::vector<Separator> enumerate_important_separators(const IncidenceGraph& g, const VarSet& X, const VarSet& Y,
                                                      int k, const VarSet& undeletable, const VarSet& removed) {
  std::vector<VarSet> cand;
  important_rec(g, X, Y, k, undeletable, removed, {}, cand);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  std::vector<Separator> seps;
  for (auto& s : cand)
    if (is_minimal_separator(g, X, Y, s, removed)) seps.push_back(make_separator(g, X, s, removed));
  std::vector<Separator> out;
  for (const auto& s : seps) {
    bool dominated = false;
    for (const auto& t : seps)
      if (&t != &s && dominates(t, s)) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const Separator& a, const Separator& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.vertices < b.vertices;
  });
  if (k < 31 && out.size() > (std::size_t{1} << (2 * k))) throw std::logic_error("important separator count exceeds 4^k");
  return out;
}

std::optional<Separator> component_maximal_separator(const IncidenceGraph& g, const VarSet& X, const VarSet& Y,
                                                     int k, const VarSet& undeletable, const VarSet& removed) {
  auto cur = min_vertex_cut(g, X, Y, undeletable, k, CutSide::furthest, removed);
  if (!cur) return std::nullopt;
  // Anything covering cur reaches past one of cur's own vertices, so those
  // are the only growth candidates.
  for (bool grown = true; grown;) {
    grown = false;
    const VarSet base = cur->reach.variables(g);
    for (VarId v : cur->vertices) {
      auto next = min_vertex_cut(g, set_insert(base, v), Y, undeletable, k, CutSide::furthest, removed);
      if (next) {
        cur = make_separator(g, X, next->vertices, removed);
        grown = true;
        break;
      }
    }
  }
  VarSet s = cur->vertices;
  for (VarId u : cur->vertices) {
    VarSet t = set_minus(s, {u});
    if (disconnects(g, X, Y, t, removed)) s = std::move(t);
  }
  return make_separator(g, X, s, removed);
}

std::vector<Separator> tight_separator_sequence(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, int k,
                                                const VarSet& undeletable, const VarSet& removed) {
  std::vector<Separator> out;
  VarSet target = Y;
  while (auto s = component_maximal_separator(g, X, target, k, undeletable, removed)) {
    if (s->vertices.empty()) break;
    target = s->vertices;
    out.push_back(std::move(*s));
  }
  return out;
}

bool covers(const Separator& s1, const Separator& s2) {
  const auto& a = s1.reach.members;
  const auto& b = s2.reach.members;
  return a.size() > b.size() && std::includes(a.begin(), a.end(), b.begin(), b.end());
}

bool dominates(const Separator& s1, const Separator& s2) { return s1.size() <= s2.size() && covers(s1, s2); }

bool incomparable(const Separator& s1, const Separator& s2) { return !covers(s1, s2) && !covers(s2, s1); }

}  // namespace scatterbd
