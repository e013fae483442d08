#include "scatterbd/graph.hpp"

#include <algorithm>

namespace scatterbd {

IncidenceGraph::IncidenceGraph(const Instance& inst)
    : n_(static_cast<int>(inst.variables().size())),
      m_(static_cast<int>(inst.constraints().size())),
      vars_(inst.variables()) {
  if (!vars_.empty() && vars_.front() >= 0 && vars_.back() < 4 * n_ + 64) {
    dense_.assign(static_cast<std::size_t>(vars_.back()) + 1, -1);
    for (int i = 0; i < n_; ++i) dense_[static_cast<std::size_t>(vars_[static_cast<std::size_t>(i)])] = i;
  }
  std::vector<std::vector<int>> cvars(static_cast<std::size_t>(m_));
  std::vector<int> deg(static_cast<std::size_t>(n_ + m_), 0);
  for (int c = 0; c < m_; ++c) {
    auto& cv = cvars[static_cast<std::size_t>(c)];
    for (VarId x : inst.constraints()[static_cast<std::size_t>(c)].scope) cv.push_back(var_vertex(x));
    std::sort(cv.begin(), cv.end());
    cv.erase(std::unique(cv.begin(), cv.end()), cv.end());
    deg[static_cast<std::size_t>(n_ + c)] = static_cast<int>(cv.size());
    for (int v : cv) ++deg[static_cast<std::size_t>(v)];
  }
  off_.assign(static_cast<std::size_t>(n_ + m_) + 1, 0);
  for (int v = 0; v < n_ + m_; ++v) off_[static_cast<std::size_t>(v) + 1] = off_[static_cast<std::size_t>(v)] + deg[static_cast<std::size_t>(v)];
  adj_.assign(static_cast<std::size_t>(off_.back()), 0);
  std::vector<int> fill(off_.begin(), off_.end() - 1);
  for (int c = 0; c < m_; ++c) {
    for (int v : cvars[static_cast<std::size_t>(c)]) {
      adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(n_ + c)]++)] = v;
      adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = n_ + c;
    }
  }
}

int IncidenceGraph::var_vertex(VarId x) const {
  if (!dense_.empty() || vars_.empty()) {
    if (x < 0 || static_cast<std::size_t>(x) >= dense_.size()) return -1;
    return dense_[static_cast<std::size_t>(x)];
  }
  auto it = std::lower_bound(vars_.begin(), vars_.end(), x);
  if (it == vars_.end() || *it != x) return -1;
  return static_cast<int>(it - vars_.begin());
}

std::vector<int> IncidenceGraph::var_vertices(const VarSet& xs) const {
  std::vector<int> out;
  out.reserve(xs.size());
  for (VarId x : xs)
    if (int v = var_vertex(x); v >= 0) out.push_back(v);
  return out;
}

VarSet IncidenceGraph::var_ids(std::span<const int> vs) const {
  VarSet out;
  for (int v : vs)
    if (!is_constraint(v)) out.push_back(var_id(v));
  return make_set(std::move(out));
}

IncidenceGraph incidence_graph(const Instance& inst) { return IncidenceGraph(inst); }

Components components(const IncidenceGraph& g, const VarSet& removed) {
  Components out;
  const int total = g.num_vertices();
  out.of.assign(static_cast<std::size_t>(total), -1);
  std::vector<char> dead(static_cast<std::size_t>(total), 0);
  for (int v : g.var_vertices(removed)) dead[static_cast<std::size_t>(v)] = 1;
  std::vector<int> stack;
  auto flood = [&](int start) {
    int id = out.count();
    out.constraints.emplace_back();
    out.variables.emplace_back();
    out.of[static_cast<std::size_t>(start)] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (g.is_constraint(u)) out.constraints.back().push_back(g.constraint_index(u));
      else out.variables.back().push_back(g.var_id(u));
      for (int w : g.neighbors(u)) {
        if (dead[static_cast<std::size_t>(w)] || out.of[static_cast<std::size_t>(w)] >= 0) continue;
        out.of[static_cast<std::size_t>(w)] = id;
        stack.push_back(w);
      }
    }
    std::sort(out.constraints.back().begin(), out.constraints.back().end());
    std::sort(out.variables.back().begin(), out.variables.back().end());
  };
  for (int c = 0; c < g.num_constraints(); ++c)
    if (out.of[static_cast<std::size_t>(g.constraint_vertex(c))] < 0) flood(g.constraint_vertex(c));
  for (int v = 0; v < g.num_vars(); ++v)
    if (!dead[static_cast<std::size_t>(v)] && out.of[static_cast<std::size_t>(v)] < 0) flood(v);
  return out;
}

}  // namespace scatterbd
