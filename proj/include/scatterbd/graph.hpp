#pragma once

#include <span>
#include <vector>

#include "scatterbd/core.hpp"

namespace scatterbd {

// Bipartite variable/constraint incidence graph. Vertex ids: [0, n) are the
// instance's variables in id order, [n, n + m) its constraints in order.
class IncidenceGraph {
 public:
  IncidenceGraph() = default;
  explicit IncidenceGraph(const Instance& inst);

  int num_vars() const { return n_; }
  int num_constraints() const { return m_; }
  int num_vertices() const { return n_ + m_; }
  std::size_t num_edges() const { return adj_.size() / 2; }

  bool is_constraint(int v) const { return v >= n_; }
  int constraint_vertex(int ci) const { return n_ + ci; }
  int constraint_index(int v) const { return v - n_; }
  VarId var_id(int v) const { return vars_[static_cast<std::size_t>(v)]; }
  // -1 when the variable is not part of the instance.
  int var_vertex(VarId x) const;
  std::vector<int> var_vertices(const VarSet& xs) const;
  VarSet var_ids(std::span<const int> vs) const;

  std::span<const int> neighbors(int v) const {
    return {adj_.data() + off_[static_cast<std::size_t>(v)],
            static_cast<std::size_t>(off_[static_cast<std::size_t>(v) + 1] - off_[static_cast<std::size_t>(v)])};
  }

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<VarId> vars_;
  std::vector<int> dense_;  // var id -> vertex when ids are compact
  std::vector<int> off_;
  std::vector<int> adj_;
};

IncidenceGraph incidence_graph(const Instance& inst);

struct Components {
  std::vector<int> of;  // vertex -> component, -1 for removed variables
  // Ordered by smallest constraint index; constraint-free components last,
  // by variable id.
  std::vector<std::vector<int>> constraints;  // constraint indices
  std::vector<VarSet> variables;

  int count() const { return static_cast<int>(constraints.size()); }
};

Components components(const IncidenceGraph& g, const VarSet& removed);

}  // namespace scatterbd
