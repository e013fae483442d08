#pragma once

#include <optional>
#include <vector>

#include "scatterbd/core.hpp"
#include "scatterbd/graph.hpp"

namespace scatterbd {

// Vertices (variables and constraints) of the components of B - blocker -
// removed that meet the source set.
struct ReachSet {
  VarSet source;
  VarSet blocker;
  std::vector<int> members;  // sorted vertex indices

  bool contains(int vertex) const;
  VarSet variables(const IncidenceGraph& g) const;
  std::vector<int> constraints(const IncidenceGraph& g) const;
};

struct Separator {
  VarSet vertices;
  ReachSet reach;  // from the X side

  std::size_t size() const { return vertices.size(); }
  bool operator==(const Separator& o) const { return vertices == o.vertices; }
};

// `removed` deletes variables from the graph before anything else; it is how
// callers work in B_S without rebuilding the graph.
ReachSet reach(const IncidenceGraph& g, const VarSet& X, const VarSet& S, const VarSet& removed = {});

bool disconnects(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, const VarSet& S,
                 const VarSet& removed = {});
bool is_minimal_separator(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, const VarSet& S,
                          const VarSet& removed = {});

enum class CutSide { closest, furthest };

// Minimum X-Y variable cut avoiding X, Y and `undeletable`, or none when the
// minimum exceeds k. furthest = closest to Y.
std::optional<Separator> min_vertex_cut(const IncidenceGraph& g, const VarSet& X, const VarSet& Y,
                                        const VarSet& undeletable, int k, CutSide side = CutSide::furthest,
                                        const VarSet& removed = {});

// Size of a minimum X-Y cut, or k + 1 when it exceeds k.
int min_cut_size(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, const VarSet& undeletable, int k,
                 const VarSet& removed = {});

std::vector<Separator> enumerate_important_separators(const IncidenceGraph& g, const VarSet& X, const VarSet& Y,
                                                      int k, const VarSet& undeletable = {},
                                                      const VarSet& removed = {});

std::optional<Separator> component_maximal_separator(const IncidenceGraph& g, const VarSet& X, const VarSet& Y,
                                                     int k, const VarSet& undeletable = {},
                                                     const VarSet& removed = {});

// Nearest-Y first.
std::vector<Separator> tight_separator_sequence(const IncidenceGraph& g, const VarSet& X, const VarSet& Y, int k,
                                                const VarSet& undeletable = {}, const VarSet& removed = {});

bool covers(const Separator& s1, const Separator& s2);
bool dominates(const Separator& s1, const Separator& s2);
bool incomparable(const Separator& s1, const Separator& s2);

Separator make_separator(const IncidenceGraph& g, const VarSet& X, const VarSet& S, const VarSet& removed = {});

}  // namespace scatterbd
