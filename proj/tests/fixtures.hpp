#pragma once

#include <memory>
#include <random>
#include <vector>

#include "scatterbd/core.hpp"
#include "scatterbd/forbidden.hpp"
#include "scatterbd/languages.hpp"

namespace fx {

using namespace scatterbd;

struct Setting {
  std::shared_ptr<RelationStore> store = std::make_shared<RelationStore>();
  Domain domain{2};
  LanguageList langs;  // (Γ1*, Γ2*) = closures of @horn3 and @dualhorn3
  RelId H = -1, A = -1, taut = -1;
};

Setting horn_dual();

// x1..x5 are variable ids 1..5; C1 = (H, x1 x2 x3), C2 = (A, x3 x4 x5).
Instance i_pair(const Setting& s);

// Chain v1 - T1 - v2 - ... - vn over D^2 constraints; variable ids 1..n.
Instance chain(const Setting& s, int n);
// v1 -> {v2, v3} -> v4 by binary D^2 constraints.
Instance diamond(const Setting& s);

// Random instance over variable ids 0..nvars-1 with relations drawn from the
// given languages (arity >= 1 members) and optionally arbitrary relations.
Instance random_instance(const Setting& s, std::mt19937_64& rng, int nvars, int ncons, bool arbitrary);

// Random graph of D^2 binary constraints on ids 0..nvars-1.
Instance random_graph(const Setting& s, std::mt19937_64& rng, int nvars, int nedges);

}  // namespace fx
