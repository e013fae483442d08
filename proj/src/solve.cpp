#include "scatterbd/solve.hpp"

#include <algorithm>

#include "scatterbd/graph.hpp"

namespace scatterbd {

namespace {

int pick_language(const Instance& part, const LanguageList& langs) {
  for (std::size_t i = 0; i < langs.size(); ++i) {
    const auto& L = langs[i];
    if (std::all_of(part.constraints().begin(), part.constraints().end(),
                    [&](const Constraint& c) { return L.contains(part.relation_of(c)); }))
      return static_cast<int>(i);
  }
  return -1;
}

AssignmentReport evaluate_assignment(const Instance& inst, const Assignment& alpha, const LanguageList& langs,
                                     bool counting) {
  AssignmentReport out;
  out.alpha = alpha;
  const Instance r = restrict_instance(inst, alpha);
  IncidenceGraph g(r);
  Components comps = components(g, {});
  out.sat = true;
  out.cost = 1;
  for (int c = 0; c < comps.count(); ++c) {
    const auto& cons = comps.constraints[static_cast<std::size_t>(c)];
    if (cons.empty()) {
      ++out.free_variables;
      continue;
    }
    ComponentReport cr;
    cr.constraints = cons;
    const Instance part = r.induced(cons, {});
    cr.language = pick_language(part, langs);
    if (cr.language < 0) throw std::logic_error("component outside every language under a verified backdoor");
    const Language& L = langs[static_cast<std::size_t>(cr.language)];
    if (counting) {
      cr.count = count_component(part, L);
      cr.sat = cr.count > 0;
      out.cost *= cr.count;
    } else {
      cr.sat = solve_component(part, L);
    }
    out.sat = out.sat && cr.sat;
    out.components.push_back(std::move(cr));
    if (!out.sat && !counting) break;
  }
  if (counting) {
    for (int i = 0; i < out.free_variables; ++i) out.cost *= inst.domain().size;
  } else {
    out.cost = out.sat ? 1 : 0;
  }
  return out;
}

}  // namespace

EvaluationReport evaluate_with_backdoor(const Instance& inst, const VarSet& X, const LanguageList& langs,
                                        bool counting, bool keep_breakdown) {
  if (!set_subset(X, inst.variables())) throw Error("backdoor names variables outside the instance");
  if (!verify_strong_backdoor(inst, X, langs).ok) throw Error("not a strong backdoor");
  EvaluationReport rep;
  rep.counting = counting;
  rep.backdoor = X;
  const int D = inst.domain().size;
  std::vector<Value> val(X.size(), 0);
  while (true) {
    Assignment alpha;
    for (std::size_t i = 0; i < X.size(); ++i) alpha.set(X[i], val[i]);
    AssignmentReport ar = evaluate_assignment(inst, alpha, langs, counting);
    rep.sat = rep.sat || ar.sat;
    if (counting) rep.count += ar.cost;
    const bool done_early = !counting && ar.sat && !keep_breakdown;
    if (keep_breakdown) rep.breakdown.push_back(std::move(ar));
    if (done_early) break;
    std::size_t i = 0;
    while (i < val.size() && ++val[i] == D) val[i++] = 0;
    if (i == val.size()) break;
  }
  return rep;
}

bool solve_with_backdoor(const Instance& inst, const VarSet& X, const LanguageList& langs) {
  return evaluate_with_backdoor(inst, X, langs, false).sat;
}

BigInt count_with_backdoor(const Instance& inst, const VarSet& X, const LanguageList& langs) {
  return evaluate_with_backdoor(inst, X, langs, true).count;
}

namespace {

EvaluationReport run(const Instance& inst, int k, const LanguageList& langs, const DetectConfig& cfg, bool counting) {
  DetectionResult d = detect_backdoor(inst, k, langs, cfg);
  if (d.status == DetectStatus::none_certified) throw NoBackdoor("no backdoor of size <= " + std::to_string(k), d);
  if (d.status == DetectStatus::none_budget)
    throw NoBackdoor("no backdoor found within the replacement caps (" + std::to_string(d.stats.truncated) +
                         " truncations)",
                     d);
  EvaluationReport rep = evaluate_with_backdoor(inst, d.backdoor, langs, counting);
  rep.stats = d.stats;
  return rep;
}

}  // namespace

EvaluationReport solve(const Instance& inst, int k, const LanguageList& langs, const DetectConfig& cfg) {
  return run(inst, k, langs, cfg, false);
}

EvaluationReport count(const Instance& inst, int k, const LanguageList& langs, const DetectConfig& cfg) {
  return run(inst, k, langs, cfg, true);
}

}  // namespace scatterbd
