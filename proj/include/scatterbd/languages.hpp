#pragma once

#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "scatterbd/core.hpp"

namespace scatterbd {

using BigInt = boost::multiprecision::cpp_int;

struct SchaeferProfile {
  bool zero_valid = true;
  bool one_valid = true;
  bool bijunctive = true;
  bool horn = true;
  bool dual_horn = true;
  bool affine = true;

  friend bool operator==(const SchaeferProfile&, const SchaeferProfile&) = default;
};

// Polynomial procedure a language declares for deciding its instances.
enum class SolverKind { brute, horn, dual_horn, bijunctive, affine };

struct Capabilities {
  SolverKind decide = SolverKind::brute;
  bool count_polynomial = false;
};

class Language {
 public:
  Language() = default;
  Language(std::string name, Domain domain, std::shared_ptr<RelationStore> store, std::vector<RelId> members,
           bool closed);

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  const std::shared_ptr<RelationStore>& store_ptr() const { return store_; }
  const std::vector<RelId>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool closed() const { return closed_; }
  int max_arity() const { return max_arity_; }

  const Capabilities& capabilities() const { return caps_; }
  void set_capabilities(Capabilities c) { caps_ = c; }

  bool contains(const Relation& r) const { return set_.count(r) > 0; }
  bool contains(RelId id) const { return contains(store_->get(id)); }

 private:
  std::string name_;
  Domain domain_;
  std::shared_ptr<RelationStore> store_;
  std::vector<RelId> members_;
  std::unordered_set<Relation, RelationHash> set_;
  bool closed_ = false;
  int max_arity_ = 0;
  Capabilities caps_;
};

// Least superset of gamma plus D^2 closed under single-position restriction.
Language closure_star(const std::string& name, const std::vector<RelId>& gamma, const Domain& domain,
                      std::shared_ptr<RelationStore> store);
Language closure_star(const Language& lang);

// Members of lang whose restrictions leave the language; empty when closed.
std::vector<RelId> closure_audit(const Language& lang);

SchaeferProfile classify_schaefer(const Relation& r);
SchaeferProfile classify_schaefer(const Language& lang);

// Built-in catalog tokens: unary, units, taut2, horn3, dualhorn3, twosat,
// affine3 (without the leading '@'). Returns the raw generators.
std::vector<RelId> builtin_relations(const std::string& token, const Domain& domain, RelationStore& store);
// Solver capability declared for a built-in token; brute for anything else.
Capabilities builtin_capabilities(const std::string& token);
// Closed built-in language.
Language builtin_language(const std::string& token, const Domain& domain, std::shared_ptr<RelationStore> store);

// The running-example relations over {0,1}: H misses (1,1,1), A misses (0,0,0).
Relation horn_h();
Relation dual_horn_a();

bool solve_component(const Instance& inst, const Language& lang);
BigInt count_component(const Instance& inst, const Language& lang);

// Exhaustive decision and counting over var(inst); used as fallbacks.
bool brute_decide(const Instance& inst);
BigInt brute_count(const Instance& inst);

}  // namespace scatterbd
