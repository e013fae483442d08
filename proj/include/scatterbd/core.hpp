#pragma once

#include <array>
#include <atomic>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace scatterbd {

using VarId = std::int32_t;
using RelId = std::int32_t;
using Value = std::int32_t;

// Sorted, duplicate-free set of variable ids.
using VarSet = std::vector<VarId>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Domain {
  int size = 2;

  friend bool operator==(const Domain&, const Domain&) = default;
};

// A finite relation in canonical form: tuples lexicographically sorted and
// duplicate-free, stored flat.
class Relation {
 public:
  Relation() = default;
  Relation(int arity, std::vector<std::vector<Value>> tuples);
  static Relation from_flat(int arity, std::vector<Value> flat);

  // All of D^arity.
  static Relation full(int arity, const Domain& domain);

  int arity() const { return arity_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::span<const Value> tuple(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(arity_),
            static_cast<std::size_t>(arity_)};
  }
  const std::vector<Value>& flat() const { return data_; }
  bool contains(std::span<const Value> t) const;

  // Largest value appearing in any tuple, or -1.
  Value max_value() const;

  // pattern[i] < 0 leaves position i free; otherwise tuples must agree with
  // pattern[i] there and the position is projected out.
  Relation restrict(std::span<const Value> pattern) const;

  std::string to_string() const;

  friend bool operator==(const Relation&, const Relation&) = default;
  friend std::strong_ordering operator<=>(const Relation& a, const Relation& b);

 private:
  void canonicalize();

  int arity_ = 0;
  std::size_t count_ = 0;
  std::vector<Value> data_;
};

struct RelationHash {
  std::size_t operator()(const Relation& r) const noexcept;
};

// Append-only intern table. Ids are indices; references stay valid.
// Storage is segmented so get() needs no lock while another thread interns.
class RelationStore {
 public:
  RelationStore() = default;
  RelationStore(const RelationStore&) = delete;
  RelationStore& operator=(const RelationStore&) = delete;

  RelId intern(Relation r);
  std::optional<RelId> find(const Relation& r) const;
  const Relation& get(RelId id) const {
    auto i = static_cast<std::size_t>(id);
    return segments_[i >> kSegBits][i & (kSegSize - 1)];
  }
  std::size_t size() const { return size_.load(std::memory_order_acquire); }

 private:
  static constexpr std::size_t kSegBits = 10;
  static constexpr std::size_t kSegSize = std::size_t{1} << kSegBits;
  static constexpr std::size_t kSegments = 4096;

  mutable std::mutex mu_;
  std::array<std::unique_ptr<Relation[]>, kSegments> segments_;
  std::atomic<std::size_t> size_{0};
  std::unordered_map<Relation, RelId, RelationHash> index_;
};

struct Constraint {
  std::vector<VarId> scope;
  RelId relation = -1;
  // Input position in the originating instance; -1 for synthesized
  // constraints (connecting gadgets, replacement gadgets).
  int origin = -1;
  bool gadget = false;

  VarSet vars() const;
};

class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<VarId, Value>> init);

  void set(VarId v, Value value);
  std::optional<Value> get(VarId v) const;
  bool contains(VarId v) const { return get(v).has_value(); }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::vector<std::pair<VarId, Value>>& bindings() const { return bindings_; }
  VarSet keys() const;

  // Union with disjoint keys; throws on conflicting bindings.
  Assignment merged(const Assignment& other) const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::pair<VarId, Value>> bindings_;  // sorted by variable
};

class Instance {
 public:
  Instance() = default;
  Instance(Domain domain, std::shared_ptr<RelationStore> store);

  const Domain& domain() const { return domain_; }
  const std::shared_ptr<RelationStore>& store_ptr() const { return store_; }
  RelationStore& store() const { return *store_; }
  const VarSet& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Relation& relation_of(const Constraint& c) const { return store_->get(c.relation); }

  void add_variable(VarId v);
  void add_variables(std::span<const VarId> vs);
  // Adds the scope's variables as needed. origin defaults to the new index.
  void add_constraint(Constraint c);
  bool has_variable(VarId v) const;
  VarId max_variable() const { return variables_.empty() ? -1 : variables_.back(); }

  // Sub-instance on the given constraint positions (kept in order) plus the
  // listed variables and every variable of the kept constraints.
  Instance induced(std::span<const int> constraint_positions, std::span<const VarId> extra_vars) const;

  RelId taut2() const;  // interned D^2

 private:
  Domain domain_;
  std::shared_ptr<RelationStore> store_;
  VarSet variables_;
  std::vector<Constraint> constraints_;
};

struct BoundariedInstance {
  Instance instance;
  std::vector<VarId> boundary;  // ordered labels
  VarSet annotated;

  void validate() const;
};

// ---- operations --------------------------------------------------------

// Pattern of a scope under an assignment: assigned value or -1 per position.
std::vector<Value> scope_pattern(const Constraint& c, const Assignment& alpha);

Constraint restrict_constraint(const Constraint& c, const Assignment& alpha, RelationStore& store);
Instance restrict_instance(const Instance& inst, const Assignment& alpha);

struct ArityVerdict {
  bool accepted = true;
  int witness = -1;  // constraint position when rejected
};
ArityVerdict arity_guard(const Instance& inst, int k, int max_language_arity);

// Appends |X|-1 tautological binary constraints chaining X in order.
Instance add_connecting_gadget(const Instance& inst, std::span<const VarId> chain);

struct GlueResult {
  Instance instance;
  // Image of each variable of the second operand in the glued instance.
  std::unordered_map<VarId, VarId> second_map;
};

// mu lists (boundary var of first, boundary var of second) pairs.
GlueResult glue_with_map(const BoundariedInstance& first, const BoundariedInstance& second,
                         std::span<const std::pair<VarId, VarId>> mu);
Instance glue(const BoundariedInstance& first, const BoundariedInstance& second,
              std::span<const std::pair<VarId, VarId>> mu);

// ---- small set helpers -------------------------------------------------

VarSet make_set(std::vector<VarId> v);
VarSet set_union(const VarSet& a, const VarSet& b);
VarSet set_minus(const VarSet& a, const VarSet& b);
VarSet set_intersect(const VarSet& a, const VarSet& b);
bool set_contains(const VarSet& a, VarId v);
bool set_disjoint(const VarSet& a, const VarSet& b);
bool set_subset(const VarSet& a, const VarSet& b);
VarSet set_insert(VarSet a, VarId v);

}  // namespace scatterbd
