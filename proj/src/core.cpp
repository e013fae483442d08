#include "scatterbd/core.hpp"

#include <algorithm>
#include <sstream>

namespace scatterbd {

Relation::Relation(int arity, std::vector<std::vector<Value>> tuples) : arity_(arity) {
  if (arity < 0) throw Error("negative arity");
  data_.reserve(tuples.size() * static_cast<std::size_t>(arity));
  for (const auto& t : tuples) {
    if (static_cast<int>(t.size()) != arity) throw Error("tuple length does not match arity");
    data_.insert(data_.end(), t.begin(), t.end());
  }
  count_ = tuples.size();
  canonicalize();
}

Relation Relation::from_flat(int arity, std::vector<Value> flat) {
  Relation r;
  r.arity_ = arity;
  if (arity == 0) {
    // Any number of empty tuples collapses to {()}.
    r.count_ = flat.empty() ? 0 : 1;
    return r;
  }
  if (flat.size() % static_cast<std::size_t>(arity) != 0) throw Error("flat tuple data not a multiple of arity");
  r.count_ = flat.size() / static_cast<std::size_t>(arity);
  r.data_ = std::move(flat);
  r.canonicalize();
  return r;
}

Relation Relation::full(int arity, const Domain& domain) {
  std::vector<Value> flat;
  std::vector<Value> t(static_cast<std::size_t>(arity), 0);
  if (arity == 0) return Relation(0, {{}});
  while (true) {
    flat.insert(flat.end(), t.begin(), t.end());
    int i = arity - 1;
    while (i >= 0 && ++t[static_cast<std::size_t>(i)] == domain.size) t[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return from_flat(arity, std::move(flat));
}

void Relation::canonicalize() {
  if (arity_ == 0) {
    data_.clear();
    count_ = count_ > 0 ? 1 : 0;
    return;
  }
  const auto a = static_cast<std::size_t>(arity_);
  std::vector<std::size_t> order(count_);
  for (std::size_t i = 0; i < count_; ++i) order[i] = i;
  auto less = [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(data_.begin() + x * a, data_.begin() + (x + 1) * a,
                                        data_.begin() + y * a, data_.begin() + (y + 1) * a);
  };
  auto eq = [&](std::size_t x, std::size_t y) {
    return std::equal(data_.begin() + x * a, data_.begin() + (x + 1) * a, data_.begin() + y * a);
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<Value> out;
  out.reserve(data_.size());
  std::size_t n = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && eq(order[i], order[i - 1])) continue;
    out.insert(out.end(), data_.begin() + order[i] * a, data_.begin() + (order[i] + 1) * a);
    ++n;
  }
  data_ = std::move(out);
  count_ = n;
}

bool Relation::contains(std::span<const Value> t) const {
  if (static_cast<int>(t.size()) != arity_) return false;
  if (arity_ == 0) return count_ > 0;
  std::size_t lo = 0, hi = count_;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto m = tuple(mid);
    auto c = std::lexicographical_compare_three_way(m.begin(), m.end(), t.begin(), t.end());
    if (c == 0) return true;
    if (c < 0) lo = mid + 1;
    else hi = mid;
  }
  return false;
}

Value Relation::max_value() const {
  Value m = -1;
  for (Value v : data_) m = std::max(m, v);
  return m;
}

Relation Relation::restrict(std::span<const Value> pattern) const {
  if (static_cast<int>(pattern.size()) != arity_) throw Error("restriction pattern length mismatch");
  int free = 0;
  for (Value p : pattern) free += p < 0 ? 1 : 0;
  std::vector<Value> flat;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < count_; ++i) {
    auto t = tuple(i);
    bool ok = true;
    for (int j = 0; j < arity_ && ok; ++j)
      if (pattern[static_cast<std::size_t>(j)] >= 0 && t[static_cast<std::size_t>(j)] != pattern[static_cast<std::size_t>(j)]) ok = false;
    if (!ok) continue;
    ++hits;
    for (int j = 0; j < arity_; ++j)
      if (pattern[static_cast<std::size_t>(j)] < 0) flat.push_back(t[static_cast<std::size_t>(j)]);
  }
  if (free == 0) {
    Relation r;
    r.arity_ = 0;
    r.count_ = hits > 0 ? 1 : 0;
    return r;
  }
  return from_flat(free, std::move(flat));
}

std::string Relation::to_string() const {
  std::ostringstream os;
  os << arity_ << " {";
  for (std::size_t i = 0; i < count_; ++i) {
    os << (i ? " ; " : " ");
    if (arity_ == 0) os << "()";
    auto t = tuple(i);
    for (std::size_t j = 0; j < t.size(); ++j) os << (j ? "," : "") << t[j];
  }
  os << (count_ ? " }" : "}");
  return os.str();
}

std::strong_ordering operator<=>(const Relation& a, const Relation& b) {
  if (auto c = a.arity_ <=> b.arity_; c != 0) return c;
  if (auto c = a.count_ <=> b.count_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.data_.begin(), a.data_.end(), b.data_.begin(), b.data_.end());
}

std::size_t RelationHash::operator()(const Relation& r) const noexcept {
  std::size_t h = std::hash<int>{}(r.arity()) * 0x9e3779b97f4a7c15ULL ^ r.size();
  for (Value v : r.flat()) h = (h ^ static_cast<std::size_t>(v)) * 0x100000001b3ULL;
  return h;
}

RelId RelationStore::intern(Relation r) {
  std::lock_guard lock(mu_);
  if (auto it = index_.find(r); it != index_.end()) return it->second;
  std::size_t n = size_.load(std::memory_order_relaxed);
  if (n >= kSegSize * kSegments) throw Error("relation store exhausted");
  auto& seg = segments_[n >> kSegBits];
  if (!seg) seg = std::make_unique<Relation[]>(kSegSize);
  seg[n & (kSegSize - 1)] = r;
  auto id = static_cast<RelId>(n);
  index_.emplace(std::move(r), id);
  size_.store(n + 1, std::memory_order_release);
  return id;
}

std::optional<RelId> RelationStore::find(const Relation& r) const {
  std::lock_guard lock(mu_);
  if (auto it = index_.find(r); it != index_.end()) return it->second;
  return std::nullopt;
}

VarSet Constraint::vars() const { return make_set(scope); }

Assignment::Assignment(std::initializer_list<std::pair<VarId, Value>> init) {
  for (auto [v, x] : init) set(v, x);
}

void Assignment::set(VarId v, Value value) {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                             [](const auto& b, VarId key) { return b.first < key; });
  if (it != bindings_.end() && it->first == v) it->second = value;
  else bindings_.insert(it, {v, value});
}

std::optional<Value> Assignment::get(VarId v) const {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                             [](const auto& b, VarId key) { return b.first < key; });
  if (it != bindings_.end() && it->first == v) return it->second;
  return std::nullopt;
}

VarSet Assignment::keys() const {
  VarSet out;
  out.reserve(bindings_.size());
  for (auto& b : bindings_) out.push_back(b.first);
  return out;
}

Assignment Assignment::merged(const Assignment& other) const {
  Assignment out = *this;
  for (auto [v, x] : other.bindings_) {
    if (auto cur = out.get(v); cur && *cur != x) throw Error("conflicting assignments");
    out.set(v, x);
  }
  return out;
}

Instance::Instance(Domain domain, std::shared_ptr<RelationStore> store)
    : domain_(domain), store_(std::move(store)) {
  if (domain_.size < 1) throw Error("domain size must be positive");
  if (!store_) store_ = std::make_shared<RelationStore>();
}

void Instance::add_variable(VarId v) {
  if (variables_.empty() || variables_.back() < v) {
    variables_.push_back(v);
    return;
  }
  auto it = std::lower_bound(variables_.begin(), variables_.end(), v);
  if (it == variables_.end() || *it != v) variables_.insert(it, v);
}

void Instance::add_variables(std::span<const VarId> vs) {
  variables_.insert(variables_.end(), vs.begin(), vs.end());
  std::sort(variables_.begin(), variables_.end());
  variables_.erase(std::unique(variables_.begin(), variables_.end()), variables_.end());
}

void Instance::add_constraint(Constraint c) {
  const Relation& r = store_->get(c.relation);
  if (r.arity() != static_cast<int>(c.scope.size())) throw Error("scope length does not match relation arity");
  if (c.origin < 0 && !c.gadget) c.origin = static_cast<int>(constraints_.size());
  for (VarId v : c.scope) add_variable(v);
  constraints_.push_back(std::move(c));
}

bool Instance::has_variable(VarId v) const {
  return std::binary_search(variables_.begin(), variables_.end(), v);
}

Instance Instance::induced(std::span<const int> constraint_positions, std::span<const VarId> extra_vars) const {
  Instance out(domain_, store_);
  std::vector<VarId> vs(extra_vars.begin(), extra_vars.end());
  out.constraints_.reserve(constraint_positions.size());
  for (int p : constraint_positions) {
    const Constraint& c = constraints_.at(static_cast<std::size_t>(p));
    vs.insert(vs.end(), c.scope.begin(), c.scope.end());
    out.constraints_.push_back(c);
  }
  out.add_variables(vs);
  return out;
}

RelId Instance::taut2() const { return store_->intern(Relation::full(2, domain_)); }

void BoundariedInstance::validate() const {
  VarSet b = make_set(boundary);
  if (b.size() != boundary.size()) throw Error("boundary has repeated variables");
  for (VarId v : b)
    if (!instance.has_variable(v)) throw Error("boundary variable not in instance");
  for (VarId v : annotated)
    if (!instance.has_variable(v)) throw Error("annotated variable not in instance");
  if (!set_disjoint(b, annotated)) throw Error("boundary and annotated set intersect");
}

std::vector<Value> scope_pattern(const Constraint& c, const Assignment& alpha) {
  std::vector<Value> p(c.scope.size(), -1);
  for (std::size_t i = 0; i < c.scope.size(); ++i)
    if (auto v = alpha.get(c.scope[i])) p[i] = *v;
  return p;
}

Constraint restrict_constraint(const Constraint& c, const Assignment& alpha, RelationStore& store) {
  auto pattern = scope_pattern(c, alpha);
  if (std::all_of(pattern.begin(), pattern.end(), [](Value v) { return v < 0; })) return c;
  Constraint out;
  out.origin = c.origin;
  out.gadget = c.gadget;
  for (std::size_t i = 0; i < c.scope.size(); ++i)
    if (pattern[i] < 0) out.scope.push_back(c.scope[i]);
  out.relation = store.intern(store.get(c.relation).restrict(pattern));
  return out;
}

Instance restrict_instance(const Instance& inst, const Assignment& alpha) {
  Instance out(inst.domain(), inst.store_ptr());
  VarSet keep = set_minus(inst.variables(), alpha.keys());
  out.add_variables(keep);
  for (const auto& c : inst.constraints()) {
    Constraint r = restrict_constraint(c, alpha, inst.store());
    out.add_constraint(std::move(r));
  }
  return out;
}

ArityVerdict arity_guard(const Instance& inst, int k, int max_language_arity) {
  const auto& cs = inst.constraints();
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (static_cast<int>(cs[i].vars().size()) > max_language_arity + k) return {false, static_cast<int>(i)};
  return {};
}

Instance add_connecting_gadget(const Instance& inst, std::span<const VarId> chain) {
  Instance out = inst;
  if (chain.size() <= 1) return out;
  RelId t = inst.taut2();
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    Constraint c;
    c.scope = {chain[i], chain[i + 1]};
    c.relation = t;
    c.gadget = true;
    out.add_constraint(std::move(c));
  }
  return out;
}

GlueResult glue_with_map(const BoundariedInstance& first, const BoundariedInstance& second,
                         std::span<const std::pair<VarId, VarId>> mu) {
  if (first.boundary.size() != second.boundary.size()) throw Error("boundary sizes differ");
  if (!(first.instance.domain() == second.instance.domain())) throw Error("domains differ");
  if (mu.size() != first.boundary.size()) throw Error("gluing map is not a bijection on the boundaries");
  VarSet b1 = make_set(first.boundary), b2 = make_set(second.boundary);
  std::vector<VarId> dom, cod;
  for (auto [a, b] : mu) {
    dom.push_back(a);
    cod.push_back(b);
  }
  if (make_set(dom) != b1 || make_set(cod) != b2 || make_set(dom).size() != mu.size() ||
      make_set(cod).size() != mu.size())
    throw Error("gluing map is not a bijection on the boundaries");

  GlueResult res{first.instance, {}};
  Instance& out = res.instance;
  const bool same_store = first.instance.store_ptr() == second.instance.store_ptr();
  for (auto [a, b] : mu) res.second_map[b] = a;
  VarId next = out.max_variable() + 1;
  for (VarId v : second.instance.variables()) {
    if (res.second_map.count(v)) continue;
    res.second_map[v] = next++;
  }
  for (auto& [v, img] : res.second_map) out.add_variable(img);
  for (const auto& c : second.instance.constraints()) {
    Constraint nc = c;
    for (auto& x : nc.scope) x = res.second_map.at(x);
    if (!same_store) nc.relation = out.store().intern(second.instance.relation_of(c));
    nc.origin = -1;
    out.add_constraint(std::move(nc));
  }
  return res;
}

Instance glue(const BoundariedInstance& first, const BoundariedInstance& second,
              std::span<const std::pair<VarId, VarId>> mu) {
  return glue_with_map(first, second, mu).instance;
}

VarSet make_set(std::vector<VarId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

VarSet set_union(const VarSet& a, const VarSet& b) {
  VarSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VarSet set_minus(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VarSet set_intersect(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool set_contains(const VarSet& a, VarId v) { return std::binary_search(a.begin(), a.end(), v); }

bool set_disjoint(const VarSet& a, const VarSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) ++i;
    else ++j;
  }
  return true;
}

bool set_subset(const VarSet& a, const VarSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

VarSet set_insert(VarSet a, VarId v) {
  auto it = std::lower_bound(a.begin(), a.end(), v);
  if (it == a.end() || *it != v) a.insert(it, v);
  return a;
}

}  // namespace scatterbd
