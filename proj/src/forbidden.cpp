#include "scatterbd/forbidden.hpp"

#include <algorithm>
#include <stdexcept>

namespace scatterbd {

struct ForbiddenChecker::Table {
  int arity = 0;
  std::vector<std::atomic<std::int32_t>> entries;
  explicit Table(std::size_t n) : entries(n) {
    for (auto& e : entries) e.store(-1, std::memory_order_relaxed);
  }
};

ForbiddenChecker::ForbiddenChecker(const LanguageList& langs) : langs_(langs) {
  if (langs_.empty()) throw Error("at least one language is required");
  if (langs_.size() > 16) throw Error("at most 16 languages are supported");
  domain_size_ = langs_.front().domain().size;
  store_ = langs_.front().store_ptr();
  for (const auto& l : langs_)
    if (l.domain().size != domain_size_) throw Error("languages over different domains");
}

ForbiddenChecker::~ForbiddenChecker() {
  for (auto& s : segs_) {
    auto* seg = s.load();
    if (!seg) continue;
    for (std::size_t i = 0; i < kSegSize; ++i) delete seg[i].load();
    delete[] seg;
  }
}

std::uint32_t ForbiddenChecker::compute(const Relation& r, std::span<const Value> pattern) const {
  Relation rr = r.restrict(pattern);
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < langs_.size(); ++i)
    if (!langs_[i].contains(rr)) m |= std::uint32_t{1} << i;
  return m;
}

ForbiddenChecker::Table* ForbiddenChecker::table_for(const Instance& inst, RelId rel) const {
  if (inst.store_ptr() != store_ || rel < 0) return nullptr;
  auto id = static_cast<std::size_t>(rel);
  if (id >= kSegSize * kSegments) return nullptr;
  auto* seg = segs_[id >> kSegBits].load(std::memory_order_acquire);
  if (!seg) {
    std::lock_guard lock(mu_);
    seg = segs_[id >> kSegBits].load(std::memory_order_acquire);
    if (!seg) {
      seg = new std::atomic<Table*>[kSegSize];
      for (std::size_t i = 0; i < kSegSize; ++i) seg[i].store(nullptr, std::memory_order_relaxed);
      segs_[id >> kSegBits].store(seg, std::memory_order_release);
    }
  }
  auto& slot = seg[id & (kSegSize - 1)];
  Table* t = slot.load(std::memory_order_acquire);
  if (t) return t;
  const int a = inst.store().get(rel).arity();
  std::size_t n = 1;
  for (int i = 0; i < a; ++i) {
    n *= static_cast<std::size_t>(domain_size_ + 1);
    if (n > (std::size_t{1} << 18)) return nullptr;
  }
  auto* fresh = new Table(n);
  fresh->arity = a;
  Table* expected = nullptr;
  if (slot.compare_exchange_strong(expected, fresh, std::memory_order_acq_rel)) return fresh;
  delete fresh;
  return expected;
}

std::uint32_t ForbiddenChecker::mask(const Instance& inst, RelId rel, std::span<const Value> pattern) const {
  Table* t = table_for(inst, rel);
  if (!t) return compute(inst.store().get(rel), pattern);
  std::size_t code = 0;
  for (std::size_t i = pattern.size(); i-- > 0;) code = code * static_cast<std::size_t>(domain_size_ + 1) + static_cast<std::size_t>(pattern[i] + 1);
  std::int32_t m = t->entries[code].load(std::memory_order_relaxed);
  if (m >= 0) return static_cast<std::uint32_t>(m);
  std::uint32_t v = compute(inst.store().get(rel), pattern);
  t->entries[code].store(static_cast<std::int32_t>(v), std::memory_order_relaxed);
  return v;
}

std::uint32_t ForbiddenChecker::mask(const Instance& inst, const Constraint& c, const Assignment& tau) const {
  auto p = scope_pattern(c, tau);
  return mask(inst, c.relation, p);
}

namespace {

// Per-constraint view: the S-variables it touches and the mask reached by
// each assignment to them, assignments in lexicographic order.
struct Local {
  int pos = -1;
  VarSet svars;
  std::vector<std::uint32_t> masks;
  std::uint32_t any = 0;
};

std::size_t ipow(int b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= static_cast<std::size_t>(b);
  return r;
}

// Decodes lexicographic index `code` over `vars` (first variable most
// significant) into values.
void decode(std::size_t code, std::size_t nvars, int D, std::vector<Value>& out) {
  out.assign(nvars, 0);
  for (std::size_t i = nvars; i-- > 0;) {
    out[i] = static_cast<Value>(code % static_cast<std::size_t>(D));
    code /= static_cast<std::size_t>(D);
  }
}

class Search {
 public:
  Search(const ForbiddenChecker& chk, const Instance& inst, const VarSet& S)
      : chk_(chk), inst_(inst), S_(S), D_(inst.domain().size) {}

  Local local(int pos) const {
    Local l;
    l.pos = pos;
    const Constraint& c = inst_.constraints()[static_cast<std::size_t>(pos)];
    for (VarId x : c.scope)
      if (set_contains(S_, x)) l.svars.push_back(x);
    l.svars = make_set(std::move(l.svars));
    const std::size_t n = ipow(D_, l.svars.size());
    l.masks.resize(n);
    std::vector<Value> vals;
    std::vector<Value> pattern(c.scope.size());
    for (std::size_t code = 0; code < n; ++code) {
      decode(code, l.svars.size(), D_, vals);
      for (std::size_t i = 0; i < c.scope.size(); ++i) {
        auto it = std::lower_bound(l.svars.begin(), l.svars.end(), c.scope[i]);
        pattern[i] = (it != l.svars.end() && *it == c.scope[i]) ? vals[static_cast<std::size_t>(it - l.svars.begin())] : -1;
      }
      l.masks[code] = chk_.mask(inst_, c.relation, pattern);
      l.any |= l.masks[code];
    }
    return l;
  }

  // Lexicographically first assignment over the union of S-variables for
  // which the members jointly reach every bit of `need`.
  std::optional<Assignment> joint(const std::vector<const Local*>& members, std::uint32_t need) const {
    VarSet U;
    for (auto* m : members) U = set_union(U, m->svars);
    std::vector<std::vector<std::size_t>> idx(members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
      for (VarId x : members[k]->svars) idx[k].push_back(static_cast<std::size_t>(std::lower_bound(U.begin(), U.end(), x) - U.begin()));
    const std::size_t n = ipow(D_, U.size());
    std::vector<Value> vals;
    for (std::size_t code = 0; code < n; ++code) {
      decode(code, U.size(), D_, vals);
      std::uint32_t acc = 0;
      for (std::size_t k = 0; k < members.size(); ++k) {
        std::size_t sub = 0;
        for (std::size_t i : idx[k]) sub = sub * static_cast<std::size_t>(D_) + static_cast<std::size_t>(vals[i]);
        acc |= members[k]->masks[sub];
      }
      if ((acc & need) == need) {
        Assignment tau;
        for (std::size_t i = 0; i < U.size(); ++i) tau.set(U[i], vals[i]);
        return tau;
      }
    }
    return std::nullopt;
  }

  std::optional<ForbiddenWitness> component(std::span<const int> cons) const {
    const std::uint32_t full = chk_.full_mask();
    std::vector<Local> locals;
    locals.reserve(cons.size());
    for (int p : cons) {
      Local l = local(p);
      if (l.any) locals.push_back(std::move(l));
    }
    // Singletons.
    for (const auto& l : locals)
      if ((l.any & full) == full)
        if (auto tau = joint({&l}, full)) return ForbiddenWitness{{l.pos}, *tau, -1};
    const int d = chk_.d();
    if (d == 1) return std::nullopt;
    if (d == 2) return pairs(locals);
    for (int size = 2; size <= d; ++size)
      if (auto w = subsets(locals, size)) return w;
    return std::nullopt;
  }

 private:
  static bool share(const Local& a, const Local& b) { return !set_disjoint(a.svars, b.svars); }

  std::optional<ForbiddenWitness> pairs(const std::vector<Local>& locals) const {
    std::vector<std::size_t> L[2];
    for (std::size_t i = 0; i < locals.size(); ++i)
      for (int b = 0; b < 2; ++b)
        if (locals[i].any >> b & 1) L[b].push_back(i);
    for (std::size_t a = 0; a < locals.size(); ++a) {
      const Local& la = locals[a];
      // a supplies one bit, its partner the other.
      std::size_t it[2] = {L[1].size(), L[0].size()};
      if (la.any & 1) it[0] = static_cast<std::size_t>(std::upper_bound(L[1].begin(), L[1].end(), a) - L[1].begin());
      if (la.any & 2) it[1] = static_cast<std::size_t>(std::upper_bound(L[0].begin(), L[0].end(), a) - L[0].begin());
      while (true) {
        std::size_t c0 = it[0] < L[1].size() ? L[1][it[0]] : locals.size();
        std::size_t c1 = it[1] < L[0].size() ? L[0][it[1]] : locals.size();
        std::size_t b = std::min(c0, c1);
        if (b == locals.size()) break;
        if (c0 == b) ++it[0];
        if (c1 == b) ++it[1];
        const Local& lb = locals[b];
        if (!share(la, lb)) return ForbiddenWitness{{la.pos, lb.pos}, *joint({&la, &lb}, 3u), -1};
        if (auto tau = joint({&la, &lb}, 3u)) return ForbiddenWitness{{la.pos, lb.pos}, *tau, -1};
      }
    }
    return std::nullopt;
  }

  std::optional<ForbiddenWitness> subsets(const std::vector<Local>& locals, int size) const {
    const std::uint32_t full = chk_.full_mask();
    std::vector<std::size_t> pick;
    std::optional<ForbiddenWitness> found;
    auto rec = [&](auto&& self, std::size_t start, std::uint32_t acc) -> bool {
      if (static_cast<int>(pick.size()) == size) {
        if ((acc & full) != full) return false;
        std::vector<const Local*> ms;
        for (auto i : pick) ms.push_back(&locals[i]);
        if (auto tau = joint(ms, full)) {
          ForbiddenWitness w;
          for (auto i : pick) w.constraints.push_back(locals[i].pos);
          w.tau = *tau;
          found = w;
          return true;
        }
        return false;
      }
      for (std::size_t i = start; i < locals.size(); ++i) {
        pick.push_back(i);
        if (self(self, i + 1, acc | locals[i].any)) return true;
        pick.pop_back();
      }
      return false;
    };
    rec(rec, 0, 0);
    return found;
  }

  const ForbiddenChecker& chk_;
  const Instance& inst_;
  const VarSet& S_;
  int D_;
};

}  // namespace

std::optional<Assignment> ForbiddenChecker::is_j_forbidden(const Instance& inst, std::span<const int> cons,
                                                           std::uint32_t J, const VarSet& S) const {
  Search s(*this, inst, S);
  std::vector<Local> locals;
  for (int p : cons) locals.push_back(s.local(p));
  std::vector<const Local*> ms;
  for (auto& l : locals) ms.push_back(&l);
  return s.joint(ms, J);
}

std::optional<ForbiddenWitness> ForbiddenChecker::find_in_component(const Instance& inst, std::span<const int> cons,
                                                                    const VarSet& S) const {
  Search s(*this, inst, S);
  return s.component(cons);
}

std::optional<ForbiddenWitness> ForbiddenChecker::find_forbidden_set(const Instance& inst, const VarSet& S) const {
  IncidenceGraph g(inst);
  Components comps = components(g, S);
  Search s(*this, inst, S);
  for (int k = 0; k < comps.count(); ++k) {
    if (auto w = s.component(comps.constraints[static_cast<std::size_t>(k)])) {
      w->component = k;
      return w;
    }
  }
  return std::nullopt;
}

BackdoorVerdict ForbiddenChecker::verify(const Instance& inst, const VarSet& X) const {
  BackdoorVerdict v;
  v.witness = find_forbidden_set(inst, X);
  v.ok = !v.witness;
  return v;
}

std::optional<Assignment> is_j_forbidden(const Instance& inst, std::span<const int> cons, std::uint32_t J,
                                         const VarSet& S, const LanguageList& langs) {
  return ForbiddenChecker(langs).is_j_forbidden(inst, cons, J, S);
}

std::optional<ForbiddenWitness> find_forbidden_set(const Instance& inst, const VarSet& S, const LanguageList& langs) {
  return ForbiddenChecker(langs).find_forbidden_set(inst, S);
}

BackdoorVerdict verify_strong_backdoor(const Instance& inst, const VarSet& X, const LanguageList& langs) {
  return ForbiddenChecker(langs).verify(inst, X);
}

bool verify_by_definition(const Instance& inst, const VarSet& X, const LanguageList& langs) {
  VarSet B = set_intersect(X, inst.variables());
  const int D = inst.domain().size;
  std::vector<Value> vals(B.size(), 0);
  while (true) {
    Assignment alpha;
    for (std::size_t i = 0; i < B.size(); ++i) alpha.set(B[i], vals[i]);
    Instance r = restrict_instance(inst, alpha);
    IncidenceGraph g(r);
    Components comps = components(g, {});
    for (int k = 0; k < comps.count(); ++k) {
      bool some = false;
      for (const auto& lang : langs) {
        bool all = true;
        for (int p : comps.constraints[static_cast<std::size_t>(k)])
          if (!lang.contains(r.relation_of(r.constraints()[static_cast<std::size_t>(p)]))) {
            all = false;
            break;
          }
        if (all) {
          some = true;
          break;
        }
      }
      if (!some) return false;
    }
    std::size_t i = B.size();
    while (i > 0 && ++vals[i - 1] == D) vals[--i] = 0;
    if (i == 0) break;
  }
  return true;
}

PruneResult rule1_prune(const Instance& inst, const VarSet& S, const VarSet& W, const ForbiddenChecker& chk,
                        bool check_w) {
  IncidenceGraph g(inst);
  Components comps = components(g, S);
  std::vector<int> kept;
  VarSet keep_vars;
  for (int k = 0; k < comps.count(); ++k) {
    const auto& cons = comps.constraints[static_cast<std::size_t>(k)];
    if (cons.empty() || !chk.find_in_component(inst, cons, S)) continue;
    const auto& vs = comps.variables[static_cast<std::size_t>(k)];
    if (check_w && set_disjoint(vs, W))
      throw std::logic_error("component with a forbidden set misses W; the extension premise does not hold");
    kept.insert(kept.end(), cons.begin(), cons.end());
    keep_vars = set_union(keep_vars, vs);
  }
  std::sort(kept.begin(), kept.end());
  VarSet extra = set_union(keep_vars, set_intersect(S, inst.variables()));
  PruneResult out{inst.induced(kept, extra), set_intersect(W, keep_vars), kept};
  return out;
}

PruneResult rule1_prune(const Instance& inst, const VarSet& S, const VarSet& W, const LanguageList& langs) {
  ForbiddenChecker chk(langs);
  return rule1_prune(inst, S, W, chk);
}

}  // namespace scatterbd
