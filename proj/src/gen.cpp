#include "scatterbd/gen.hpp"

#include <algorithm>
#include <random>

namespace scatterbd {

void GenSpec::validate() const {
  if (blocks < 1) throw Error("gen: blocks must be positive");
  if (block_vars < 1 || block_cons < 0) throw Error("gen: block sizes must be positive");
  if (bridges < 0 || noise_unaries < 0) throw Error("gen: counts must be non-negative");
  if (domain < 2) throw Error("gen: domain must have at least two values");
}

namespace {

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t below(std::uint64_t n) { return rng_() % n; }

 private:
  std::mt19937_64 rng_;
};

// Relations of arity >= 2 of lang i, preferring those outside every other
// language so that blocks really differ.
std::vector<RelId> block_pool(const LanguageList& langs, std::size_t i, int max_arity) {
  std::vector<RelId> own, any;
  for (RelId r : langs[i].members()) {
    const int a = langs[i].store_ptr()->get(r).arity();
    if (a < 2 || a > max_arity) continue;
    any.push_back(r);
    bool elsewhere = false;
    for (std::size_t j = 0; j < langs.size(); ++j)
      if (j != i && langs[j].contains(r)) elsewhere = true;
    if (!elsewhere) own.push_back(r);
  }
  return own.empty() ? any : own;
}

std::vector<VarId> pick_scope(Stream& s, const std::vector<VarId>& vars, int arity, VarId forced) {
  std::vector<VarId> scope;
  if (forced >= 0) scope.push_back(forced);
  while (static_cast<int>(scope.size()) < arity) {
    VarId v = vars[s.below(vars.size())];
    if (std::find(scope.begin(), scope.end(), v) == scope.end()) scope.push_back(v);
  }
  return scope;
}

}  // namespace

Generated generate(const GenSpec& spec, const LanguageList& langs) {
  spec.validate();
  if (langs.empty()) throw Error("gen: at least one language is required");
  Domain D{spec.domain};
  for (const auto& l : langs)
    if (!(l.domain() == D)) throw Error("gen: language domain differs from the requested domain");
  Stream s(spec.seed);
  Generated out;
  out.instance = Instance(D, langs.front().store_ptr());

  std::vector<std::vector<VarId>> block(static_cast<std::size_t>(spec.blocks));
  VarId next = 0;
  for (int b = 0; b < spec.blocks; ++b)
    for (int j = 0; j < spec.block_vars; ++j) {
      block[static_cast<std::size_t>(b)].push_back(next++);
      out.names.push_back("v" + std::to_string(b) + "_" + std::to_string(j));
    }
  for (int j = 0; j < spec.bridges; ++j) {
    out.planted.push_back(next++);
    out.names.push_back("b" + std::to_string(j + 1));
  }
  for (VarId v = 0; v < next; ++v) out.instance.add_variable(v);

  auto lang_of = [&](int b) { return static_cast<std::size_t>(b) % langs.size(); };
  for (int b = 0; b < spec.blocks; ++b) {
    const auto& vars = block[static_cast<std::size_t>(b)];
    const auto pool = block_pool(langs, lang_of(b), static_cast<int>(vars.size()));
    if (pool.empty()) continue;
    for (int c = 0; c < spec.block_cons; ++c) {
      RelId r = pool[s.below(pool.size())];
      const int a = out.instance.store().get(r).arity();
      // The first constraints walk the block so that it is connected.
      VarId forced = c + 1 < static_cast<int>(vars.size()) ? vars[static_cast<std::size_t>(c)] : -1;
      auto scope = pick_scope(s, vars, a, forced);
      if (forced >= 0 && a >= 2 && std::find(scope.begin(), scope.end(), vars[static_cast<std::size_t>(c) + 1]) == scope.end())
        scope[1] = vars[static_cast<std::size_t>(c) + 1];
      out.instance.add_constraint({scope, r});
    }
  }

  for (int j = 0; j < spec.bridges; ++j) {
    const VarId bj = out.planted[static_cast<std::size_t>(j)];
    const int left = spec.blocks > 1 ? j % (spec.blocks - 1) : 0;
    const int right = spec.blocks > 1 ? left + 1 : 0;
    for (int b : {left, right}) {
      const auto& vars = block[static_cast<std::size_t>(b)];
      const auto pool = block_pool(langs, lang_of(b), static_cast<int>(vars.size()) + 1);
      if (pool.empty()) continue;
      RelId r = pool[s.below(pool.size())];
      const int a = out.instance.store().get(r).arity();
      out.instance.add_constraint({pick_scope(s, vars, a, bj), r});
    }
  }

  for (int u = 0; u < spec.noise_unaries; ++u) {
    const int b = static_cast<int>(s.below(static_cast<std::uint64_t>(spec.blocks)));
    std::vector<RelId> unary;
    for (RelId r : langs[lang_of(b)].members())
      if (out.instance.store().get(r).arity() == 1) unary.push_back(r);
    if (unary.empty()) continue;
    const auto& vars = block[static_cast<std::size_t>(b)];
    out.instance.add_constraint({{vars[s.below(vars.size())]}, unary[s.below(unary.size())]});
  }

  if (!verify_strong_backdoor(out.instance, out.planted, langs).ok)
    throw Error("gen: planted set does not verify (generator bug)");
  return out;
}

}  // namespace scatterbd
