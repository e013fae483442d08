// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "scatterbd/detect.hpp"
#include "scatterbd/gen.hpp"
#include "scatterbd/io.hpp"
#include "scatterbd/oracle.hpp"
#include "scatterbd/separators.hpp"
#include "scatterbd/solve.hpp"

using namespace scatterbd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    if (!cond && pass) detail << "first failure: " << what << "; ";
    pass = pass && cond;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

DetectConfig exhaustive() {
  DetectConfig c;
  c.replacement = ReplacementConfig::exhaustive();
  return c;
}

// ---- 1 -----------------------------------------------------------------------

void lemma_equivalence(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  int disagreements = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    fx::Setting s;
    s.domain = Domain{2 + static_cast<int>(rng() % 2)};
    for (int l = 0; l < 2; ++l) {
      std::vector<RelId> gens;
      for (int g = 0; g < 2; ++g) {
        const int a = 1 + static_cast<int>(rng() % 3);
        Relation full = Relation::full(a, s.domain);
        std::vector<std::vector<Value>> ts;
        for (std::size_t i = 0; i < full.size(); ++i)
          if (rng() % 3) ts.emplace_back(full.tuple(i).begin(), full.tuple(i).end());
        gens.push_back(s.store->intern(Relation(a, ts)));
      }
      s.langs.push_back(closure_star("L" + std::to_string(l), gens, s.domain, s.store));
    }
    const int n = 1 + static_cast<int>(rng() % 10);
    Instance I = fx::random_instance(s, rng, n, static_cast<int>(rng() % 9), true);
    VarSet X;
    for (int i = static_cast<int>(rng() % 4); i > 0; --i) X.push_back(static_cast<VarId>(rng() % n));
    X = make_set(X);
    if (verify_strong_backdoor(I, X, s.langs).ok != verify_by_definition(I, X, s.langs)) ++disagreements;
  }
  o.check(disagreements == 0, "certificate and definition disagree");
  o.check(seconds_since(t0) < 120, "slower than 2 minutes");
  o.detail << "1000 instances, " << disagreements << " disagreements";
}

// ---- 2 -----------------------------------------------------------------------

std::vector<VarSet> vertex_sets(const std::vector<Separator>& seps) {
  std::vector<VarSet> out;
  for (const auto& s : seps) out.push_back(s.vertices);
  return out;
}

void important_separators(Outcome& o) {
  auto s = fx::horn_dual();
  std::mt19937_64 rng(2);
  std::size_t total = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const int n = 4 + static_cast<int>(rng() % 11);
    IncidenceGraph g(fx::random_graph(s, rng, n, 4 + static_cast<int>(rng() % 12)));
    const int k = static_cast<int>(rng() % 5);
    VarSet X{static_cast<VarId>(rng() % n)}, Y;
    while (Y.size() < 2) {
      const VarId y = static_cast<VarId>(rng() % n);
      if (!set_contains(X, y)) Y = set_insert(Y, y);
    }
    auto got = enumerate_important_separators(g, X, Y, k);
    o.check(vertex_sets(got) == oracle_important_separators(g, X, Y, k), "enumeration != definition");
    o.check(got.size() <= (std::size_t{1} << (2 * k)), "more than 4^k important separators");
    total += got.size();
  }
  IncidenceGraph chain(fx::chain(s, 4));
  o.check(vertex_sets(enumerate_important_separators(chain, {1}, {4}, 1)) == std::vector<VarSet>{{3}},
          "chain fixture");
  o.detail << "200 graphs, " << total << " separators";
}

// ---- 3 -----------------------------------------------------------------------

void tight_sequences(Outcome& o) {
  auto s = fx::horn_dual();
  std::mt19937_64 rng(3);
  std::size_t total = 0;
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 5 + static_cast<int>(rng() % 8);
    IncidenceGraph g(fx::random_graph(s, rng, n, n + static_cast<int>(rng() % 6)));
    const int k = 1 + static_cast<int>(rng() % 3);
    const VarSet X{0}, Y{static_cast<VarId>(n - 1)};
    auto seq = tight_separator_sequence(g, X, Y, k);
    total += seq.size();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      o.check(seq[i].size() <= static_cast<std::size_t>(k), "separator larger than k");
      o.check(disconnects(g, X, Y, seq[i].vertices), "not a separator");
      for (std::size_t j = i + 1; j < seq.size(); ++j) {
        o.check(set_disjoint(seq[i].vertices, seq[j].vertices), "not pairwise disjoint");
        o.check(covers(seq[i], seq[j]), "not coverage ordered");
      }
    }
    if (disconnects(g, X, Y, {})) continue;
    VarSet pool;
    for (VarId v = 1; v < n - 1; ++v) pool.push_back(v);
    for_each_subset(pool, k, [&](const VarSet& p) {
      if (!disconnects(g, X, Y, p)) return false;
      const Separator sp = make_separator(g, X, p);
      bool addable = true;
      for (const auto& m : seq)
        if (!set_disjoint(p, m.vertices) || incomparable(sp, m)) addable = false;
      o.check(!addable, "sequence not maximal");
      return false;
    });
  }
  IncidenceGraph chain(fx::chain(s, 6));
  o.check(tight_separator_sequence(chain, {1}, {6}, 1).size() == 4, "chain v1..v6 does not give 4 separators");
  o.detail << "100 graphs, " << total << " separators";
}

// ---- 4 and 10 ----------------------------------------------------------------

struct AuditTally {
  std::mutex mu;
  std::size_t sequences = 0;
  std::size_t separators = 0;
  std::size_t violations = 0;
  std::size_t goodness_mismatches = 0;
  std::size_t good_only_with_w1 = 0;
};

// ℓ-goodness straight from the definition, K ranging over the variables of
// the W1-side sub-instance outside W1 (a solution never contains W
// variables). `anywhere` lifts that restriction.
bool brute_good(const TightAudit& a, const Separator& X, const LanguageList& langs, bool anywhere = false) {
  const Instance& I = *a.instance;
  IncidenceGraph g(I);
  auto cons = reach(g, a.W1, X.vertices, a.S).constraints(g);
  Instance sub = I.induced(cons, set_union(a.S, X.vertices));
  const VarSet base = set_union(X.vertices, a.S);
  VarSet pool = set_minus(sub.variables(), base);
  if (!anywhere) pool = set_minus(pool, a.W1);
  return for_each_subset(pool, a.ell, [&](const VarSet& K) {
    return verify_by_definition(sub, set_union(base, K), langs);
  });
}

void audit(AuditTally& t, const TightAudit& a, const LanguageList& langs) {
  std::size_t v = 0, mism = 0, wider = 0;
  std::vector<bool> wide(a.sequence.size());
  for (std::size_t i = 0; i < a.sequence.size(); ++i) {
    if (brute_good(a, a.sequence[i], langs) != a.good[i]) ++mism;
    wide[i] = brute_good(a, a.sequence[i], langs, true);
    wider += wide[i] && !a.good[i];
  }
  for (std::size_t i = 0; i < a.sequence.size(); ++i)
    for (std::size_t j = 0; j < a.sequence.size(); ++j) {
      if (i == j || !covers(a.sequence[i], a.sequence[j])) continue;
      v += a.good[i] && !a.good[j];
      v += wide[i] && !wide[j];
    }
  std::lock_guard lock(t.mu);
  ++t.sequences;
  t.separators += a.sequence.size();
  t.violations += v;
  t.goodness_mismatches += mism;
  t.good_only_with_w1 += wider;
}

// Relations of arity >= 2 that lie in exactly one language, so that most
// pairs of constraints from different languages are forbidden.
Instance mixed_instance(const fx::Setting& s, std::mt19937_64& rng, int nvars, int ncons) {
  std::vector<RelId> pool;
  for (const auto& l : s.langs)
    for (RelId r : l.members()) {
      int in = 0;
      for (const auto& m : s.langs) in += m.contains(r);
      if (s.store->get(r).arity() >= 2 && in == 1) pool.push_back(r);
    }
  Instance I(s.domain, s.store);
  for (VarId v = 0; v < nvars; ++v) I.add_variable(v);
  for (int c = 0; c < ncons; ++c) {
    const RelId r = pool[rng() % pool.size()];
    VarSet scope;
    while (static_cast<int>(scope.size()) < s.store->get(r).arity())
      scope = set_insert(scope, static_cast<VarId>(rng() % static_cast<unsigned>(nvars)));
    std::vector<VarId> order(scope.begin(), scope.end());
    std::shuffle(order.begin(), order.end(), rng);
    I.add_constraint({order, r});
  }
  return I;
}

struct Suite4 {
  bool ran = false;
  AuditTally tally;
};

void detection_equivalence(Outcome& o, Suite4& st) {
  st.ran = true;
  auto s = fx::horn_dual();
  DetectConfig cfg = exhaustive();
  cfg.audit = [&](const TightAudit& a) { audit(st.tally, a, s.langs); };
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  int found = 0, budget = 0, mismatches = 0, unverified = 0;
  // Without the compression shortcut every step runs the full
  // compression search, which exercises many more tight sequences.
  DetectConfig full = cfg;
  full.compression_shortcut = false;
  auto run = [&](const Instance& I, int k) {
    auto d = detect_backdoor(I, k, s.langs, cfg);
    auto z = oracle_detect(I, k, s.langs);
    auto f = detect_backdoor(I, k, s.langs, full);
    if (f.status != d.status) ++mismatches;
    if (f.found() && !verify_by_definition(I, f.backdoor, s.langs)) ++unverified;
    if (d.status == DetectStatus::none_budget) ++budget;
    if (d.found() != z.has_value()) ++mismatches;
    if (d.found()) {
      ++found;
      if (static_cast<int>(d.backdoor.size()) > k || !verify_by_definition(I, d.backdoor, s.langs)) ++unverified;
    }
  };
  for (int iter = 0; iter < 300; ++iter) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const int m = 1 + static_cast<int>(rng() % 10);
    Instance I = iter % 2 ? fx::random_instance(s, rng, n, m, false) : mixed_instance(s, rng, n, m);
    run(I, static_cast<int>(rng() % 3));
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.bridges = 1 + static_cast<int>(seed % 2);
    spec.block_vars = 5;
    spec.block_cons = spec.bridges == 1 ? 4 : 3;
    auto g = generate(spec, s.langs);
    run(g.instance, static_cast<int>(seed % 3));
  }
  o.check(mismatches == 0, "detect disagrees with oracle");
  o.check(unverified == 0, "a Found result does not verify");
  o.check(budget == 0, "NoneBudget under exhaustive caps");
  o.check(seconds_since(t0) < 15 * 60, "slower than 15 minutes");
  o.detail << "350 instances, " << found << " found, " << mismatches << " mismatches, " << budget << " budget";
}

void monotonicity(Outcome& o, const Suite4& st) {
  o.check(st.ran, "suite 4 did not run");
  o.check(st.tally.sequences > 0, "no tight sequences were audited");
  o.check(st.tally.violations == 0, "an l-good separator covers an l-bad one");
  o.check(st.tally.goodness_mismatches == 0, "goodness differs from brute force");
  o.detail << st.tally.sequences << " sequences, " << st.tally.separators << " separators, "
           << st.tally.violations << " violations, " << st.tally.goodness_mismatches << " brute-force mismatches, "
           << st.tally.good_only_with_w1 << " good only with K meeting W1";
}

// ---- 5 -----------------------------------------------------------------------

void pair_regression(Outcome& o) {
  auto s = fx::horn_dual();
  Instance I = fx::i_pair(s);
  auto d1 = detect_backdoor(I, 1, s.langs);
  o.check(d1.found() && d1.backdoor == VarSet{3}, "k=1 does not give {x3}");
  o.check(detect_backdoor(I, 0, s.langs).status == DetectStatus::none_certified, "k=0 not certified none");
  auto v = verify_strong_backdoor(I, {1}, s.langs);
  o.check(!v.ok && v.witness && v.witness->constraints == std::vector<int>{0, 1} &&
              v.witness->tau.get(1) == std::optional<Value>(1),
          "verify {x1} witness");
  o.check(count_with_backdoor(I, {3}, s.langs) == 24 && oracle_count(I) == 24, "count 24");
  o.detail << "detect, verify, count";
}

// ---- 6 and 11 ----------------------------------------------------------------

void planted_recovery(Outcome& o) {
  std::size_t ok = 0, runs = 0, max_n = 0;
  double worst = 0;
  for (int k = 1; k <= 3; ++k)
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      auto s = fx::horn_dual();
      GenSpec spec;
      spec.seed = seed * 7919 + static_cast<std::uint64_t>(k);
      spec.bridges = k;
      spec.block_vars = 10 + static_cast<int>((seed * 3) % 88);
      spec.block_cons = spec.block_vars + spec.block_vars / 4;
      spec.noise_unaries = static_cast<int>(seed % 4);
      auto g = generate(spec, s.langs);
      max_n = std::max(max_n, g.instance.variables().size());
      const auto t0 = Clock::now();
      auto d = detect_backdoor(g.instance, k, s.langs);
      worst = std::max(worst, seconds_since(t0));
      ++runs;
      const bool good = d.found() && static_cast<int>(d.backdoor.size()) <= k &&
                        verify_strong_backdoor(g.instance, d.backdoor, s.langs).ok;
      ok += good;
      o.check(good, "k=" + std::to_string(k) + " seed " + std::to_string(seed));
    }
  o.detail << ok << "/" << runs << " recovered, n <= " << max_n << ", slowest " << worst << "s";
}

void scaling(Outcome& o) {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto s = fx::horn_dual();
    GenSpec spec;
    spec.seed = seed;
    spec.bridges = 1;
    spec.block_vars = 1000;
    spec.block_cons = 1200;
    spec.noise_unaries = 20;
    auto g = generate(spec, s.langs);
    o.check(g.instance.variables().size() >= 2000, "instance too small");
    const auto t0 = Clock::now();
    auto d = detect_backdoor(g.instance, 1, s.langs);
    const double t = seconds_since(t0);
    worst = std::max(worst, t);
    o.check(d.found() && verify_strong_backdoor(g.instance, d.backdoor, s.langs).ok, "not recovered");
    o.check(t < 60, "slower than 60s");
  }
  o.detail << "3 instances with n = 2001, slowest " << worst << "s";
}

// ---- 7 -----------------------------------------------------------------------

void evaluation(Outcome& o) {
  auto s = fx::horn_dual();
  std::mt19937_64 rng(7);
  int compared = 0, skipped = 0;
  for (int iter = 0; iter < 500; ++iter) {
    const int n = 2 + static_cast<int>(rng() % 11);
    Instance I = fx::random_instance(s, rng, n, 1 + static_cast<int>(rng() % 8), false);
    bool done = false;
    for (int k = 0; k <= 4 && !done; ++k) {
      try {
        auto c = count(I, k, s.langs);
        auto d = solve(I, k, s.langs);
        o.check(c.count == oracle_count(I), "count differs from oracle");
        o.check(d.sat == oracle_decide(I), "decision differs from oracle");
        o.check(c.sat == d.sat, "count and solve disagree");
        done = true;
      } catch (const NoBackdoor&) {
      }
    }
    done ? ++compared : ++skipped;
  }
  o.check(compared == 500, "instances without a detected backdoor of size <= 4");
  o.detail << compared << " instances compared, " << skipped << " without backdoor";
}

// ---- 8 and 9 -----------------------------------------------------------------

void closure_suite(Outcome& o) {
  auto s = fx::horn_dual();
  o.check(s.langs[0].size() == 9 && s.langs[1].size() == 9, "closure sizes");
  for (const auto& l : s.langs) {
    o.check(closure_star(l).members() == l.members(), "closure not idempotent");
    o.check(closure_audit(l).empty(), "closure audit");
  }
  auto store = std::make_shared<RelationStore>();
  for (const char* tok : {"unary", "units", "taut2", "horn3", "dualhorn3", "twosat", "affine3"})
    o.check(closure_audit(builtin_language(tok, Domain{2}, store)).empty(), std::string("audit @") + tok);
  o.detail << "|G1*| = " << s.langs[0].size() << ", |G2*| = " << s.langs[1].size();
}

void schaefer_suite(Outcome& o) {
  const SchaeferProfile h = classify_schaefer(horn_h());
  o.check(h.zero_valid && h.horn && !h.one_valid && !h.bijunctive && !h.dual_horn && !h.affine, "H profile");
  const SchaeferProfile a = classify_schaefer(dual_horn_a());
  o.check(a.one_valid && a.dual_horn && !a.zero_valid && !a.bijunctive && !a.horn && !a.affine, "A profile");
  auto store = std::make_shared<RelationStore>();
  std::vector<RelId> gens = builtin_relations("unary", Domain{2}, *store);
  gens.push_back(store->intern(horn_h()));
  const SchaeferProfile g = classify_schaefer(Language("gamma1", Domain{2}, store, gens, false));
  o.check(g.horn && !g.zero_valid && !g.one_valid && !g.bijunctive && !g.dual_horn && !g.affine, "G1 profile");
  o.detail << "H, A, G1";
}

}  // namespace

int main() {
  Suite4 s4;
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"lemma-equivalence", lemma_equivalence},
      {"important-separators", important_separators},
      {"tight-sequences", tight_sequences},
      {"detection-oracle-equivalence", [&](Outcome& o) { detection_equivalence(o, s4); }},
      {"pair-regression", pair_regression},
      {"planted-recovery", planted_recovery},
      {"evaluation", evaluation},
      {"closure", closure_suite},
      {"schaefer", schaefer_suite},
      {"monotonicity-audit", [&](Outcome& o) { monotonicity(o, s4); }},
      {"scaling-smoke", scaling},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double t = seconds_since(t0);
    std::printf("%s %2zu %-30s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), t,
                o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
