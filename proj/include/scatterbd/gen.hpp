#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scatterbd/core.hpp"
#include "scatterbd/forbidden.hpp"

namespace scatterbd {

// Pseudo-random stream "mt19937_64 stream v1": std::mt19937_64 seeded with
// GenSpec::seed; a draw below n is next() % n. No std distributions are used,
// so output is identical across standard libraries.
struct GenSpec {
  std::uint64_t seed = 1;
  int blocks = 2;
  int block_vars = 10;
  int block_cons = 12;
  int bridges = 1;
  int noise_unaries = 0;
  int domain = 2;

  void validate() const;
};

struct Generated {
  Instance instance;
  VarSet planted;
  std::vector<std::string> names;  // names[v] for variable id v
};

// Block i draws only from langs[i % langs.size()].
Generated generate(const GenSpec& spec, const LanguageList& langs);

}  // namespace scatterbd
