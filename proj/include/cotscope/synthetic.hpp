#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cotscope/corpus.hpp"

namespace cotscope {

struct SyntheticConfig {
  std::uint64_t seed = 0;
  std::size_t n = 100;
  std::size_t depth = 2;        // rule applications in the proof
  std::size_t distractors = 4;  // statements unrelated to the proof
};

/// Rule-base QA in the style of ProofWriter/ProntoQA. Each sample states one
/// fact about a subject, a chain of `depth` implications leading to the queried
/// attribute (the last one possibly negated), and distractor facts and rules.
/// Gold answers come from forward chaining to a fixpoint; the rationale is the
/// proof chain in order. Statement order is shuffled. Same seed, same corpus.
std::vector<ReasoningSample> generate_synthetic_logic(const SyntheticConfig& cfg);

}  // namespace cotscope
