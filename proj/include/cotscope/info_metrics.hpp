#pragma once

#include <cstddef>
#include <span>

#include "cotscope/backend.hpp"

namespace cotscope {

/// -sum_i p_i ln p_i over realized-token probabilities p_i = exp(logprob_i).
/// This is the pointwise form, not the full next-token entropy. Nats.
double sequence_entropy(std::span<const double> logprobs);

/// Scores `continuation` after `prefix` on the backend, then applies the
/// realized-token entropy above.
double sequence_entropy(const Backend& backend, const TokenSequence& prefix, const TokenSequence& continuation);

struct InfoGainResult {
  double h_unconditional = 0.0;  // CoT scored from an empty prefix
  double h_conditional = 0.0;    // CoT scored after the question prompt
  double ig = 0.0;               // h_unconditional - h_conditional; may be negative
  std::size_t cot_length = 0;
};

/// Information the question contributes to the CoT: H(C) - H(C | Q).
InfoGainResult information_gain(const Backend& backend, const TokenSequence& question, const TokenSequence& cot);

}  // namespace cotscope
