#include "cotscope/info_metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cotscope {

double sequence_entropy(std::span<const double> logprobs) {
  double h = 0.0;
  for (double lp : logprobs) {
    if (!(lp <= 0.0)) throw std::invalid_argument("sequence_entropy: logprob must be <= 0");
    h -= std::exp(lp) * lp;
  }
  return h + 0.0;  // no negative zero
}

double sequence_entropy(const Backend& backend, const TokenSequence& prefix, const TokenSequence& continuation) {
  const auto scored = backend.score(prefix, continuation);
  return sequence_entropy(*scored.logprobs);
}

InfoGainResult information_gain(const Backend& backend, const TokenSequence& question, const TokenSequence& cot) {
  InfoGainResult r;
  r.cot_length = cot.size();
  r.h_unconditional = sequence_entropy(backend, TokenSequence{}, cot);
  r.h_conditional = sequence_entropy(backend, question, cot);
  r.ig = r.h_unconditional - r.h_conditional;
  return r;
}

}  // namespace cotscope
