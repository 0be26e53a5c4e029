#include "cotscope/backend.hpp"

#include <stdexcept>
#include <string>

#include "cotscope/error.hpp"

namespace cotscope {

std::string_view to_string(Capability c) {
  switch (c) {
    case Capability::score: return "score";
    case Capability::generate: return "generate";
    case Capability::gradient: return "gradient";
    case Capability::embeddings: return "embeddings";
  }
  return "unknown";
}

void GenerationParams::validate() const {
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be nonnegative");
  if (max_new_tokens <= 0) throw std::invalid_argument("max_new_tokens must be positive");
  if (num_samples <= 0) throw std::invalid_argument("num_samples must be positive");
}

std::mt19937_64 sample_rng(std::uint64_t seed, int index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  z ^= z >> 31U;
  return std::mt19937_64(z);
}

void Backend::require(Capability c) const {
  if (!supports(c)) {
    throw CapabilityError("backend '" + std::string(name()) + "' does not support " + std::string(to_string(c)));
  }
}

TokenSequence Backend::score(const TokenSequence& prefix, const TokenSequence& continuation) const {
  require(Capability::score);
  if (continuation.empty()) throw std::invalid_argument("score: continuation must be non-empty");
  if (prefix.size() + continuation.size() > context_length()) {
    throw ContextOverflowError("score: " + std::to_string(prefix.size() + continuation.size()) +
                               " tokens exceed context length " + std::to_string(context_length()));
  }
  return do_score(prefix, continuation);
}

std::vector<Generation> Backend::generate(const TokenSequence& prompt, const GenerationParams& params) const {
  require(Capability::generate);
  if (prompt.empty()) throw std::invalid_argument("generate: prompt must be non-empty");
  params.validate();
  if (prompt.size() >= context_length()) {
    throw ContextOverflowError("generate: prompt of " + std::to_string(prompt.size()) +
                               " tokens leaves no room in context length " + std::to_string(context_length()));
  }
  return do_generate(prompt, params);
}

Eigen::MatrixXd Backend::embedding_gradient(const GradientRequest& req, double alpha) const {
  require(Capability::gradient);
  if (req.interpolation_steps < 1) throw std::invalid_argument("interpolation_steps must be >= 1");
  if (req.target_position > req.input.size()) throw std::invalid_argument("target_position out of range");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (req.target_position > context_length()) throw ContextOverflowError("gradient: input exceeds context length");
  return do_embedding_gradient(req, alpha);
}

Eigen::MatrixXd Backend::embeddings(const TokenSequence& tokens) const {
  require(Capability::embeddings);
  return do_embeddings(tokens);
}

TokenSequence Backend::do_score(const TokenSequence&, const TokenSequence&) const {
  throw CapabilityError(std::string(name()) + ": score not implemented");
}

std::vector<Generation> Backend::do_generate(const TokenSequence&, const GenerationParams&) const {
  throw CapabilityError(std::string(name()) + ": generate not implemented");
}

Eigen::MatrixXd Backend::do_embedding_gradient(const GradientRequest&, double) const {
  throw CapabilityError(std::string(name()) + ": gradient not implemented");
}

Eigen::MatrixXd Backend::do_embeddings(const TokenSequence&) const {
  throw CapabilityError(std::string(name()) + ": embeddings not implemented");
}

}  // namespace cotscope
