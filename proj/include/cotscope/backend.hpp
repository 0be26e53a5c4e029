#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cotscope/tokens.hpp"

namespace cotscope {

enum class Capability : unsigned {
  score = 1U << 0U,
  generate = 1U << 1U,
  gradient = 1U << 2U,
  embeddings = 1U << 3U,
};

std::string_view to_string(Capability c);

class Capabilities {
 public:
  constexpr Capabilities() = default;
  constexpr Capabilities(std::initializer_list<Capability> caps) {
    for (auto c : caps) bits_ |= static_cast<unsigned>(c);
  }

  constexpr bool has(Capability c) const noexcept { return (bits_ & static_cast<unsigned>(c)) != 0; }
  constexpr Capabilities operator|(Capabilities other) const noexcept {
    Capabilities out;
    out.bits_ = bits_ | other.bits_;
    return out;
  }

 private:
  unsigned bits_ = 0;
};

struct GenerationParams {
  double temperature = 0.0;
  int max_new_tokens = 256;
  int num_samples = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One sampled continuation. `tokens.logprobs` is filled at generation time and
/// agrees with score(prompt, tokens).
struct Generation {
  TokenSequence tokens;
  std::string text;
  GenerationParams params;
  int sample_index = 0;
};

/// Independent, reproducible stream for sample `index` of a seeded request.
std::mt19937_64 sample_rng(std::uint64_t seed, int index);

enum class Baseline { zero_embedding };

/// Inputs for one integrated-gradient pass. The model conditions on
/// input[0, target_position) and the differentiated quantity is the
/// probability of target_token at target_position.
struct GradientRequest {
  TokenSequence input;
  std::size_t target_position = 0;
  TokenId target_token = 0;
  int interpolation_steps = 20;
  Baseline baseline = Baseline::zero_embedding;
};

/// Contract shared by every language-model backend.
///
/// Public entry points check declared capabilities and preconditions, then
/// dispatch to the protected hooks. Calling an undeclared capability throws
/// CapabilityError.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string_view name() const = 0;
  virtual Capabilities capabilities() const = 0;
  virtual std::size_t context_length() const = 0;
  virtual TokenSequence tokenize(std::string_view text) const = 0;

  bool supports(Capability c) const { return capabilities().has(c); }

  /// Returns `continuation` with logprobs filled: entry i is
  /// log p(c_i | prefix, c_1..c_{i-1}). An empty prefix scores from sequence start.
  TokenSequence score(const TokenSequence& prefix, const TokenSequence& continuation) const;

  std::vector<Generation> generate(const TokenSequence& prompt, const GenerationParams& params) const;

  /// Gradient of f with respect to the input embedding of every n < target_position,
  /// evaluated at the point where every input embedding is scaled by alpha.
  /// Rows are tokens, columns embedding dimensions.
  Eigen::MatrixXd embedding_gradient(const GradientRequest& req, double alpha) const;

  /// Unscaled input embeddings, one row per token.
  Eigen::MatrixXd embeddings(const TokenSequence& tokens) const;

 protected:
  virtual TokenSequence do_score(const TokenSequence& prefix, const TokenSequence& continuation) const;
  virtual std::vector<Generation> do_generate(const TokenSequence& prompt, const GenerationParams& params) const;
  virtual Eigen::MatrixXd do_embedding_gradient(const GradientRequest& req, double alpha) const;
  virtual Eigen::MatrixXd do_embeddings(const TokenSequence& tokens) const;

  void require(Capability c) const;
};

}  // namespace cotscope
