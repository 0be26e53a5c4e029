#pragma once

#include <memory>

#include "cotscope/backend.hpp"

namespace cotscope {

/// Routes score/generate to a text backend and gradient/embeddings to a
/// gradient backend. Tokenization follows the gradient backend so that token
/// ids line up with its embedding table; the text backend receives surface
/// strings re-tokenized in its own scheme.
class CompositeBackend final : public Backend {
 public:
  CompositeBackend(std::shared_ptr<const Backend> text, std::shared_ptr<const Backend> gradient);

  std::string_view name() const override { return "composite"; }
  Capabilities capabilities() const override;
  std::size_t context_length() const override;
  TokenSequence tokenize(std::string_view text) const override { return gradient_->tokenize(text); }

 protected:
  TokenSequence do_score(const TokenSequence& prefix, const TokenSequence& continuation) const override;
  std::vector<Generation> do_generate(const TokenSequence& prompt, const GenerationParams& params) const override;
  Eigen::MatrixXd do_embedding_gradient(const GradientRequest& req, double alpha) const override;
  Eigen::MatrixXd do_embeddings(const TokenSequence& tokens) const override;

 private:
  std::shared_ptr<const Backend> text_;
  std::shared_ptr<const Backend> gradient_;
};

}  // namespace cotscope
