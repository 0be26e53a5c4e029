#include "cotscope/composite_backend.hpp"

#include <algorithm>
#include <stdexcept>

#include "cotscope/error.hpp"

namespace cotscope {

CompositeBackend::CompositeBackend(std::shared_ptr<const Backend> text, std::shared_ptr<const Backend> gradient)
    : text_(std::move(text)), gradient_(std::move(gradient)) {
  if (!text_ || !gradient_) throw std::invalid_argument("composite backend needs two backends");
}

Capabilities CompositeBackend::capabilities() const {
  Capabilities caps;
  for (auto c : {Capability::score, Capability::generate}) {
    if (text_->supports(c)) caps = caps | Capabilities{c};
  }
  for (auto c : {Capability::gradient, Capability::embeddings}) {
    if (gradient_->supports(c)) caps = caps | Capabilities{c};
  }
  return caps;
}

std::size_t CompositeBackend::context_length() const {
  return std::min(text_->context_length(), gradient_->context_length());
}

TokenSequence CompositeBackend::do_score(const TokenSequence& prefix, const TokenSequence& continuation) const {
  const auto scored = text_->score(text_->tokenize(prefix.text()), text_->tokenize(continuation.text()));
  if (scored.size() != continuation.size()) {
    throw Error("composite backend: text backend tokenizes the continuation differently");
  }
  TokenSequence out = continuation;
  out.logprobs = scored.logprobs;
  return out;
}

std::vector<Generation> CompositeBackend::do_generate(const TokenSequence& prompt, const GenerationParams& params) const {
  auto gens = text_->generate(text_->tokenize(prompt.text()), params);
  for (auto& g : gens) {
    auto toks = tokenize(g.text);
    g.tokens = toks.empty() ? toks : do_score(prompt, toks);
    if (g.tokens.empty()) g.tokens.logprobs.emplace();
  }
  return gens;
}

Eigen::MatrixXd CompositeBackend::do_embedding_gradient(const GradientRequest& req, double alpha) const {
  return gradient_->embedding_gradient(req, alpha);
}

Eigen::MatrixXd CompositeBackend::do_embeddings(const TokenSequence& tokens) const {
  return gradient_->embeddings(tokens);
}

}  // namespace cotscope
