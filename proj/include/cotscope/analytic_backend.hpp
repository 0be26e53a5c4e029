#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cotscope/backend.hpp"

namespace cotscope {

/// Parameters of a bag-of-embeddings linear-softmax language model:
///   h = sum of input embeddings,  p(. | context) = softmax(W h + b).
struct AnalyticModel {
  std::vector<std::string> vocab;
  Eigen::MatrixXd embeddings;      // vocab x width
  Eigen::MatrixXd output_weights;  // vocab x width
  Eigen::VectorXd bias;            // vocab
  std::size_t context_length = 4096;
  std::optional<std::string> unk;
  std::optional<std::string> eos;

  /// JSON schema:
  ///   {"vocab": [...], "embeddings": [[...]...], "output_weights": [[...]...],
  ///    "bias": [...] (optional, zeros), "context_length": n (optional),
  ///    "unk": "<unk>" (optional), "eos": "<eos>" (optional)}
  static AnalyticModel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Reference backend with closed-form scoring and gradients. Immutable after
/// construction and safe to share across threads.
class AnalyticBackend final : public Backend {
 public:
  explicit AnalyticBackend(AnalyticModel model);

  static AnalyticBackend load(const std::filesystem::path& path);

  std::string_view name() const override { return "analytic"; }
  Capabilities capabilities() const override {
    return {Capability::score, Capability::generate, Capability::gradient, Capability::embeddings};
  }
  std::size_t context_length() const override { return model_.context_length; }
  TokenSequence tokenize(std::string_view text) const override { return vocab_.tokenize(text); }

  const AnalyticModel& model() const noexcept { return model_; }
  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  std::size_t width() const noexcept { return static_cast<std::size_t>(model_.embeddings.cols()); }

  /// Next-token distribution given a pooled (already summed and scaled) input.
  Eigen::VectorXd distribution(const Eigen::VectorXd& pooled) const;

  /// Next-token distribution given a token context.
  Eigen::VectorXd distribution(std::span<const TokenId> context) const;

 protected:
  TokenSequence do_score(const TokenSequence& prefix, const TokenSequence& continuation) const override;
  std::vector<Generation> do_generate(const TokenSequence& prompt, const GenerationParams& params) const override;
  Eigen::MatrixXd do_embedding_gradient(const GradientRequest& req, double alpha) const override;
  Eigen::MatrixXd do_embeddings(const TokenSequence& tokens) const override;

 private:
  void check_token(TokenId id) const;

  AnalyticModel model_;
  Vocabulary vocab_;
};

}  // namespace cotscope
