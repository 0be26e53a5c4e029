#include "cotscope/analytic_backend.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cotscope/error.hpp"

namespace cotscope {

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, std::size_t expected_rows, const char* what) {
  if (!rows.is_array() || rows.size() != expected_rows) {
    throw ConfigError(std::string("analytic model: '") + what + "' must have one row per vocabulary entry");
  }
  const std::size_t width = rows.empty() ? 0 : rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(expected_rows), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < expected_rows; ++r) {
    if (rows[r].size() != width) throw ConfigError(std::string("analytic model: ragged '") + what + "'");
    for (std::size_t c = 0; c < width; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - top).exp().matrix();
  return e / e.sum();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  const double lse = top + std::log((logits.array() - top).exp().sum());
  return (logits.array() - lse).matrix();
}

}  // namespace

AnalyticModel AnalyticModel::from_json(const nlohmann::json& j) {
  AnalyticModel m;
  m.vocab = j.at("vocab").get<std::vector<std::string>>();
  const auto v = m.vocab.size();
  if (v == 0) throw ConfigError("analytic model: empty vocabulary");
  m.embeddings = matrix_from_json(j.at("embeddings"), v, "embeddings");
  m.output_weights = matrix_from_json(j.at("output_weights"), v, "output_weights");
  if (m.embeddings.cols() != m.output_weights.cols()) {
    throw ConfigError("analytic model: embeddings and output_weights widths differ");
  }
  m.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(v));
  if (j.contains("bias")) {
    auto b = j.at("bias").get<std::vector<double>>();
    if (b.size() != v) throw ConfigError("analytic model: bias length must equal vocabulary size");
    for (std::size_t i = 0; i < v; ++i) m.bias(static_cast<Eigen::Index>(i)) = b[i];
  }
  if (j.contains("context_length")) m.context_length = j.at("context_length").get<std::size_t>();
  if (j.contains("unk")) m.unk = j.at("unk").get<std::string>();
  if (j.contains("eos")) m.eos = j.at("eos").get<std::string>();
  return m;
}

nlohmann::json AnalyticModel::to_json() const {
  nlohmann::json j;
  j["vocab"] = vocab;
  j["embeddings"] = matrix_to_json(embeddings);
  j["output_weights"] = matrix_to_json(output_weights);
  j["bias"] = std::vector<double>(bias.data(), bias.data() + bias.size());
  j["context_length"] = context_length;
  if (unk) j["unk"] = *unk;
  if (eos) j["eos"] = *eos;
  return j;
}

AnalyticBackend::AnalyticBackend(AnalyticModel model) : model_(std::move(model)), vocab_(model_.vocab, model_.unk) {
  const auto v = static_cast<Eigen::Index>(model_.vocab.size());
  if (model_.embeddings.rows() != v || model_.output_weights.rows() != v || model_.bias.size() != v) {
    throw std::invalid_argument("analytic model: parameter shapes disagree with vocabulary");
  }
  if (model_.embeddings.cols() != model_.output_weights.cols()) {
    throw std::invalid_argument("analytic model: embedding and output widths differ");
  }
  if (model_.eos && !vocab_.find(*model_.eos)) throw std::invalid_argument("analytic model: eos not in vocabulary");
}

AnalyticBackend AnalyticBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendUnavailableError("cannot open analytic model file " + path.string());
  return AnalyticBackend(AnalyticModel::from_json(nlohmann::json::parse(in)));
}

void AnalyticBackend::check_token(TokenId id) const {
  if (!vocab_.contains(id)) throw UnknownTokenError("analytic backend: unknown token id " + std::to_string(id));
}

Eigen::VectorXd AnalyticBackend::distribution(const Eigen::VectorXd& pooled) const {
  return softmax(model_.output_weights * pooled + model_.bias);
}

Eigen::VectorXd AnalyticBackend::distribution(std::span<const TokenId> context) const {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width()));
  for (TokenId id : context) {
    check_token(id);
    h += model_.embeddings.row(id).transpose();
  }
  return distribution(h);
}

TokenSequence AnalyticBackend::do_score(const TokenSequence& prefix, const TokenSequence& continuation) const {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width()));
  for (TokenId id : prefix.tokens) {
    check_token(id);
    h += model_.embeddings.row(id).transpose();
  }
  TokenSequence out = continuation;
  std::vector<double> lps;
  lps.reserve(continuation.size());
  for (TokenId id : continuation.tokens) {
    check_token(id);
    Eigen::VectorXd lp = log_softmax(model_.output_weights * h + model_.bias);
    lps.push_back(std::min(lp(id), 0.0));
    h += model_.embeddings.row(id).transpose();
  }
  out.logprobs = std::move(lps);
  return out;
}

std::vector<Generation> AnalyticBackend::do_generate(const TokenSequence& prompt, const GenerationParams& params) const {
  Eigen::VectorXd base = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width()));
  for (TokenId id : prompt.tokens) {
    check_token(id);
    base += model_.embeddings.row(id).transpose();
  }
  const std::optional<TokenId> eos = model_.eos ? vocab_.find(*model_.eos) : std::nullopt;
  const std::size_t room = context_length() - prompt.size();
  const std::size_t budget = std::min<std::size_t>(static_cast<std::size_t>(params.max_new_tokens), room);

  std::vector<Generation> out;
  for (int s = 0; s < params.num_samples; ++s) {
    auto rng = sample_rng(params.seed, s);
    Eigen::VectorXd h = base;
    Generation g;
    g.params = params;
    g.sample_index = s;
    std::vector<double> lps;
    for (std::size_t step = 0; step < budget; ++step) {
      const Eigen::VectorXd logits = model_.output_weights * h + model_.bias;
      const Eigen::VectorXd lp = log_softmax(logits);
      Eigen::Index pick = 0;
      if (params.temperature == 0.0) {
        lp.maxCoeff(&pick);
      } else {
        const Eigen::VectorXd p = softmax(logits / params.temperature);
        std::discrete_distribution<Eigen::Index> draw(p.data(), p.data() + p.size());
        pick = draw(rng);
      }
      const auto id = static_cast<TokenId>(pick);
      if (eos && id == *eos) break;
      g.tokens.tokens.push_back(id);
      g.tokens.texts.push_back(" " + model_.vocab[static_cast<std::size_t>(id)]);
      lps.push_back(std::min(lp(pick), 0.0));
      h += model_.embeddings.row(id).transpose();
    }
    g.tokens.logprobs = std::move(lps);
    g.text = g.tokens.text();
    out.push_back(std::move(g));
  }
  return out;
}

Eigen::MatrixXd AnalyticBackend::do_embedding_gradient(const GradientRequest& req, double alpha) const {
  check_token(req.target_token);
  const auto n = static_cast<Eigen::Index>(req.target_position);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const TokenId id = req.input.tokens[static_cast<std::size_t>(i)];
    check_token(id);
    h += model_.embeddings.row(id).transpose();
  }
  h *= alpha;
  const Eigen::VectorXd p = distribution(h);
  const double pt = p(req.target_token);
  // d p_t / d z_j = p_t (delta_tj - p_j); z = W h + b; dh/dx_n = I at x = alpha E.
  Eigen::VectorXd dz = -pt * p;
  dz(req.target_token) += pt;
  const Eigen::VectorXd grad = model_.output_weights.transpose() * dz;
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(width()));
  for (Eigen::Index i = 0; i < n; ++i) out.row(i) = grad.transpose();
  return out;
}

Eigen::MatrixXd AnalyticBackend::do_embeddings(const TokenSequence& tokens) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(tokens.size()), static_cast<Eigen::Index>(width()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    check_token(tokens.tokens[i]);
    out.row(static_cast<Eigen::Index>(i)) = model_.embeddings.row(tokens.tokens[i]);
  }
  return out;
}

}  // namespace cotscope
