#include <doctest.h>

#include <random>
#include <sstream>

#include "cotscope/analytic_backend.hpp"
#include "cotscope/attribution.hpp"
#include "cotscope/error.hpp"
#include "cotscope/prompts.hpp"
#include "cotscope/quire.hpp"
#include "cotscope/scripted_backend.hpp"
#include "oracles.hpp"
#include "rigs.hpp"

using namespace cotscope;

namespace {

// Words that are not in the vocabulary map to a zero embedding; only "zed"
// has one, and the answer "true" reads it.
AnalyticBackend marker_backend() {
  AnalyticModel m;
  m.vocab = {"<unk>", "true", "false", "zed"};
  m.unk = "<unk>";
  m.embeddings = Eigen::MatrixXd::Zero(4, 2);
  m.embeddings(3, 0) = 1.0;
  m.output_weights = Eigen::MatrixXd::Zero(4, 2);
  m.output_weights(1, 0) = 1.0;
  m.bias = Eigen::VectorXd::Zero(4);
  return AnalyticBackend(m);
}

ReasoningSample four_statements(std::size_t marked) {
  ReasoningSample s;
  s.id = "r1";
  s.context_statements = {"Anne is red.", "Bob is big.", "Carl is cold.", "Dan is old."};
  s.context_statements[marked] = s.context_statements[marked].substr(0, s.context_statements[marked].size() - 1) + " zed.";
  s.question = "True or false: Carl is cold.";
  s.gold_answer = "true";
  return s;
}

ReasoningTrace trace_for(const Backend& b, const ReasoningSample& s, const std::string& cot) {
  const auto prompt = render_cot_prompt({}, s);
  Generation g;
  g.tokens = b.tokenize(cot);
  g.text = cot;
  return make_trace(s, prompt, g);
}

}  // namespace

TEST_CASE("attribution effect") {
  CHECK(attribution_effect(std::vector<double>{2.0, 1.0, -0.5}) == std::vector<double>{1.0, 0.5, 0.0});
  CHECK(attribution_effect(std::vector<double>{-1.0, -2.0}) == std::vector<double>{0.0, 0.0});
  CHECK(attribution_effect(std::vector<double>{3.0}) == std::vector<double>{1.0});
  CHECK(attribution_effect(std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("average attribution effect") {
  AttributionMatrix m;
  m.importance = Eigen::MatrixXd::Zero(1, 2);
  m.ae = Eigen::MatrixXd(1, 2);
  m.ae << 0.4, 0.6;
  CHECK(average_attribution_effect(m, {0, 1}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(average_attribution_effect(m, {0, 1}, {1, 2}) == 0.6);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  m.ae.resize(4, 3);
  m.importance = Eigen::MatrixXd::Zero(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) m.ae(i, j) = u(rng);
  CHECK(std::abs(average_attribution_effect(m, {0, 4}) - oracle::aae_double_loop(m.ae, 0, 4, 0, 3)) <= 1e-12);
  const auto per_token = token_aae(m, {1, 3}, {0, 3});
  CHECK(per_token.size() == 2);
  CHECK(per_token[0] == doctest::Approx(m.ae.row(1).mean()).epsilon(1e-15));
}

TEST_CASE("zero-embedding tokens get zero importance") {
  const auto b = marker_backend();
  const auto input = b.tokenize("foo zed bar");
  const auto imp = integrated_importance(b, input, 3, 1, 20);
  CHECK(imp[0] == 0.0);
  CHECK(imp[2] == 0.0);
  CHECK(imp[1] > 0.0);
}

TEST_CASE("attribution matrix layout") {
  const AnalyticBackend b(rig::random_model(8, 7, 3));
  const auto seq = b.tokenize("w1 w2 w3 w4 w5");
  const auto m = build_attribution_matrix(b, seq, {3, 5}, {10});
  CHECK(m.rows() == 4);
  CHECK(m.cols() == 2);
  CHECK(m.importance(3, 0) == 0.0);  // not visible to the first answer token
  CHECK(m.ae.maxCoeff() <= 1.0);
  CHECK(m.ae.minCoeff() >= 0.0);
  CHECK_THROWS(build_attribution_matrix(b, seq, {0, 2}));

  std::stringstream ss;
  write_attribution_matrix(ss, m);
  const auto back = read_attribution_matrix(ss);
  CHECK(back.importance == m.importance);
  CHECK(back.ae == m.ae);
  CHECK(back.input_texts == m.input_texts);
  CHECK(back.output_span == m.output_span);
}

TEST_CASE("statement with the dominant gradient ranks first") {
  const auto b = marker_backend();
  const auto s = four_statements(2);
  const auto trace = trace_for(b, s, " I think so, the answer is true.");
  REQUIRE(trace.answer == std::optional<std::string>("true"));
  const auto ranked = rank_statements(b, s, trace, {});
  REQUIRE(ranked.size() == 4);
  CHECK(ranked[0].statement_id == "S3");
  CHECK(ranked[0].rank == 1);
  CHECK(ranked[0].aae > 0.0);
  CHECK(ranked[1].aae == 0.0);
  CHECK(ranked[1].statement_id == "S1");  // ties keep statement order
}

TEST_CASE("identical scores keep statement order") {
  const auto r = rank_scores({{"S1", 0.2}, {"S2", 0.2}, {"S3", 0.2}});
  CHECK(r[0].statement_id == "S1");
  CHECK(r[2].statement_id == "S3");
  CHECK(r[2].rank == 3);
}

TEST_CASE("top-k hit") {
  const auto r = rank_scores({{"S1", 0.9}, {"S2", 0.5}, {"S3", 0.1}});
  CHECK(top_k_hit(r, {"S2"}, 3));
  CHECK_FALSE(top_k_hit(r, {"S2"}, 1));
  CHECK_FALSE(top_k_hit(r, {"S9"}, 3));
}

TEST_CASE("statement spans cover the statement tokens") {
  const auto b = marker_backend();
  const auto s = four_statements(0);
  const auto prompt = render_cot_prompt({}, s);
  const auto toks = b.tokenize(prompt);
  const auto spans = statement_spans(s, prompt, toks);
  REQUIRE(spans.size() == 4);
  std::string joined;
  for (std::size_t i = spans[1].second.begin; i < spans[1].second.end; ++i) joined += toks.texts[i];
  CHECK(joined == " Bob is big.");
}

TEST_CASE("attribution needs gradients") {
  const ScriptedBackend s(ScriptedTable{});
  CHECK_THROWS_AS(integrated_importance(s, s.tokenize("a b"), 2, 0), CapabilityError);
}

TEST_CASE("trace without an answer cannot be attributed") {
  const auto b = marker_backend();
  const auto s = four_statements(1);
  const auto trace = trace_for(b, s, " no idea");
  CHECK_THROWS_AS(attribute_trace(b, s, trace), PipelineError);
}
