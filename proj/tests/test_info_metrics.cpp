#include <doctest.h>

#include <cmath>
#include <random>

#include "cotscope/analytic_backend.hpp"
#include "cotscope/info_metrics.hpp"
#include "cotscope/scripted_backend.hpp"
#include "oracles.hpp"
#include "rigs.hpp"

using namespace cotscope;

TEST_CASE("realized-token entropy") {
  const std::vector<double> certain{0.0, 0.0, 0.0};
  CHECK(sequence_entropy(certain) == 0.0);
  const std::vector<double> halves(3, std::log(0.5));
  CHECK(sequence_entropy(halves) == doctest::Approx(1.0397207708399179).epsilon(1e-15));
}

TEST_CASE("entropy on the analytic backend matches brute force") {
  const AnalyticBackend b(rig::random_model(17, 10, 4, 0.8));
  std::mt19937_64 rng(3);
  const auto prefix = rig::random_tokens(rng, b, 3);
  const auto cont = rig::random_tokens(rng, b, 5);
  const auto& m = b.model();
  double want = 0.0;
  Eigen::MatrixXd rows = b.embeddings(prefix);
  for (std::size_t i = 0; i < cont.size(); ++i) {
    const double p = oracle::bag_softmax_prob(rows, m.output_weights, m.bias, cont.tokens[i]);
    want -= p * std::log(p);
    rows.conservativeResize(rows.rows() + 1, Eigen::NoChange);
    rows.row(rows.rows() - 1) = m.embeddings.row(cont.tokens[i]);
  }
  CHECK(sequence_entropy(b, prefix, cont) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("information gain identities") {
  ScriptedTable flat;
  flat.default_prob = 0.6;
  const ScriptedBackend f(flat);
  CHECK(information_gain(f, f.tokenize("Q"), f.tokenize(" a b c")).ig == 0.0);

  ScriptedTable t;
  t.scores = {{"", std::nullopt, std::nullopt, 0.5}, {"*", std::nullopt, std::nullopt, 1.0}};
  const ScriptedBackend b(t);
  const auto r = information_gain(b, b.tokenize("Q"), b.tokenize(" a b c d"));
  CHECK(r.h_conditional == 0.0);
  CHECK(r.ig == doctest::Approx(4 * 0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(r.cot_length == 4);
}

TEST_CASE("information gain on a random table matches the table") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    ScriptedTable t;
    std::vector<double> pu(6), pc(6);
    for (std::size_t i = 0; i < 6; ++i) {
      pu[i] = u(rng);
      pc[i] = u(rng);
      t.scores.push_back({"", std::nullopt, i, pu[i]});
      t.scores.push_back({"Question", std::nullopt, i, pc[i]});
    }
    const ScriptedBackend b(t);
    double want = 0.0;
    for (std::size_t i = 0; i < 6; ++i) want += -pu[i] * std::log(pu[i]) + pc[i] * std::log(pc[i]);
    const auto r = information_gain(b, b.tokenize("Question: why?"), b.tokenize(" a b c d e f"));
    CHECK(r.ig == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("raising a conditional probability below 1/e can lower IG") {
  // -p ln p grows on (0, 1/e), so the monotone response only holds above it.
  ScriptedTable lo, hi;
  lo.scores = {{"", std::nullopt, std::nullopt, 0.5}, {"*", std::nullopt, std::nullopt, 0.1}};
  hi.scores = {{"", std::nullopt, std::nullopt, 0.5}, {"*", std::nullopt, std::nullopt, 0.3}};
  const ScriptedBackend a(lo), b(hi);
  const double ig_lo = information_gain(a, a.tokenize("Q"), a.tokenize(" x")).ig;
  const double ig_hi = information_gain(b, b.tokenize("Q"), b.tokenize(" x")).ig;
  CHECK(ig_hi < ig_lo);
}

TEST_CASE("stored logprobs are ignored and the continuation is rescored") {
  ScriptedTable t;
  t.default_prob = 0.5;
  const ScriptedBackend b(t);
  auto c = b.tokenize(" a b");
  c.logprobs = std::vector<double>{0.0, 0.0};
  CHECK(sequence_entropy(b, {}, c) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}
