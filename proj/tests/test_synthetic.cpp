#include <doctest.h>

#include <algorithm>

#include "cotscope/synthetic.hpp"
#include "oracles.hpp"

using namespace cotscope;

TEST_CASE("one-step chain") {
  const auto samples = generate_synthetic_logic({5, 20, 1, 0});
  REQUIRE(samples.size() == 20);
  for (const auto& s : samples) {
    const auto proof = segment_context(*s.gold_rationale);
    REQUIRE(proof.size() == 2);
    CHECK(proof[0].find(" is ") != std::string::npos);
    CHECK(proof[1].rfind("If someone is ", 0) == 0);
    CHECK(s.context_statements.size() == 2);
    CHECK(oracle::answer_query(oracle::forward_chain(s.context_statements), s.question) == s.gold_answer);
  }
}

TEST_CASE("generator is seeded") {
  CHECK(generate_synthetic_logic({9, 30, 3, 5}) == generate_synthetic_logic({9, 30, 3, 5}));
  CHECK(generate_synthetic_logic({9, 30, 3, 5}) != generate_synthetic_logic({10, 30, 3, 5}));
}

TEST_CASE("samples agree with forward chaining and keep rationale in context") {
  for (std::size_t depth = 1; depth <= 5; ++depth) {
    const auto samples = generate_synthetic_logic({depth, 60, depth, 6});
    bool saw_false = false, saw_true = false;
    for (const auto& s : samples) {
      CHECK(s.context_statements.size() == depth + 1 + 6);
      const auto c = oracle::forward_chain(s.context_statements);
      CHECK_FALSE(c.contradiction);
      CHECK(oracle::answer_query(c, s.question) == s.gold_answer);
      for (const auto& st : segment_context(*s.gold_rationale))
        CHECK(std::find(s.context_statements.begin(), s.context_statements.end(), st) != s.context_statements.end());
      saw_true |= s.gold_answer == "true";
      saw_false |= s.gold_answer == "false";
    }
    CHECK(saw_true);
    CHECK(saw_false);
  }
}

TEST_CASE("invalid generator settings") {
  CHECK_THROWS(generate_synthetic_logic({0, 1, 0, 0}));
  CHECK_THROWS(generate_synthetic_logic({0, 1, 40, 0}));
}
