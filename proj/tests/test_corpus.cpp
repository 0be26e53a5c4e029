#include <doctest.h>

#include <sstream>

#include "cotscope/answer.hpp"
#include "cotscope/corpus.hpp"
#include "cotscope/error.hpp"
#include "cotscope/prompts.hpp"

using namespace cotscope;

TEST_CASE("corpus records") {
  std::istringstream in(
      R"j({"id": "a", "context": ["S one.", "S two.", "S three.", "S four.", "S five."], "question": "True or false: x?", "answer": "True"})j"
      "\n\n"
      R"j({"id": "b", "context": "Gary is quiet. Gary is round.", "question": "Which?", "options": [{"label": "a", "text": "quiet"}, {"label": "B", "text": "round"}], "answer": "(b)", "rationale": "Gary is round."})j"
      "\n"
      R"j({"id": "c", "context": ["x."], "question": "q"})j"
      "\n"
      R"j({"id": "a", "context": ["x."], "question": "q", "answer": "true"})j"
      "\n"
      "not json\n");
  const auto r = parse_corpus(in);
  REQUIRE(r.samples.size() == 2);
  CHECK(r.samples[0].context_statements.size() == 5);
  CHECK(r.samples[0].gold_answer == "true");
  CHECK(r.samples[1].context_statements == std::vector<std::string>{"Gary is quiet.", "Gary is round."});
  CHECK(r.samples[1].gold_answer == "B");
  CHECK(r.samples[1].options[0].label == "A");
  REQUIRE(r.errors.size() == 3);
  CHECK(r.errors[0].line == 4);
  CHECK(r.errors[0].message.find("answer") != std::string::npos);
  CHECK(r.errors[1].line == 5);
  CHECK(r.errors[2].line == 6);
}

TEST_CASE("corpus round trip") {
  ReasoningSample s;
  s.id = "r";
  s.context_statements = {"Anne is red.", "Bob, too."};
  s.question = "True or false: Anne is red.";
  s.gold_answer = "true";
  s.gold_rationale = "Anne is red.";
  ReasoningSample m = s;
  m.id = "m";
  m.options = {{"A", "yes"}, {"B", "no"}};
  m.gold_answer = "A";
  m.gold_rationale.reset();
  std::stringstream ss;
  write_corpus(ss, {s, m});
  const auto back = parse_corpus(ss);
  CHECK(back.errors.empty());
  REQUIRE(back.samples.size() == 2);
  CHECK(back.samples[0] == s);
  CHECK(back.samples[1] == m);
  CHECK(s.statement_index("S2") == std::size_t{1});
  CHECK_FALSE(s.statement_index("S3"));
  CHECK_FALSE(s.statement_index("X1"));
  CHECK_THROWS_AS(load_corpus_strict("/nonexistent/corpus.jsonl"), Error);
}

TEST_CASE("context segmentation") {
  CHECK(segment_context("Gary is quiet. Gary is round.") == std::vector<std::string>{"Gary is quiet.", "Gary is round."});
  CHECK(segment_context("Dr. Smith is tall.") == std::vector<std::string>{"Dr. Smith is tall."});
  CHECK(segment_context("Is it? Yes! Fine") == std::vector<std::string>{"Is it?", "Yes!", "Fine"});
  CHECK(segment_context("Pi is 3.14 today.") == std::vector<std::string>{"Pi is 3.14 today."});
  CHECK(segment_context("  ").empty());
}

TEST_CASE("answer extraction") {
  auto tf = extract_answer("so the answer is True.", TaskKind::true_false);
  CHECK(tf.value == std::optional<std::string>("true"));
  CHECK(tf.raw == "True");
  CHECK(tf.chars == IndexRange{17, 21});
  CHECK(extract_answer("Answer: (B)", TaskKind::multiple_choice).value == std::optional<std::string>("B"));
  CHECK_FALSE(extract_answer("I cannot decide", TaskKind::true_false).ok());
  CHECK(extract_answer("The answer is false... no wait, the answer is true", TaskKind::true_false).value ==
        std::optional<std::string>("true"));
  CHECK_FALSE(extract_answer("the answer is maybe", TaskKind::true_false).ok());
  CHECK(extract_answer("The answer is $1,250.", TaskKind::free_form).value == std::optional<std::string>("1250"));
  CHECK(normalize_answer("unknown", TaskKind::true_false) == std::optional<std::string>("unknown"));
  CHECK_FALSE(normalize_answer("AB", TaskKind::multiple_choice));
}

TEST_CASE("task kinds") {
  ReasoningSample s;
  s.gold_answer = "false";
  CHECK(task_kind(s) == TaskKind::true_false);
  s.gold_answer = "42";
  CHECK(task_kind(s) == TaskKind::free_form);
  s.options = {{"A", "x"}};
  CHECK(task_kind(s) == TaskKind::multiple_choice);
}

TEST_CASE("prompt rendering") {
  ReasoningSample s;
  s.context_statements = {"Anne is red.", "Bob is big."};
  s.question = "Is Anne red?";
  s.options = {{"A", "yes"}, {"B", "no"}};
  const PromptTemplates t;
  const auto cot = render_cot_prompt(t, s);
  CHECK(cot.rfind("Context: Anne is red. Bob is big.\nQuestion: Is Anne red?\nOptions: (A) yes (B) no\n", 0) == 0);
  const auto hinted = render_hint_prompt(t, s, 1);
  CHECK(hinted.find("\nHint: you may need the fact that Bob is big.\nQuestion:") != std::string::npos);
  CHECK(render_no_cot_prompt(t, s).find("Hint") == std::string::npos);
  CHECK(statement_body(" Bob is big. ") == "Bob is big");
  CHECK(substitute("{a}-{b}-{c}", {{"a", "1"}, {"b", "{a}"}}) == "1-{a}-{c}");
  CHECK_THROWS(render_hint_prompt(t, s, 2));
  const auto custom = PromptTemplates::from_json({{"hint", "Note: {statement}!"}});
  CHECK(render_hint(custom, "X is y.") == "Note: X is y!");
  CHECK(custom.cot == t.cot);
}
