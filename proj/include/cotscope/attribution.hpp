#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cotscope/backend.hpp"
#include "cotscope/corpus.hpp"

namespace cotscope {

/// Importance and attribution effect for every (input token, answer token)
/// pair. Row n is position n of the attributed sequence; column j is answer
/// token j. Column j only has inputs in rows [0, output_span.begin + j);
/// rows at or after that hold zeros.
struct AttributionMatrix {
  Eigen::MatrixXd importance;
  Eigen::MatrixXd ae;
  std::vector<std::string> input_texts;                    // one per row
  std::vector<std::pair<std::string, IndexRange>> input_spans;  // labelled row ranges
  IndexRange output_span;                                  // answer positions in the sequence
  std::vector<std::string> output_texts;                   // one per column

  std::size_t rows() const noexcept { return static_cast<std::size_t>(importance.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(importance.cols()); }
  /// Row range of a labelled span; throws std::out_of_range when absent.
  IndexRange span(std::string_view label) const;
};

struct AttributionOptions {
  int steps = 20;  // Riemann steps of the path integral
};

/// I(x_n, y) = E(x_n) . (1/m) sum_{k=1..m} df/dE(x_n) at alpha = k/m, for
/// every n < target_position, where f is the probability of `target`.
std::vector<double> integrated_importance(const Backend& backend, const TokenSequence& input,
                                          std::size_t target_position, TokenId target, int steps = 20);

/// Positive entries divided by the largest positive entry; everything else 0.
std::vector<double> attribution_effect(std::span<const double> importance);

/// One gradient pass per answer token, each conditioned on the realized
/// tokens before it.
AttributionMatrix build_attribution_matrix(const Backend& backend, const TokenSequence& sequence, IndexRange answer,
                                           const AttributionOptions& options = {},
                                           std::vector<std::pair<std::string, IndexRange>> spans = {});

/// AAE of each row in `rows`: mean AE over the answer columns in `answer_cols`.
std::vector<double> token_aae(const AttributionMatrix& m, IndexRange rows, IndexRange answer_cols);

/// Mean over the span's tokens of their per-token AAE.
double average_attribution_effect(const AttributionMatrix& m, IndexRange input_span, IndexRange answer_cols);

/// Same, over all answer columns.
double average_attribution_effect(const AttributionMatrix& m, IndexRange input_span);

struct StatementScore {
  std::string statement_id;
  double aae = 0.0;
  int rank = 0;  // 1 = highest aae
};

/// Ranks (id, score) pairs descending by score. Equal scores keep input order,
/// which for statements is ascending statement index.
std::vector<StatementScore> rank_scores(const std::vector<std::pair<std::string, double>>& scores);

/// Rows of `prompt_tokens` covering each context statement, located by text
/// search in `prompt`. Statements that cannot be found are omitted.
std::vector<std::pair<std::string, IndexRange>> statement_spans(const ReasoningSample& sample, const std::string& prompt,
                                                                const TokenSequence& prompt_tokens);

/// Everything needed to attribute a trace's answer back to its inputs.
struct TraceAttribution {
  AttributionMatrix matrix;
  IndexRange prompt_rows;
  IndexRange cot_rows;  // CoT tokens before the answer
  std::vector<std::pair<std::string, IndexRange>> statements;
};

/// Tokenizes prompt + CoT and attributes the extracted answer tokens. Throws
/// PipelineError when the trace has no answer span.
TraceAttribution attribute_trace(const Backend& backend, const ReasoningSample& sample, const ReasoningTrace& trace,
                                 const AttributionOptions& options = {});

/// Statement-level AAE against the trace's answer, ranked.
std::vector<StatementScore> rank_statements(const Backend& backend, const ReasoningSample& sample,
                                            const ReasoningTrace& trace, const AttributionOptions& options = {});
std::vector<StatementScore> rank_statements(const ReasoningSample& sample, const TraceAttribution& attribution);

/// True when any of the first k ranked ids is in `targets`.
bool top_k_hit(const std::vector<StatementScore>& ranked, const std::set<std::string>& targets, std::size_t k);

/// Columnar text format:
///   # cotscope attribution v1
///   # rows <N> cols <M>
///   # output_span <begin> <end>
///   # span <label> <begin> <end>          (zero or more)
///   # output <j> <json-escaped token text> (one per column)
///   row<TAB>token<TAB>imp_0 ... imp_{M-1}<TAB>ae_0 ... ae_{M-1}
/// with the token column JSON-escaped.
void write_attribution_matrix(std::ostream& out, const AttributionMatrix& m);
AttributionMatrix read_attribution_matrix(std::istream& in);

}  // namespace cotscope
