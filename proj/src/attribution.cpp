#include "cotscope/attribution.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cotscope/error.hpp"
#include "cotscope/text_format.hpp"

namespace cotscope {

IndexRange AttributionMatrix::span(std::string_view label) const {
  for (const auto& [name, range] : input_spans) {
    if (name == label) return range;
  }
  throw std::out_of_range("no attribution span '" + std::string(label) + "'");
}

std::vector<double> integrated_importance(const Backend& backend, const TokenSequence& input,
                                          std::size_t target_position, TokenId target, int steps) {
  if (steps < 1) throw std::invalid_argument("integrated_importance: steps must be >= 1");
  if (target_position > input.size()) throw std::invalid_argument("integrated_importance: target_position out of range");
  const auto context = input.slice({0, target_position});
  const Eigen::MatrixXd emb = backend.embeddings(context);

  GradientRequest req;
  req.input = input;
  req.target_position = target_position;
  req.target_token = target;
  req.interpolation_steps = steps;

  Eigen::MatrixXd grad_sum = Eigen::MatrixXd::Zero(emb.rows(), emb.cols());
  for (int k = 1; k <= steps; ++k) {
    grad_sum += backend.embedding_gradient(req, static_cast<double>(k) / steps);
  }
  std::vector<double> out(target_position);
  for (std::size_t n = 0; n < target_position; ++n) {
    const auto r = static_cast<Eigen::Index>(n);
    out[n] = emb.row(r).dot(grad_sum.row(r)) / steps;
  }
  return out;
}

std::vector<double> attribution_effect(std::span<const double> importance) {
  double top = 0.0;
  for (double v : importance) top = std::max(top, v);
  std::vector<double> out(importance.size(), 0.0);
  if (top <= 0.0) return out;
  for (std::size_t i = 0; i < importance.size(); ++i) {
    if (importance[i] > 0.0) out[i] = importance[i] / top;
  }
  return out;
}

AttributionMatrix build_attribution_matrix(const Backend& backend, const TokenSequence& sequence, IndexRange answer,
                                           const AttributionOptions& options,
                                           std::vector<std::pair<std::string, IndexRange>> spans) {
  if (answer.empty()) throw std::invalid_argument("attribution: answer span must be non-empty");
  if (answer.begin == 0) throw std::invalid_argument("attribution: answer needs at least one preceding input token");
  if (answer.end > sequence.size()) throw std::invalid_argument("attribution: answer span out of range");

  const std::size_t cols = answer.size();
  const std::size_t rows = answer.begin + cols - 1;
  AttributionMatrix m;
  m.importance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.ae = m.importance;
  m.input_texts.assign(sequence.texts.begin(), sequence.texts.begin() + static_cast<std::ptrdiff_t>(rows));
  m.output_texts.assign(sequence.texts.begin() + static_cast<std::ptrdiff_t>(answer.begin),
                        sequence.texts.begin() + static_cast<std::ptrdiff_t>(answer.end));
  m.output_span = answer;
  m.input_spans = std::move(spans);

  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t pos = answer.begin + j;
    const auto column = integrated_importance(backend, sequence, pos, sequence.tokens[pos], options.steps);
    const auto effect = attribution_effect(column);
    for (std::size_t n = 0; n < pos; ++n) {
      m.importance(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = column[n];
      m.ae(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = effect[n];
    }
  }
  return m;
}

std::vector<double> token_aae(const AttributionMatrix& m, IndexRange rows, IndexRange answer_cols) {
  if (answer_cols.empty()) throw std::invalid_argument("token_aae: answer span must be non-empty");
  if (rows.end > m.rows() || answer_cols.end > m.cols()) throw std::out_of_range("token_aae: range outside matrix");
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t n = rows.begin; n < rows.end; ++n) {
    double sum = 0.0;
    for (std::size_t a = answer_cols.begin; a < answer_cols.end; ++a) {
      sum += m.ae(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(a));
    }
    out.push_back(sum / static_cast<double>(answer_cols.size()));
  }
  return out;
}

double average_attribution_effect(const AttributionMatrix& m, IndexRange input_span, IndexRange answer_cols) {
  if (input_span.empty()) throw std::invalid_argument("average_attribution_effect: empty input span");
  const auto per_token = token_aae(m, input_span, answer_cols);
  double sum = 0.0;
  for (double v : per_token) sum += v;
  return sum / static_cast<double>(per_token.size());
}

double average_attribution_effect(const AttributionMatrix& m, IndexRange input_span) {
  return average_attribution_effect(m, input_span, {0, m.cols()});
}

std::vector<StatementScore> rank_scores(const std::vector<std::pair<std::string, double>>& scores) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].second > scores[b].second; });
  std::vector<StatementScore> out;
  out.reserve(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    out.push_back({scores[order[r]].first, scores[order[r]].second, static_cast<int>(r + 1)});
  }
  return out;
}

std::vector<std::pair<std::string, IndexRange>> statement_spans(const ReasoningSample& sample, const std::string& prompt,
                                                                const TokenSequence& prompt_tokens) {
  // Core (whitespace-free) character extent of each token.
  std::vector<IndexRange> cores;
  for (auto r : prompt_tokens.char_offsets()) {
    const auto& t = prompt_tokens.texts[cores.size()];
    std::size_t b = 0;
    std::size_t e = t.size();
    while (b < e && std::isspace(static_cast<unsigned char>(t[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(t[e - 1]))) --e;
    cores.push_back({r.begin + b, r.begin + e});
  }
  std::vector<std::pair<std::string, IndexRange>> out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < sample.context_statements.size(); ++i) {
    const auto& st = sample.context_statements[i];
    if (st.empty()) continue;
    const auto at = prompt.find(st, cursor);
    if (at == std::string::npos) continue;
    const IndexRange chars{at, at + st.size()};
    cursor = chars.end;
    std::optional<std::size_t> first;
    std::size_t last = 0;
    for (std::size_t t = 0; t < cores.size(); ++t) {
      if (cores[t].begin < chars.end && cores[t].end > chars.begin) {
        if (!first) first = t;
        last = t;
      }
    }
    if (first) out.emplace_back(ReasoningSample::statement_id(i), IndexRange{*first, last + 1});
  }
  return out;
}

TraceAttribution attribute_trace(const Backend& backend, const ReasoningSample& sample, const ReasoningTrace& trace,
                                 const AttributionOptions& options) {
  const auto answer = trace.answer_tokens();
  if (!answer) throw PipelineError("sample " + trace.sample_id + ": no answer span to attribute");
  const auto prompt_tokens = backend.tokenize(trace.prompt);
  const auto sequence = concat(prompt_tokens, trace.cot);
  const std::size_t p = prompt_tokens.size();

  TraceAttribution out;
  out.prompt_rows = {0, p};
  out.cot_rows = {p, p + answer->begin};
  out.statements = statement_spans(sample, trace.prompt, prompt_tokens);
  auto spans = out.statements;
  spans.emplace_back("prompt", out.prompt_rows);
  spans.emplace_back("cot", out.cot_rows);
  out.matrix = build_attribution_matrix(backend, sequence, {p + answer->begin, p + answer->end}, options, std::move(spans));
  return out;
}

std::vector<StatementScore> rank_statements(const ReasoningSample& sample, const TraceAttribution& attribution) {
  std::vector<std::pair<std::string, double>> scores;
  for (std::size_t i = 0; i < sample.context_statements.size(); ++i) {
    const auto id = ReasoningSample::statement_id(i);
    double aae = 0.0;
    for (const auto& [label, range] : attribution.statements) {
      if (label == id && !range.empty()) aae = average_attribution_effect(attribution.matrix, range);
    }
    scores.emplace_back(id, aae);
  }
  return rank_scores(scores);
}

std::vector<StatementScore> rank_statements(const Backend& backend, const ReasoningSample& sample,
                                            const ReasoningTrace& trace, const AttributionOptions& options) {
  return rank_statements(sample, attribute_trace(backend, sample, trace, options));
}

bool top_k_hit(const std::vector<StatementScore>& ranked, const std::set<std::string>& targets, std::size_t k) {
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (targets.count(ranked[i].statement_id)) return true;
  }
  return false;
}

void write_attribution_matrix(std::ostream& out, const AttributionMatrix& m) {
  out << "# cotscope attribution v1\n";
  out << "# rows " << m.rows() << " cols " << m.cols() << '\n';
  out << "# output_span " << m.output_span.begin << ' ' << m.output_span.end << '\n';
  for (const auto& [label, r] : m.input_spans) {
    out << "# span " << nlohmann::json(label).dump() << ' ' << r.begin << ' ' << r.end << '\n';
  }
  for (std::size_t j = 0; j < m.output_texts.size(); ++j) {
    out << "# output " << j << ' ' << nlohmann::json(m.output_texts[j]).dump() << '\n';
  }
  for (std::size_t n = 0; n < m.rows(); ++n) {
    out << n << '\t' << nlohmann::json(n < m.input_texts.size() ? m.input_texts[n] : "").dump();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out << '\t' << format_double(m.importance(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)));
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out << '\t' << format_double(m.ae(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
}

AttributionMatrix read_attribution_matrix(std::istream& in) {
  AttributionMatrix m;
  std::string line;
  if (!std::getline(in, line) || line != "# cotscope attribution v1") throw Error("attribution file: bad header");
  std::size_t rows = 0;
  std::size_t cols = 0;
  {
    if (!std::getline(in, line)) throw Error("attribution file: missing shape");
    std::istringstream ss(line);
    std::string hash, rk, ck;
    ss >> hash >> rk >> rows >> ck >> cols;
    if (!ss || rk != "rows" || ck != "cols") throw Error("attribution file: bad shape line");
  }
  m.importance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.ae = m.importance;
  m.output_texts.resize(cols);
  std::size_t seen_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      std::istringstream ss(line.substr(2));
      std::string kind;
      ss >> kind;
      if (kind == "output_span") {
        ss >> m.output_span.begin >> m.output_span.end;
      } else if (kind == "span") {
        std::string rest;
        std::getline(ss >> std::ws, rest);
        // label is a JSON string; begin/end follow it
        const auto close = rest.rfind('"');
        auto label = nlohmann::json::parse(rest.substr(0, close + 1)).get<std::string>();
        std::istringstream nums(rest.substr(close + 1));
        IndexRange r;
        nums >> r.begin >> r.end;
        m.input_spans.emplace_back(std::move(label), r);
      } else if (kind == "output") {
        std::size_t j = 0;
        ss >> j;
        std::string rest;
        std::getline(ss >> std::ws, rest);
        if (j >= cols) throw Error("attribution file: output index out of range");
        m.output_texts[j] = nlohmann::json::parse(rest).get<std::string>();
      }
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == '\t') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 2 + 2 * cols) throw Error("attribution file: wrong field count on row " + std::to_string(seen_rows));
    const auto n = static_cast<std::size_t>(std::stoul(fields[0]));
    if (n >= rows) throw Error("attribution file: row index out of range");
    m.input_texts.push_back(nlohmann::json::parse(fields[1]).get<std::string>());
    for (std::size_t j = 0; j < cols; ++j) {
      m.importance(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = parse_double(fields[2 + j]);
      m.ae(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = parse_double(fields[2 + cols + j]);
    }
    ++seen_rows;
  }
  if (seen_rows != rows) throw Error("attribution file: expected " + std::to_string(rows) + " rows");
  return m;
}

}  // namespace cotscope
