// Acceptance gate: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "cotscope/analytic_backend.hpp"
#include "cotscope/attribution.hpp"
#include "cotscope/cli.hpp"
#include "cotscope/difficulty.hpp"
#include "cotscope/faithfulness.hpp"
#include "cotscope/flow.hpp"
#include "cotscope/info_metrics.hpp"
#include "cotscope/quire.hpp"
#include "cotscope/scripted_backend.hpp"
#include "cotscope/synthetic.hpp"
#include "oracles.hpp"
#include "rigs.hpp"

using namespace cotscope;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------- 1
Check mif_oracle() {
  Check c;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> len(2, 50);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    std::set<double> seen;
    for (auto& x : v) {
      do x = u(rng);
      while (!seen.insert(x).second);
    }
    const auto r = mif(v);
    const double want = oracle::spearman_vs_index(v);
    worst = std::max(worst, std::abs(r.mif - want));
    c.expect(!r.ties, "tie flagged on a tie-free sequence");
  }
  c.expect(worst <= 1e-9, "max |mif - oracle| = " + fmt(worst));
  for (std::size_t n = 2; n <= 50; ++n) {
    std::vector<double> up(n), down(n);
    for (std::size_t i = 0; i < n; ++i) {
      up[i] = std::exp(0.1 * static_cast<double>(i));
      down[i] = -up[i];
    }
    c.expect(mif(up).mif == 1.0, "increasing n=" + std::to_string(n) + " gave " + fmt(mif(up).mif));
    c.expect(mif(down).mif == -1.0, "decreasing n=" + std::to_string(n) + " gave " + fmt(mif(down).mif));
  }
  if (c.ok) c.detail = "max deviation " + fmt(worst);
  return c;
}

// ---------------------------------------------------------------------- 2
Check integrated_gradients() {
  Check c;
  std::mt19937_64 rng(202);
  double worst_grad = 0.0;
  double worst_complete = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const AnalyticBackend b(rig::random_model(1000 + static_cast<std::uint64_t>(trial), 12, 5, 0.6));
    const auto input = rig::random_tokens(rng, b, 2 + static_cast<std::size_t>(trial % 7));
    const TokenId target = static_cast<TokenId>(trial % 12);
    const auto& m = b.model();
    const Eigen::MatrixXd e = b.embeddings(input);

    for (double alpha : {0.25, 0.6, 1.0}) {
      GradientRequest req{input, input.size(), target, 20, Baseline::zero_embedding};
      const Eigen::MatrixXd g = b.embedding_gradient(req, alpha);
      const Eigen::MatrixXd x = alpha * e;
      Eigen::MatrixXd fd(g.rows(), g.cols());
      const double h = 1e-5;
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index k = 0; k < x.cols(); ++k) {
          Eigen::MatrixXd xp = x, xm = x;
          xp(r, k) += h;
          xm(r, k) -= h;
          fd(r, k) = (oracle::bag_softmax_prob(xp, m.output_weights, m.bias, target) -
                      oracle::bag_softmax_prob(xm, m.output_weights, m.bias, target)) /
                     (2 * h);
        }
      }
      const double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-12);
      for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index k = 0; k < g.cols(); ++k)
          worst_grad = std::max(worst_grad, std::abs(g(r, k) - fd(r, k)) / std::max(std::abs(fd(r, k)), scale));
    }

    const auto imp = integrated_importance(b, input, input.size(), target, 200);
    double sum = 0.0;
    for (double v : imp) sum += v;
    const double f_in = oracle::bag_softmax_prob(e, m.output_weights, m.bias, target);
    const double f_base =
        oracle::bag_softmax_prob(Eigen::MatrixXd::Zero(e.rows(), e.cols()), m.output_weights, m.bias, target);
    worst_complete = std::max(worst_complete, std::abs(sum - (f_in - f_base)));
  }
  c.expect(worst_grad <= 1e-4, "gradient relative error " + fmt(worst_grad));
  c.expect(worst_complete <= 1e-2, "completeness gap " + fmt(worst_complete));
  if (c.ok) c.detail = "grad rel err " + fmt(worst_grad) + ", completeness gap " + fmt(worst_complete);
  return c;
}

// ---------------------------------------------------------------------- 3
Check ae_algebra() {
  Check c;
  const std::vector<double> in{2.0, 1.0, -0.5};
  const auto ae = attribution_effect(in);
  c.expect(ae == std::vector<double>{1.0, 0.5, 0.0}, "AE([2,1,-0.5]) != [1,0.5,0]");

  std::mt19937_64 rng(303);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.01, 100.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index rows = 3 + t % 17;
    const Eigen::Index cols = 1 + t % 6;
    AttributionMatrix m;
    m.importance = rig::random_matrix(rng, rows, cols, 1.0);
    m.ae.resize(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::vector<double> col(static_cast<std::size_t>(rows));
      for (Eigen::Index i = 0; i < rows; ++i) col[static_cast<std::size_t>(i)] = m.importance(i, j);
      const auto a = attribution_effect(col);
      const double k = pos(rng);
      std::vector<double> scaled(col);
      for (auto& x : scaled) x *= k;
      const auto as = attribution_effect(scaled);
      for (std::size_t i = 0; i < a.size(); ++i) {
        c.expect(a[i] >= 0.0 && a[i] <= 1.0, "AE outside [0,1]");
        m.ae(static_cast<Eigen::Index>(i), j) = a[i];
      }
      // rankings under positive scaling
      std::vector<std::pair<std::string, double>> s1, s2;
      for (std::size_t i = 0; i < a.size(); ++i) {
        s1.emplace_back("S" + std::to_string(i + 1), a[i]);
        s2.emplace_back("S" + std::to_string(i + 1), as[i]);
      }
      const auto r1 = rank_scores(s1);
      const auto r2 = rank_scores(s2);
      for (std::size_t i = 0; i < r1.size(); ++i)
        c.expect(r1[i].statement_id == r2[i].statement_id, "ranking changed under positive scaling");
    }
    const std::size_t r0 = static_cast<std::size_t>(t % 3);
    const std::size_t r1 = static_cast<std::size_t>(rows);
    const std::size_t c0 = static_cast<std::size_t>(t % static_cast<int>(cols));
    const std::size_t c1 = static_cast<std::size_t>(cols);
    const double got = average_attribution_effect(m, {r0, r1}, {c0, c1});
    worst = std::max(worst, std::abs(got - oracle::aae_double_loop(m.ae, r0, r1, c0, c1)));
    const double all = average_attribution_effect(m, {0, r1});
    worst = std::max(worst, std::abs(all - oracle::aae_double_loop(m.ae, 0, r1, 0, c1)));
  }
  c.expect(worst <= 1e-12, "AAE vs double loop " + fmt(worst));
  if (c.ok) c.detail = "max AAE deviation " + fmt(worst);
  return c;
}

// ---------------------------------------------------------------------- 4
ScriptedBackend position_table(const std::vector<double>& uncond, const std::vector<double>& cond) {
  ScriptedTable t;
  for (std::size_t i = 0; i < uncond.size(); ++i) t.scores.push_back({"", std::nullopt, i, uncond[i]});
  for (std::size_t i = 0; i < cond.size(); ++i) t.scores.push_back({"*", std::nullopt, i, cond[i]});
  return ScriptedBackend(t);
}

Check ig_identities() {
  Check c;
  {
    ScriptedTable flat;
    flat.default_prob = 0.3;
    const ScriptedBackend b(flat);
    const auto r = information_gain(b, b.tokenize("Is it so?"), b.tokenize(" one two three four five"));
    c.expect(r.ig == 0.0, "context-independent IG = " + fmt(r.ig));
  }
  {
    const auto b = position_table({0.5, 0.5, 0.5, 0.5}, {1.0, 1.0, 1.0, 1.0});
    const auto r = information_gain(b, b.tokenize("question"), b.tokenize(" a b c d"));
    c.expect(std::abs(r.ig - 4 * 0.5 * std::log(2.0)) <= 1e-9, "hand table IG = " + fmt(r.ig));
  }
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> any(0.01, 1.0);
  std::uniform_real_distribution<double> high(1.0 / std::exp(1.0), 1.0);
  std::uniform_int_distribution<int> len(1, 8);
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(len(rng));
    std::vector<double> u(n), q(n);
    for (auto& x : u) x = any(rng);
    for (auto& x : q) x = high(rng);
    std::string cot;
    for (std::size_t i = 0; i < n; ++i) cot += " t" + std::to_string(i);
    const auto before = position_table(u, q);
    const double ig0 = information_gain(before, before.tokenize("q"), before.tokenize(cot)).ig;
    const std::size_t i = static_cast<std::size_t>(rng() % n);
    q[i] = std::uniform_real_distribution<double>(q[i], 1.0)(rng);
    const auto after = position_table(u, q);
    const double ig1 = information_gain(after, after.tokenize("q"), after.tokenize(cot)).ig;
    if (ig1 < ig0) ++violations;
  }
  c.expect(violations == 0, std::to_string(violations) + " edits decreased IG");
  if (c.ok) c.detail = "100 edits, 0 violations";
  return c;
}

// ---------------------------------------------------------------------- 5
Check fbs_identities() {
  Check c;
  const FbsItem good{true, 0.8}, bad{false, 0.8};
  c.expect(fbs(std::vector<FbsItem>{good}).fbs == 0.8, "correct branch");
  c.expect(fbs(std::vector<FbsItem>{bad}).fbs == 1.0 - 0.8 && std::abs(fbs(std::vector<FbsItem>{bad}).fbs - 0.2) < 1e-15,
           "incorrect branch");
  c.expect(fbs(std::vector<FbsItem>{good, bad}).fbs == 0.5, "mixed pair");
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<FbsItem> items(n);
    for (auto& it : items) it = {u(rng) < 0.5, u(rng)};
    const std::size_t k = rng() % n;
    const double f0 = fbs(items).fbs;
    items[k].answer_correct = !items[k].answer_correct;
    const double f1 = fbs(items).fbs;
    const double sign = items[k].answer_correct ? 1.0 : -1.0;
    worst = std::max(worst, std::abs((f1 - f0) - sign * (2 * items[k].bs - 1) / static_cast<double>(n)));
  }
  c.expect(worst <= 1e-12, "flip deviation " + fmt(worst));
  if (c.ok) c.detail = "flip deviation " + fmt(worst);
  return c;
}

// ---------------------------------------------------------------------- 6
Check difficulty_binning() {
  Check c;
  c.expect(bin_level(0.05) == 5, "0.05 -> " + std::to_string(bin_level(0.05)));
  c.expect(bin_level(0.9) == 1, "0.9 -> " + std::to_string(bin_level(0.9)));
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> rates(1000);
  for (auto& r : rates) r = u(rng);
  rates[0] = 0.0;
  rates[1] = 1.0;
  std::sort(rates.begin(), rates.end());
  for (std::size_t i = 1; i < rates.size(); ++i)
    c.expect(bin_level(rates[i]) <= bin_level(rates[i - 1]), "level increased at pass@1 " + fmt(rates[i]));
  return c;
}

// ---------------------------------------------------------------------- 7
std::string majority(const std::vector<std::string>& answers) {
  std::vector<std::string> order;
  std::map<std::string, int> count;
  for (const auto& a : answers)
    if (count[a]++ == 0) order.push_back(a);
  std::string best = order.front();
  for (const auto& a : order)
    if (count[a] > count[best]) best = a;
  return best;
}

Check vote_properties() {
  Check c;
  std::mt19937_64 rng(707);
  std::normal_distribution<double> nd(0.0, 3.0);
  std::uniform_real_distribution<double> temp(0.1, 4.0);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<std::string> answers(n);
    std::vector<double> igs(n);
    for (std::size_t i = 0; i < n; ++i) {
      answers[i] = std::string(1, static_cast<char>('A' + rng() % 4));
      igs[i] = nd(rng);
    }
    const double tau = temp(rng);
    const auto w = softmax_weights(igs, tau);
    double sum = 0.0;
    for (double x : w) {
      c.expect(x > 0.0, "non-positive weight");
      sum += x;
    }
    c.expect(std::abs(sum - 1.0) <= 1e-9, "weights sum to " + fmt(sum));
    const double shift = nd(rng) * 10;
    std::vector<double> shifted(igs);
    for (auto& x : shifted) x += shift;
    c.expect(weighted_vote(answers, igs, tau).answer == weighted_vote(answers, shifted, tau).answer,
             "winner changed under shift");
    const std::vector<double> flat(n, nd(rng));
    c.expect(weighted_vote(answers, flat, tau).answer == majority(answers), "uniform IG != majority");
    c.expect(weighted_vote(answers, igs, tau, true).answer == majority(answers), "uniform flag != majority");
  }
  return c;
}

// ---------------------------------------------------------------------- 8
Check quire_dominance() {
  Check c;
  const auto rig = rig::dominance_rig(100);
  const auto backend = make_backend(rig.backend_spec);
  QuireConfig cfg;
  QuireConfig no_recall = cfg;
  no_recall.aae_recall = false;
  int q = 0, sc = 0, ab = 0;
  for (const auto& s : rig.samples) {
    const auto gold = [&](const QuireOutcome& o) { return o.final_answer && *o.final_answer == s.gold_answer; };
    q += gold(run_quire(*backend, s, cfg));
    sc += gold(run_self_consistency(*backend, s, cfg));
    ab += gold(run_quire(*backend, s, no_recall));
  }
  const double n = static_cast<double>(rig.samples.size());
  c.expect(rig.samples.size() == 100, "rig size");
  c.expect(q == 100 && sc == 0 && ab == 0, "QUIRE " + fmt(q / n) + ", SC " + fmt(sc / n) + ", -AAE Recall " + fmt(ab / n));
  if (c.ok) c.detail = "QUIRE 1, SC 0, -AAE Recall 0";
  return c;
}

// ---------------------------------------------------------------------- 9
Check synthetic_oracle() {
  Check c;
  std::size_t total = 0, agree = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto samples = generate_synthetic_logic({seed, 200, 1 + seed % 4, 2 + seed});
    for (const auto& s : samples) {
      ++total;
      const auto closure = oracle::forward_chain(s.context_statements);
      c.expect(!closure.contradiction, s.id + ": contradictory rule base");
      if (oracle::answer_query(closure, s.question) == s.gold_answer) ++agree;
      for (const auto& st : segment_context(*s.gold_rationale)) {
        c.expect(std::find(s.context_statements.begin(), s.context_statements.end(), st) != s.context_statements.end(),
                 s.id + ": rationale statement not in context: " + st);
      }
    }
  }
  c.expect(total == 1000 && agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree");
  if (c.ok) c.detail = "1000/1000 agree";
  return c;
}

// --------------------------------------------------------------------- 10
std::map<std::string, std::string> metric_files(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "config.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[std::filesystem::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

Check reproducibility() {
  Check c;
  const auto base = std::filesystem::temp_directory_path() / "cotscope_acceptance_repro";
  std::filesystem::remove_all(base);
  const auto cfg = rig::demo_workspace(base / "ws").string();
  const std::vector<std::string> commands{"effectiveness", "difficulty", "ig",    "flow",  "mif",
                                          "faith-grid",    "recall-analysis", "quire", "report"};
  for (const std::string run : {"a", "b"}) {
    const std::string out = (base / run).string();
    const std::string workers = run == "a" ? "1" : "3";
    for (const auto& cmd : commands) {
      std::vector<const char*> argv{"cotscope", cmd.c_str(), "--config", cfg.c_str(), "--output", out.c_str(),
                                    "--workers", workers.c_str()};
      std::ostringstream o, e;
      const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
      c.expect(code == 0, cmd + " exited " + std::to_string(code) + ": " + e.str());
    }
  }
  const auto a = metric_files(base / "a");
  const auto b = metric_files(base / "b");
  c.expect(a.size() >= commands.size() * 2, "only " + std::to_string(a.size()) + " files written");
  c.expect(a.size() == b.size(), "file sets differ");
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    c.expect(it != b.end() && it->second == bytes, name + " differs between runs");
  }
  if (c.ok) c.detail = std::to_string(a.size()) + " files byte-identical across 9 subcommands";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 = no runtime bound
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "MIF oracle equivalence", 5, mif_oracle},
      {2, "integrated-gradient correctness", 30, integrated_gradients},
      {3, "AE/AAE algebra", 0, ae_algebra},
      {4, "IG identities", 0, ig_identities},
      {5, "FBS identities", 0, fbs_identities},
      {6, "difficulty binning", 0, difficulty_binning},
      {7, "QUIRE vote properties", 0, vote_properties},
      {8, "QUIRE scenario dominance", 60, quire_dominance},
      {9, "synthetic-logic oracle", 0, synthetic_oracle},
      {10, "reproducibility", 0, reproducibility},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit_s > 0 && secs > cr.limit_s) {
      c.ok = false;
      c.detail = "runtime " + fmt(secs) + " s over " + fmt(cr.limit_s) + " s";
    }
    if (!c.ok) ++failed;
    std::printf("%s %2d %-32s %7.3fs  %s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.name, secs, c.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
