#include "cotscope/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

namespace cotscope {

namespace {

const std::vector<std::string>& entities() {
  static const std::vector<std::string> v{"Anne", "Bob", "Charlie", "Dave", "Erin", "Fiona", "Gary", "Harry"};
  return v;
}

const std::vector<std::string>& attributes() {
  static const std::vector<std::string> v{"red",   "round", "big",   "quiet", "kind",  "young", "smart", "cold",
                                          "blue",  "green", "furry", "rough", "white", "nice",  "cute",  "sad",
                                          "tall",  "shy",   "fast",  "loud",  "happy", "old",   "wise",  "calm"};
  return v;
}

struct Fact {
  std::size_t entity;
  std::size_t attr;
  bool positive;
  bool operator<(const Fact& o) const {
    return std::tie(entity, attr, positive) < std::tie(o.entity, o.attr, o.positive);
  }
};

struct Rule {
  std::vector<std::size_t> premises;
  std::size_t conclusion;
  bool positive;
};

std::string fact_text(const Fact& f) {
  return entities()[f.entity] + (f.positive ? " is " : " is not ") + attributes()[f.attr] + ".";
}

std::string rule_text(const Rule& r) {
  std::string out = "If someone is ";
  for (std::size_t i = 0; i < r.premises.size(); ++i) {
    if (i) out += " and ";
    out += attributes()[r.premises[i]];
  }
  return out + (r.positive ? " then they are " : " then they are not ") + attributes()[r.conclusion] + ".";
}

// Positive premises only; derived literals may be negative.
std::set<Fact> closure(const std::vector<Fact>& facts, const std::vector<Rule>& rules) {
  std::set<Fact> known(facts.begin(), facts.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < entities().size(); ++e) {
      for (const auto& r : rules) {
        const bool fires = std::all_of(r.premises.begin(), r.premises.end(),
                                       [&](std::size_t a) { return known.count(Fact{e, a, true}) > 0; });
        if (fires && known.insert(Fact{e, r.conclusion, r.positive}).second) changed = true;
      }
    }
  }
  return known;
}

bool consistent(const std::set<Fact>& known) {
  return std::none_of(known.begin(), known.end(),
                      [&](const Fact& f) { return f.positive && known.count(Fact{f.entity, f.attr, false}) > 0; });
}

class Picker {
 public:
  explicit Picker(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin() { return (rng_() & 1U) != 0; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

std::vector<ReasoningSample> generate_synthetic_logic(const SyntheticConfig& cfg) {
  if (cfg.depth < 1) throw std::invalid_argument("synthetic logic: depth must be >= 1");
  const std::size_t n_attr = attributes().size();
  if (cfg.depth + 3 > n_attr) throw std::invalid_argument("synthetic logic: depth too large for attribute pool");

  Picker pick(cfg.seed);
  std::vector<ReasoningSample> out;
  out.reserve(cfg.n);
  while (out.size() < cfg.n) {
    std::vector<std::size_t> attrs(n_attr);
    for (std::size_t i = 0; i < n_attr; ++i) attrs[i] = i;
    pick.shuffle(attrs);
    const std::vector<std::size_t> chain(attrs.begin(), attrs.begin() + static_cast<std::ptrdiff_t>(cfg.depth + 1));
    const std::vector<std::size_t> spare(attrs.begin() + static_cast<std::ptrdiff_t>(cfg.depth + 1), attrs.end());
    const std::size_t subject = pick.below(entities().size());
    const bool answer_true = pick.coin();

    const Fact seed_fact{subject, chain[0], true};
    std::vector<Rule> chain_rules;
    for (std::size_t i = 0; i < cfg.depth; ++i) {
      const bool last = i + 1 == cfg.depth;
      chain_rules.push_back(Rule{{chain[i]}, chain[i + 1], last ? answer_true : true});
    }

    std::vector<Fact> distractor_facts;
    std::vector<Rule> distractor_rules;
    std::set<std::string> seen{fact_text(seed_fact)};
    for (const auto& r : chain_rules) seen.insert(rule_text(r));
    while (distractor_facts.size() + distractor_rules.size() < cfg.distractors) {
      if (pick.coin()) {
        std::size_t ent = pick.below(entities().size() - 1);
        if (ent >= subject) ++ent;
        const auto attr = pick.coin() ? chain[pick.below(chain.size())] : spare[pick.below(spare.size())];
        const Fact f{ent, attr, pick.coin()};
        if (seen.insert(fact_text(f)).second) distractor_facts.push_back(f);
      } else {
        Rule r;
        // Premise from the chain or the spare pool; conclusion always spare so the
        // queried attribute is never touched.
        r.premises.push_back(pick.coin() ? chain[pick.below(chain.size())] : spare[pick.below(spare.size())]);
        if (pick.below(3) == 0) {
          const auto extra = spare[pick.below(spare.size())];
          if (extra != r.premises.front()) r.premises.push_back(extra);
        }
        r.conclusion = spare[pick.below(spare.size())];
        if (std::find(r.premises.begin(), r.premises.end(), r.conclusion) != r.premises.end()) continue;
        r.positive = pick.coin();
        if (seen.insert(rule_text(r)).second) distractor_rules.push_back(std::move(r));
      }
    }

    std::vector<Fact> facts{seed_fact};
    facts.insert(facts.end(), distractor_facts.begin(), distractor_facts.end());
    std::vector<Rule> rules = chain_rules;
    rules.insert(rules.end(), distractor_rules.begin(), distractor_rules.end());
    const auto known = closure(facts, rules);
    if (!consistent(known)) continue;

    const Fact query{subject, chain.back(), true};
    const bool pos = known.count(query) > 0;
    const bool neg = known.count(Fact{subject, chain.back(), false}) > 0;
    if (pos == neg) continue;

    std::vector<std::string> proof{fact_text(seed_fact)};
    for (const auto& r : chain_rules) proof.push_back(rule_text(r));

    std::vector<std::string> statements = proof;
    for (const auto& f : distractor_facts) statements.push_back(fact_text(f));
    for (const auto& r : distractor_rules) statements.push_back(rule_text(r));
    pick.shuffle(statements);

    ReasoningSample s;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%05zu", out.size());
    s.id = id;
    s.context_statements = std::move(statements);
    s.question = "True or false: " + entities()[subject] + " is " + attributes()[chain.back()] + ".";
    s.gold_answer = pos ? "true" : "false";
    std::string rationale;
    for (std::size_t i = 0; i < proof.size(); ++i) {
      if (i) rationale += ' ';
      rationale += proof[i];
    }
    s.gold_rationale = std::move(rationale);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cotscope
