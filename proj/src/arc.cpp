#include "edrisk/arc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "edrisk/metrics.hpp"
#include "edrisk/util.hpp"

namespace edrisk {

namespace {

// C(n, k) saturating at a large sentinel.
std::uint64_t choose_capped(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (1ULL << 40)) return 1ULL << 40;
  }
  return r;
}

template <typename Fn>
void subsets_rec(const std::vector<int>& items, std::size_t start, std::size_t k, Itemset& buf,
                 Fn& fn) {
  if (k == 0) {
    fn(buf);
    return;
  }
  for (std::size_t i = start; i + k <= items.size(); ++i) {
    buf.push_back(items[i]);
    subsets_rec(items, i + 1, k - 1, buf, fn);
    buf.pop_back();
  }
}

// Calls fn for every k-subset of items (sorted input, sorted subsets).
template <typename Fn>
void for_each_subset(const std::vector<int>& items, std::size_t k, Fn fn) {
  Itemset buf;
  buf.reserve(k);
  subsets_rec(items, 0, k, buf, fn);
}

using CountMap = std::unordered_map<Itemset, std::pair<std::uint32_t, std::uint32_t>, ItemsetHash>;

// Counts (support, positives) for candidate itemsets of one length by
// enumerating transaction subsets; the standard hash-based Apriori counting
// step.
void count_candidates(const std::vector<Transaction>& transactions, std::size_t k,
                      const std::vector<char>& item_frequent, int max_code, CountMap& counts) {
  std::vector<int> filtered;
  for (const Transaction& t : transactions) {
    if (t.items.size() < k) continue;
    filtered.clear();
    for (int code : t.items)
      if (code >= 0 && code <= max_code && item_frequent[static_cast<std::size_t>(code)])
        filtered.push_back(code);
    if (filtered.size() < k) continue;
    for_each_subset(filtered, k, [&](const Itemset& s) {
      auto it = counts.find(s);
      if (it == counts.end()) return;
      ++it->second.first;
      if (t.outcome) ++it->second.second;
    });
  }
}

}  // namespace

std::vector<FrequentItemset> mine_frequent_itemsets(const std::vector<Transaction>& transactions,
                                                    std::uint32_t min_support,
                                                    std::optional<int> max_len) {
  if (min_support < 1) throw Error("mine_frequent_itemsets: min_support must be >= 1");

  std::vector<FrequentItemset> result;

  // Level 1: direct item counts.
  std::map<int, std::uint32_t> singleton_counts;
  int max_code = 0;
  for (const Transaction& t : transactions)
    for (int code : t.items) {
      if (code < 0) throw Error("mine_frequent_itemsets: negative item code");
      ++singleton_counts[code];
      max_code = std::max(max_code, code);
    }
  std::vector<Itemset> level;  // frequent itemsets of the current length, lex sorted
  std::vector<char> item_frequent(static_cast<std::size_t>(max_code) + 1, 0);
  for (const auto& [code, count] : singleton_counts) {
    if (count < min_support) continue;
    result.push_back({Itemset{code}, count});
    level.push_back(Itemset{code});
    item_frequent[static_cast<std::size_t>(code)] = 1;
  }

  std::size_t k = 2;
  while (!level.empty() && (!max_len || static_cast<int>(k) <= *max_len)) {
    // Join step: pairs sharing the first k-2 items; level is lex sorted, so
    // groups are contiguous and the two tails are ascending.
    std::unordered_map<Itemset, char, ItemsetHash> prev_set(level.size() * 2);
    for (const Itemset& s : level) prev_set.emplace(s, 1);

    CountMap candidates;
    Itemset cand;
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        if (!std::equal(level[i].begin(), level[i].end() - 1, level[j].begin(),
                        level[j].end() - 1))
          break;  // past the shared-prefix group
        cand = level[i];
        cand.push_back(level[j].back());
        // Prune: every (k-1)-subset must be frequent.
        bool ok = true;
        Itemset sub(cand.begin() + 1, cand.end());
        for (std::size_t drop = 0; ok && drop < cand.size(); ++drop) {
          if (drop > 0) sub[drop - 1] = cand[drop - 1];
          if (!prev_set.count(sub)) ok = false;
        }
        if (ok) candidates.emplace(std::move(cand), std::make_pair(0u, 0u));
      }
    }
    if (candidates.empty()) break;

    count_candidates(transactions, k, item_frequent, max_code, candidates);

    level.clear();
    for (const auto& [items, counts] : candidates)
      if (counts.first >= min_support) {
        result.push_back({items, counts.first});
        level.push_back(items);
      }
    std::sort(level.begin(), level.end());
    ++k;
  }

  std::sort(result.begin(), result.end(), [](const FrequentItemset& a, const FrequentItemset& b) {
    if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
    return a.items < b.items;
  });
  return result;
}

RuleSet::RuleSet(std::vector<Rule> rules, std::uint32_t min_support,
                 std::array<double, 2> class_prior, ItemsetView view,
                 std::optional<int> max_antecedent_len, TieBreak tie_break)
    : rules_(std::move(rules)),
      min_support_(min_support),
      class_prior_(class_prior),
      view_(view),
      max_antecedent_len_(max_antecedent_len),
      tie_break_(tie_break) {
  std::sort(rules_.begin(), rules_.end(), [](const Rule& a, const Rule& b) {
    if (a.antecedent.size() != b.antecedent.size()) return a.antecedent.size() > b.antecedent.size();
    if (a.support != b.support) return a.support > b.support;
    return a.antecedent < b.antecedent;
  });
  build_index();
}

void RuleSet::build_index() {
  std::map<int, std::unordered_map<Itemset, std::uint32_t, ItemsetHash>, std::greater<int>> buckets;
  int max_code = 0;
  for (std::uint32_t i = 0; i < rules_.size(); ++i) {
    const Itemset& a = rules_[i].antecedent;
    if (a.empty()) throw Error("RuleSet: empty antecedent");
    auto [it, inserted] = buckets[static_cast<int>(a.size())].emplace(a, i);
    (void)it;
    if (!inserted) throw Error("RuleSet: duplicate antecedent " + itemset_to_string(a));
    max_code = std::max(max_code, a.back());
    for (int code : a) rule_items_.push_back(code);
  }
  std::sort(rule_items_.begin(), rule_items_.end());
  rule_items_.erase(std::unique(rule_items_.begin(), rule_items_.end()), rule_items_.end());
  item_in_rules_.assign(static_cast<std::size_t>(max_code) + 1, 0);
  for (int code : rule_items_) item_in_rules_[static_cast<std::size_t>(code)] = 1;
  by_length_.assign(buckets.begin(), buckets.end());
}

bool RuleSet::item_used(int code) const {
  return code >= 0 && static_cast<std::size_t>(code) < item_in_rules_.size() &&
         item_in_rules_[static_cast<std::size_t>(code)];
}

const Rule* RuleSet::select_matching_rule(const Itemset& items) const {
  std::vector<int> usable;
  usable.reserve(items.size());
  for (int code : items)
    if (item_used(code)) usable.push_back(code);

  std::vector<std::uint32_t> matches;
  for (const auto& [len, bucket] : by_length_) {
    const std::size_t k = static_cast<std::size_t>(len);
    if (usable.size() < k) continue;
    matches.clear();
    if (choose_capped(usable.size(), k) <= 4 * bucket.size()) {
      for_each_subset(usable, k, [&](const Itemset& s) {
        auto it = bucket.find(s);
        if (it != bucket.end()) matches.push_back(it->second);
      });
    } else {
      for (const auto& [antecedent, idx] : bucket)
        if (itemset_subsumes(antecedent, items)) matches.push_back(idx);
    }
    if (matches.empty()) continue;

    const Rule* best = nullptr;
    for (std::uint32_t idx : matches) {
      const Rule& r = rules_[idx];
      if (!best) {
        best = &r;
        continue;
      }
      if (r.support != best->support) {
        if (r.support > best->support) best = &r;
        continue;
      }
      if (tie_break_ == TieBreak::confidence) {
        const double rc = std::max(r.confidence[0], r.confidence[1]);
        const double bc = std::max(best->confidence[0], best->confidence[1]);
        if (rc != bc) {
          if (rc > bc) best = &r;
          continue;
        }
      }
      if (r.antecedent < best->antecedent) best = &r;
    }
    return best;
  }
  return nullptr;
}

std::array<double, 2> RuleSet::classify(const Itemset& items) const {
  const Rule* rule = select_matching_rule(items);
  return rule ? rule->confidence : class_prior_;
}

const Rule* select_matching_rule(const RuleSet& ruleset, const Itemset& items) {
  return ruleset.select_matching_rule(items);
}

std::array<double, 2> classify_with_rules(const RuleSet& ruleset, const Itemset& items) {
  return ruleset.classify(items);
}

RuleSet generate_rules(const std::vector<FrequentItemset>& frequent,
                       const std::vector<Transaction>& transactions, ItemsetView view,
                       std::uint32_t min_support, std::optional<int> max_len, TieBreak tie_break) {
  // Recount support and positives together in one pass per length.
  std::map<std::size_t, CountMap> by_len;
  int max_code = 0;
  for (const FrequentItemset& f : frequent) {
    by_len[f.items.size()].emplace(f.items, std::make_pair(0u, 0u));
    if (!f.items.empty()) max_code = std::max(max_code, f.items.back());
  }
  std::vector<char> all_items(static_cast<std::size_t>(max_code) + 1, 1);
  for (auto& [len, counts] : by_len) count_candidates(transactions, len, all_items, max_code, counts);

  std::uint64_t positives = 0;
  for (const Transaction& t : transactions)
    if (t.outcome) ++positives;
  std::array<double, 2> prior{0.5, 0.5};
  if (!transactions.empty()) {
    prior[1] = static_cast<double>(positives) / static_cast<double>(transactions.size());
    prior[0] = static_cast<double>(transactions.size() - positives) /
               static_cast<double>(transactions.size());
  }

  std::vector<Rule> rules;
  rules.reserve(frequent.size());
  for (const FrequentItemset& f : frequent) {
    const auto& [support, pos] = by_len[f.items.size()].at(f.items);
    if (support != f.support)
      throw Error("generate_rules: support mismatch for " + itemset_to_string(f.items) +
                  " (frequent list not from these transactions?)");
    Rule r;
    r.antecedent = f.items;
    r.support = support;
    r.positives = pos;
    r.confidence[1] = static_cast<double>(pos) / static_cast<double>(support);
    r.confidence[0] = static_cast<double>(support - pos) / static_cast<double>(support);
    rules.push_back(std::move(r));
  }
  return RuleSet(std::move(rules), min_support, prior, view, max_len, tie_break);
}

SupportTuneResult tune_support_threshold(const std::vector<Transaction>& transactions,
                                         const std::vector<std::uint32_t>& candidate_grid,
                                         ItemsetView view, std::optional<int> max_len,
                                         TieBreak tie_break) {
  if (candidate_grid.empty()) throw Error("tune_support_threshold: empty candidate grid");
  for (std::uint32_t s : candidate_grid)
    if (s < 1) throw Error("tune_support_threshold: thresholds must be >= 1");

  const std::uint32_t floor_support =
      *std::min_element(candidate_grid.begin(), candidate_grid.end());
  const std::vector<FrequentItemset> mined =
      mine_frequent_itemsets(transactions, floor_support, max_len);
  const RuleSet master = generate_rules(mined, transactions, view, floor_support, max_len, tie_break);

  auto filtered = [&](std::uint32_t s) {
    std::vector<Rule> keep;
    for (const Rule& r : master.rules())
      if (r.support >= s) keep.push_back(r);
    return RuleSet(std::move(keep), s, master.class_prior(), view, max_len, tie_break);
  };

  SupportTuneResult result;
  if (candidate_grid.size() == 1) {
    result.threshold = candidate_grid.front();
    result.rules = filtered(result.threshold);
    return result;
  }

  std::vector<std::uint8_t> labels;
  labels.reserve(transactions.size());
  for (const Transaction& t : transactions) labels.push_back(t.outcome ? 1 : 0);

  double best_auc = -1.0;
  std::uint32_t best_threshold = 0;
  for (std::uint32_t s : candidate_grid) {
    const RuleSet rs = filtered(s);
    std::vector<double> scores;
    scores.reserve(transactions.size());
    for (const Transaction& t : transactions) scores.push_back(rs.classify(t.items)[1]);
    const double a = auc(scores, labels);
    result.grid_auc.emplace_back(s, a);
    if (a > best_auc || (a == best_auc && s > best_threshold)) {
      best_auc = a;
      best_threshold = s;
    }
  }
  result.threshold = best_threshold;
  result.rules = filtered(best_threshold);
  return result;
}

}  // namespace edrisk
