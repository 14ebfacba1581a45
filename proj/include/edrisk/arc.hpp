#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "edrisk/itemset.hpp"

namespace edrisk {

struct Transaction {
  Itemset items;
  bool outcome = false;
};

struct FrequentItemset {
  Itemset items;
  std::uint32_t support = 0;
};

enum class ItemsetView { longitudinal, horizontal };
enum class TieBreak { lexicographic, confidence };

struct Rule {
  Itemset antecedent;
  std::uint32_t support = 0;    // records whose itemset subsumes the antecedent
  std::uint32_t positives = 0;  // of those, records with outcome 1
  std::array<double, 2> confidence{};  // [outcome 0, outcome 1], ratios over support
};

// Rules plus the match index used by classification. Match order: largest
// antecedent first, then largest support, then the tie policy
// (lexicographically smallest antecedent, or highest max-outcome confidence).
class RuleSet {
 public:
  RuleSet() = default;
  RuleSet(std::vector<Rule> rules, std::uint32_t min_support, std::array<double, 2> class_prior,
          ItemsetView view, std::optional<int> max_antecedent_len, TieBreak tie_break);

  const std::vector<Rule>& rules() const { return rules_; }
  std::uint32_t min_support() const { return min_support_; }
  const std::array<double, 2>& class_prior() const { return class_prior_; }
  ItemsetView view() const { return view_; }
  std::optional<int> max_antecedent_len() const { return max_antecedent_len_; }
  TieBreak tie_break() const { return tie_break_; }

  const Rule* select_matching_rule(const Itemset& items) const;
  std::array<double, 2> classify(const Itemset& items) const;

 private:
  std::vector<Rule> rules_;  // canonical order: (len desc, support desc, antecedent lex asc)
  std::uint32_t min_support_ = 1;
  std::array<double, 2> class_prior_{};
  ItemsetView view_ = ItemsetView::horizontal;
  std::optional<int> max_antecedent_len_;
  TieBreak tie_break_ = TieBreak::lexicographic;

  // per antecedent length, largest first
  std::vector<std::pair<int, std::unordered_map<Itemset, std::uint32_t, ItemsetHash>>> by_length_;
  std::vector<char> item_in_rules_;  // dense presence flags for small codes
  std::vector<int> rule_items_;      // sorted universe of items used by any rule

  void build_index();
  bool item_used(int code) const;
};

// Exactly the non-empty itemsets with support >= min_support (and length
// <= max_len when given), by level-wise candidate generation. Result sorted
// by (length, antecedent).
std::vector<FrequentItemset> mine_frequent_itemsets(const std::vector<Transaction>& transactions,
                                                    std::uint32_t min_support,
                                                    std::optional<int> max_len = {});

RuleSet generate_rules(const std::vector<FrequentItemset>& frequent,
                       const std::vector<Transaction>& transactions, ItemsetView view,
                       std::uint32_t min_support, std::optional<int> max_len = {},
                       TieBreak tie_break = TieBreak::lexicographic);

const Rule* select_matching_rule(const RuleSet& ruleset, const Itemset& items);
std::array<double, 2> classify_with_rules(const RuleSet& ruleset, const Itemset& items);

struct SupportTuneResult {
  std::uint32_t threshold = 1;
  RuleSet rules;                                     // ruleset at the chosen threshold
  std::vector<std::pair<std::uint32_t, double>> grid_auc;
};

// Picks the grid value maximizing training AUC of the resulting classifier;
// ties go to the larger threshold. Mines once at the smallest grid value and
// filters upward (exact, by support monotonicity).
SupportTuneResult tune_support_threshold(const std::vector<Transaction>& transactions,
                                         const std::vector<std::uint32_t>& candidate_grid,
                                         ItemsetView view, std::optional<int> max_len = {},
                                         TieBreak tie_break = TieBreak::lexicographic);

}  // namespace edrisk
