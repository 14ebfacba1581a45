#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edrisk/itemset.hpp"
#include "edrisk/visit.hpp"

namespace edrisk {

// Counts over the patient's visits with 1 <= (index day - visit day) <= 30.
struct TemporalContext {
  int ed_visits_30d = 0;
  int ed_visits_same_facility_30d = 0;
  int hosp_visits_30d = 0;
  int hosp_visits_same_facility_30d = 0;
  int same_primary_ccs_visits_30d = 0;
  std::optional<int> most_frequent_primary_ccs_30d;

  bool operator==(const TemporalContext&) const = default;
};

// Sorted active column indices of a binary vector.
struct FeatureVector {
  std::vector<std::uint32_t> active;
  std::uint32_t dimension = 0;
};

// Ordered mapping from (field, value) pairs to column indices, built from
// training data only. Count-valued temporal features are binned to
// {0,1,...,cap-1,cap+} before lookup.
class FeatureVocabulary {
 public:
  FeatureVocabulary() = default;
  FeatureVocabulary(std::vector<std::pair<std::string, std::string>> entries, int count_bin_cap,
                    std::string built_from);

  std::uint32_t dimension() const { return static_cast<std::uint32_t>(entries_.size()); }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  int count_bin_cap() const { return count_bin_cap_; }
  const std::string& built_from() const { return built_from_; }

  std::optional<std::uint32_t> find(const std::string& field, const std::string& value) const;

  std::string to_text() const;
  static FeatureVocabulary from_text(const std::string& text);

  bool operator==(const FeatureVocabulary& other) const {
    return entries_ == other.entries_ && count_bin_cap_ == other.count_bin_cap_ &&
           built_from_ == other.built_from_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::pair<std::string, std::string>, std::uint32_t> index_;
  int count_bin_cap_ = 5;
  std::string built_from_;
};

std::string bin_count_label(int count, int cap);

// Enumerates every dummy-coded (field, value) pair of a visit + its context.
// Shared by vocabulary building and encoding so the two can never drift.
void for_each_feature_pair(const VisitRecord& visit, const TemporalContext& ctx, int count_bin_cap,
                           const std::function<void(const std::string&, const std::string&)>& fn);

TemporalContext compute_temporal_context(const VisitTable& visits, const PatientTimeline& timeline,
                                         std::uint32_t visit_index);

// Deduplicated primary CCS codes from the 30 days before the index visit
// (the index visit itself excluded).
Itemset extract_longitudinal_itemset(const VisitTable& visits, const PatientTimeline& timeline,
                                     std::uint32_t visit_index);

// Primary plus secondary diagnosis codes of the visit alone.
Itemset extract_horizontal_itemset(const VisitRecord& visit);

FeatureVocabulary build_vocabulary(const VisitTable& visits,
                                   std::span<const LabeledIndexVisit> train_instances,
                                   std::span<const TemporalContext> train_contexts,
                                   int count_bin_cap, std::string built_from);

FeatureVector encode_visit(const VisitRecord& visit, const TemporalContext& ctx,
                           const FeatureVocabulary& vocab);

}  // namespace edrisk
