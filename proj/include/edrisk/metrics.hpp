#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edrisk/featurize.hpp"

namespace edrisk {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Threshold sweep from high to low; starts at (0,0), ends at (1,1), both
// coordinates non-decreasing. Tied scores collapse into one segment.
struct RocCurve {
  std::vector<RocPoint> points;
};

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Rank-statistic AUC: (concordant + 0.5 * tied) / (positives * negatives),
// computed from average ranks in O(n log n).
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

double trapezoid_area(const RocCurve& curve);

struct LeakageFlag {
  std::string field;
  std::string value;
  double positive_rate = 0.0;
  std::uint32_t count = 0;
};

// Flags every vocabulary entry with >= min_count occurrences whose
// conditional positive rate >= rate_threshold, sorted by rate descending
// (count, then column index on ties).
std::vector<LeakageFlag> audit_feature_leakage(const std::vector<FeatureVector>& vectors,
                                               const std::vector<std::uint8_t>& labels,
                                               const FeatureVocabulary& vocab,
                                               std::uint32_t min_count, double rate_threshold);

std::string leakage_flags_to_text(const std::vector<LeakageFlag>& flags);

}  // namespace edrisk
