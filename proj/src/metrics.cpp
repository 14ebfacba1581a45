#include "edrisk/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "edrisk/util.hpp"

namespace edrisk {

namespace {

void check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw Error("auc: score/label length mismatch");
  std::size_t pos = 0;
  for (std::uint8_t l : labels) pos += l ? 1 : 0;
  if (pos == 0) throw Error("auc: no positive labels");
  if (pos == labels.size()) throw Error("auc: no negative labels");
}

}  // namespace

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return scores[a] < scores[b];
  });

  double rank_sum_pos = 0.0;
  std::uint64_t positives = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Average rank of the tie group [i, j), 1-based ranks.
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]]) {
        rank_sum_pos += avg_rank;
        ++positives;
      }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double neg = static_cast<double>(n) - p;
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * neg);
}

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return scores[a] > scores[b];
  });

  std::uint64_t total_pos = 0;
  for (std::uint8_t l : labels) total_pos += l ? 1 : 0;
  const std::uint64_t total_neg = n - total_pos;

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::uint64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]])
        ++tp;
      else
        ++fp;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(total_neg),
                            static_cast<double>(tp) / static_cast<double>(total_pos)});
    i = j;
  }
  return curve;
}

double trapezoid_area(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i - 1];
    const RocPoint& b = curve.points[i];
    area += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
  }
  return area;
}

std::vector<LeakageFlag> audit_feature_leakage(const std::vector<FeatureVector>& vectors,
                                               const std::vector<std::uint8_t>& labels,
                                               const FeatureVocabulary& vocab,
                                               std::uint32_t min_count, double rate_threshold) {
  if (vectors.size() != labels.size()) throw Error("audit_feature_leakage: size mismatch");
  const std::uint32_t dim = vocab.dimension();
  std::vector<std::uint32_t> count(dim, 0), positive(dim, 0);
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::uint32_t j : vectors[i].active) {
      if (j >= dim) throw Error("audit_feature_leakage: vector index out of vocabulary");
      ++count[j];
      if (labels[i]) ++positive[j];
    }

  struct Scored {
    std::uint32_t index;
    double rate;
  };
  std::vector<Scored> hits;
  for (std::uint32_t j = 0; j < dim; ++j) {
    if (count[j] < min_count || count[j] == 0) continue;
    const double rate = static_cast<double>(positive[j]) / static_cast<double>(count[j]);
    if (rate >= rate_threshold) hits.push_back({j, rate});
  }
  std::sort(hits.begin(), hits.end(), [&](const Scored& a, const Scored& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    if (count[a.index] != count[b.index]) return count[a.index] > count[b.index];
    return a.index < b.index;
  });

  std::vector<LeakageFlag> out;
  out.reserve(hits.size());
  for (const Scored& h : hits) {
    const auto& [field, value] = vocab.entries()[h.index];
    out.push_back({field, value, h.rate, count[h.index]});
  }
  return out;
}

std::string leakage_flags_to_text(const std::vector<LeakageFlag>& flags) {
  std::ostringstream ss;
  ss << "leakage_audit 1\n";
  ss << "flags " << flags.size() << '\n';
  for (const LeakageFlag& f : flags)
    ss << f.field << ' ' << f.value << ' ' << fmt_double(f.positive_rate) << ' ' << f.count << '\n';
  return ss.str();
}

}  // namespace edrisk
