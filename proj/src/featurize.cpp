#include "edrisk/featurize.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "edrisk/util.hpp"

namespace edrisk {

FeatureVocabulary::FeatureVocabulary(std::vector<std::pair<std::string, std::string>> entries,
                                     int count_bin_cap, std::string built_from)
    : entries_(std::move(entries)), count_bin_cap_(count_bin_cap), built_from_(std::move(built_from)) {
  for (std::uint32_t i = 0; i < entries_.size(); ++i) {
    auto [it, inserted] = index_.emplace(entries_[i], i);
    (void)it;
    if (!inserted) throw Error("vocabulary has duplicate entry: " + entries_[i].first);
  }
}

std::optional<std::uint32_t> FeatureVocabulary::find(const std::string& field,
                                                     const std::string& value) const {
  auto it = index_.find({field, value});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string FeatureVocabulary::to_text() const {
  std::ostringstream ss;
  ss << "vocabulary 1\n";
  ss << "count_bin_cap " << count_bin_cap_ << '\n';
  ss << "built_from " << built_from_ << '\n';
  ss << "entries " << entries_.size() << '\n';
  for (std::uint32_t i = 0; i < entries_.size(); ++i)
    ss << i << ' ' << entries_[i].first << ' ' << entries_[i].second << '\n';
  return ss.str();
}

FeatureVocabulary FeatureVocabulary::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next = [&]() {
    if (!std::getline(in, line)) throw Error("vocabulary file truncated");
    return line;
  };
  if (next() != "vocabulary 1") throw Error("vocabulary file: bad header");
  const auto cap_parts = split(next(), ' ');
  if (cap_parts.size() != 2 || cap_parts[0] != "count_bin_cap")
    throw Error("vocabulary file: expected count_bin_cap");
  const int cap = static_cast<int>(parse_int(cap_parts[1]).value_or(-1));
  if (cap < 1) throw Error("vocabulary file: bad count_bin_cap");
  next();
  if (line.rfind("built_from ", 0) != 0) throw Error("vocabulary file: expected built_from");
  std::string built_from = line.substr(11);
  const auto n_parts = split(next(), ' ');
  if (n_parts.size() != 2 || n_parts[0] != "entries") throw Error("vocabulary file: expected entries");
  const long long n = parse_int(n_parts[1]).value_or(-1);
  if (n < 0) throw Error("vocabulary file: bad entry count");

  std::vector<std::pair<std::string, std::string>> entries;
  entries.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    next();
    const std::size_t sp1 = line.find(' ');
    const std::size_t sp2 = line.find(' ', sp1 + 1);
    if (sp1 == std::string::npos || sp2 == std::string::npos)
      throw Error("vocabulary file: bad entry line: " + line);
    if (parse_int(line.substr(0, sp1)).value_or(-1) != i)
      throw Error("vocabulary file: entry index out of order: " + line);
    entries.emplace_back(line.substr(sp1 + 1, sp2 - sp1 - 1), line.substr(sp2 + 1));
  }
  return FeatureVocabulary(std::move(entries), cap, std::move(built_from));
}

std::string bin_count_label(int count, int cap) {
  if (count >= cap) return std::to_string(cap) + "+";
  return std::to_string(count);
}

void for_each_feature_pair(const VisitRecord& visit, const TemporalContext& ctx, int count_bin_cap,
                           const std::function<void(const std::string&, const std::string&)>& fn) {
  // Absent categorical values (empty cells) contribute nothing: the whole
  // dummy group stays zero for that record.
  auto fn_nonempty = [&](const std::string& f, const std::string& v) {
    if (!v.empty()) fn(f, v);
  };
  fn("age", std::to_string(visit.age));
  fn_nonempty("sex", visit.sex);
  fn_nonempty("race", visit.race);
  fn("month", std::to_string(visit.admission_month));
  fn_nonempty("disposition", visit.disposition);
  fn("los", std::to_string(visit.length_of_stay));
  for (const auto& [field, value] : visit.extra_categoricals) fn_nonempty(field, value);
  fn("dx_primary", std::to_string(visit.primary_ccs));
  for (int code : visit.secondary_ccs) fn("dx_any", std::to_string(code));
  for (int code : visit.procedure_ccs) fn("proc_any", std::to_string(code));
  fn("ed_30d", bin_count_label(ctx.ed_visits_30d, count_bin_cap));
  fn("ed_fac_30d", bin_count_label(ctx.ed_visits_same_facility_30d, count_bin_cap));
  fn("hosp_30d", bin_count_label(ctx.hosp_visits_30d, count_bin_cap));
  fn("hosp_fac_30d", bin_count_label(ctx.hosp_visits_same_facility_30d, count_bin_cap));
  fn("same_dx_30d", bin_count_label(ctx.same_primary_ccs_visits_30d, count_bin_cap));
  if (ctx.most_frequent_primary_ccs_30d)
    fn("modal_dx_30d", std::to_string(*ctx.most_frequent_primary_ccs_30d));
}

TemporalContext compute_temporal_context(const VisitTable& visits, const PatientTimeline& timeline,
                                         std::uint32_t visit_index) {
  if (std::find(timeline.visits.begin(), timeline.visits.end(), visit_index) ==
      timeline.visits.end())
    throw Error("contract violation: visit not in timeline");
  const VisitRecord& index_visit = visits[visit_index];

  TemporalContext ctx;
  std::map<int, int> primary_counts;
  for (std::uint32_t vi : timeline.visits) {
    if (vi == visit_index) continue;
    const VisitRecord& v = visits[vi];
    const int delta = index_visit.days_to_event - v.days_to_event;
    if (delta < 1 || delta > 30) continue;
    const bool same_facility =
        !index_visit.facility_id.empty() && v.facility_id == index_visit.facility_id;
    if (v.visit_type == VisitType::ed) {
      ++ctx.ed_visits_30d;
      if (same_facility) ++ctx.ed_visits_same_facility_30d;
    } else {
      ++ctx.hosp_visits_30d;
      if (same_facility) ++ctx.hosp_visits_same_facility_30d;
    }
    if (v.primary_ccs == index_visit.primary_ccs) ++ctx.same_primary_ccs_visits_30d;
    ++primary_counts[v.primary_ccs];
  }
  // Modal code, smallest code on ties; map iteration is ascending.
  int best_count = 0;
  for (const auto& [code, count] : primary_counts) {
    if (count > best_count) {
      best_count = count;
      ctx.most_frequent_primary_ccs_30d = code;
    }
  }
  return ctx;
}

Itemset extract_longitudinal_itemset(const VisitTable& visits, const PatientTimeline& timeline,
                                     std::uint32_t visit_index) {
  const VisitRecord& index_visit = visits[visit_index];
  std::vector<int> codes;
  for (std::uint32_t vi : timeline.visits) {
    if (vi == visit_index) continue;
    const VisitRecord& v = visits[vi];
    const int delta = index_visit.days_to_event - v.days_to_event;
    if (delta < 1 || delta > 30) continue;
    codes.push_back(v.primary_ccs);
  }
  return make_itemset(std::move(codes));
}

Itemset extract_horizontal_itemset(const VisitRecord& visit) {
  std::vector<int> codes = visit.secondary_ccs;
  codes.push_back(visit.primary_ccs);
  return make_itemset(std::move(codes));
}

FeatureVocabulary build_vocabulary(const VisitTable& visits,
                                   std::span<const LabeledIndexVisit> train_instances,
                                   std::span<const TemporalContext> train_contexts,
                                   int count_bin_cap, std::string built_from) {
  if (train_instances.empty()) throw Error("build_vocabulary: empty training set");
  if (train_instances.size() != train_contexts.size())
    throw Error("build_vocabulary: instance/context size mismatch");

  std::set<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < train_instances.size(); ++i) {
    const VisitRecord& visit = visits[train_instances[i].visit_index];
    for_each_feature_pair(visit, train_contexts[i], count_bin_cap,
                          [&](const std::string& f, const std::string& v) { pairs.emplace(f, v); });
  }
  std::vector<std::pair<std::string, std::string>> entries(pairs.begin(), pairs.end());
  return FeatureVocabulary(std::move(entries), count_bin_cap, std::move(built_from));
}

FeatureVector encode_visit(const VisitRecord& visit, const TemporalContext& ctx,
                           const FeatureVocabulary& vocab) {
  FeatureVector vec;
  vec.dimension = vocab.dimension();
  for_each_feature_pair(visit, ctx, vocab.count_bin_cap(),
                        [&](const std::string& f, const std::string& v) {
                          if (auto idx = vocab.find(f, v)) vec.active.push_back(*idx);
                        });
  std::sort(vec.active.begin(), vec.active.end());
  vec.active.erase(std::unique(vec.active.begin(), vec.active.end()), vec.active.end());
  return vec;
}

}  // namespace edrisk
