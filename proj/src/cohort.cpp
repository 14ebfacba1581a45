#include "edrisk/cohort.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "edrisk/util.hpp"

namespace edrisk {

std::string ExclusionReport::to_text() const {
  std::ostringstream ss;
  ss << "missing_patient_key " << missing_patient_key << '\n'
     << "pregnancy " << pregnancy << '\n'
     << "under_18 " << under_18 << '\n'
     << "none " << retained << '\n'
     << "input_total " << input_total << '\n'
     << "output_total " << retained << '\n';
  return ss.str();
}

std::vector<PatientTimeline> link_patient_timelines(const VisitTable& visits) {
  std::map<std::string, std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i < visits.size(); ++i) {
    const VisitRecord& rec = visits[i];
    if (rec.patient_key.empty())
      throw Error("contract violation: empty patient_key on visit '" + rec.visit_id + "'");
    groups[rec.patient_key].push_back(i);
  }
  std::vector<PatientTimeline> timelines;
  timelines.reserve(groups.size());
  for (auto& [key, idxs] : groups) {
    std::sort(idxs.begin(), idxs.end(), [&](std::uint32_t a, std::uint32_t b) {
      const VisitRecord& va = visits[a];
      const VisitRecord& vb = visits[b];
      if (va.days_to_event != vb.days_to_event) return va.days_to_event < vb.days_to_event;
      return va.visit_id < vb.visit_id;
    });
    timelines.push_back(PatientTimeline{key, std::move(idxs)});
  }
  return timelines;
}

std::pair<VisitTable, ExclusionReport> apply_exclusions(const VisitTable& visits) {
  ExclusionReport report;
  report.input_total = visits.size();

  std::set<std::string> pregnant_patients;
  for (const VisitRecord& rec : visits)
    if (!rec.patient_key.empty() && rec.primary_ccs >= kPregnancyCcsLow &&
        rec.primary_ccs <= kPregnancyCcsHigh)
      pregnant_patients.insert(rec.patient_key);

  VisitTable kept;
  kept.reserve(visits.size());
  for (const VisitRecord& rec : visits) {
    if (rec.patient_key.empty()) {
      ++report.missing_patient_key;
    } else if (pregnant_patients.count(rec.patient_key)) {
      ++report.pregnancy;
    } else if (rec.age < 18) {
      ++report.under_18;
    } else {
      kept.push_back(rec);
    }
  }
  report.retained = kept.size();
  return {std::move(kept), report};
}

std::vector<LabeledIndexVisit> label_index_visits(const VisitTable& visits,
                                                  const std::vector<PatientTimeline>& timelines,
                                                  int window_days) {
  if (window_days != 3 && window_days != 7 && window_days != 14)
    throw Error("parameter error: window_days must be 3, 7 or 14, got " +
                std::to_string(window_days));

  std::vector<LabeledIndexVisit> out;
  for (std::uint32_t t = 0; t < timelines.size(); ++t) {
    const PatientTimeline& tl = timelines[t];
    for (std::uint32_t vi : tl.visits) {
      const VisitRecord& ed = visits[vi];
      if (ed.visit_type != VisitType::ed) continue;
      LabeledIndexVisit inst;
      inst.visit_index = vi;
      inst.timeline_index = t;
      inst.window_days = window_days;
      // Timeline order is (day, visit_id), so the first hit is the earliest
      // qualifying admission.
      for (std::uint32_t ai : tl.visits) {
        const VisitRecord& adm = visits[ai];
        if (adm.visit_type != VisitType::inpatient) continue;
        const int delta = adm.days_to_event - ed.days_to_event;
        if (delta < 0 || delta > window_days) continue;
        if (adm.primary_ccs >= kMentalCcsLow && adm.primary_ccs <= kMentalCcsHigh) continue;
        inst.label = true;
        inst.qualifying_admission_id = adm.visit_id;
        break;
      }
      out.push_back(std::move(inst));
    }
  }
  return out;
}

}  // namespace edrisk
