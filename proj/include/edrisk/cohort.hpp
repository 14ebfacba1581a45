#pragma once

#include <utility>
#include <vector>

#include "edrisk/visit.hpp"

namespace edrisk {

// One timeline per distinct patient_key, sorted by patient_key; every input
// record appears in exactly one timeline. Records with an empty patient_key
// are a contract violation (run apply_exclusions first).
std::vector<PatientTimeline> link_patient_timelines(const VisitTable& visits);

// Removes, in this order per record: (1) records with an empty patient_key;
// (2) every record of any patient with a pregnancy primary CCS (177-196) on
// at least one visit; (3) records with age < 18. Each record is counted
// under the first matching reason.
std::pair<VisitTable, ExclusionReport> apply_exclusions(const VisitTable& visits);

// One instance per ED visit. label = true iff an inpatient visit of the same
// patient exists with 0 <= day delta <= window_days and a non-mental-health
// primary CCS; the earliest such admission (day, then visit_id) qualifies.
std::vector<LabeledIndexVisit> label_index_visits(const VisitTable& visits,
                                                  const std::vector<PatientTimeline>& timelines,
                                                  int window_days);

}  // namespace edrisk
