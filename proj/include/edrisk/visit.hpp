#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace edrisk {

enum class VisitType { ed, inpatient };

inline constexpr int kPregnancyCcsLow = 177;
inline constexpr int kPregnancyCcsHigh = 196;
inline constexpr int kMentalCcsLow = 650;
inline constexpr int kMentalCcsHigh = 670;

// One ED or inpatient visit on the patient-relative day calendar.
struct VisitRecord {
  std::string visit_id;
  std::string patient_key;  // empty = cannot be linked
  int days_to_event = 0;
  VisitType visit_type = VisitType::ed;
  int age = 0;
  std::string sex;
  std::string race;
  int admission_month = 1;
  int length_of_stay = 0;  // 0 for ED visits
  std::string disposition;
  std::string facility_id;
  int primary_ccs = 0;
  std::vector<int> secondary_ccs;   // at most 20
  std::vector<int> procedure_ccs;   // at most 21
  std::map<std::string, std::string> extra_categoricals;

  bool operator==(const VisitRecord&) const = default;
};

using VisitTable = std::vector<VisitRecord>;

// Visits of one patient, as indices into the source table, sorted by
// (days_to_event, visit_id).
struct PatientTimeline {
  std::string patient_key;
  std::vector<std::uint32_t> visits;
};

struct LabeledIndexVisit {
  std::uint32_t visit_index = 0;     // into the source table; always an ED visit
  std::uint32_t timeline_index = 0;  // into the timeline vector it was built from
  int window_days = 0;
  bool label = false;
  std::optional<std::string> qualifying_admission_id;
};

struct ExclusionReport {
  std::uint64_t input_total = 0;
  std::uint64_t missing_patient_key = 0;
  std::uint64_t pregnancy = 0;
  std::uint64_t under_18 = 0;
  std::uint64_t retained = 0;

  std::string to_text() const;
};

}  // namespace edrisk
