#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "edrisk/visit.hpp"

namespace edrisk {

// Header-based column mapping for the visit table text format. `columns`
// maps logical field names to actual column names; unmapped fields use the
// logical name itself. Cells are split on `delimiter` with no quoting.
struct CsvSchema {
  char delimiter = ',';
  std::map<std::string, std::string> columns;

  std::string column_for(const std::string& logical) const {
    auto it = columns.find(logical);
    return it == columns.end() ? logical : it->second;
  }
};

// Required logical columns: visit_id, patient_key, days_to_event, visit_type,
// age, sex, admission_month, primary_ccs. Optional: race, length_of_stay,
// disposition, facility_id, secondary_ccs_1..20, procedure_ccs_1..21.
// Unknown columns are preserved per row in extra_categoricals; empty cells
// mean absent.
VisitTable ingest_visits(std::istream& source, const CsvSchema& schema = {});
VisitTable ingest_visits_file(const std::string& path, const CsvSchema& schema = {});

void write_visits(std::ostream& out, const VisitTable& table, const CsvSchema& schema = {});
std::string visits_to_text(const VisitTable& table, const CsvSchema& schema = {});

}  // namespace edrisk
