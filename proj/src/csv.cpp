#include "edrisk/csv.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "edrisk/util.hpp"

namespace edrisk {

namespace {

constexpr int kMaxSecondary = 20;
constexpr int kMaxProcedure = 21;

struct ColumnPlan {
  int visit_id = -1, patient_key = -1, days_to_event = -1, visit_type = -1;
  int age = -1, sex = -1, admission_month = -1, primary_ccs = -1;
  int race = -1, length_of_stay = -1, disposition = -1, facility_id = -1;
  std::vector<int> secondary;      // positions 1..20, -1 when absent
  std::vector<int> procedure;      // positions 1..21
  std::vector<std::pair<std::string, int>> extras;  // column name -> index
};

int find_column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

ColumnPlan plan_columns(const std::vector<std::string>& header, const CsvSchema& schema) {
  ColumnPlan plan;
  std::unordered_set<int> claimed;
  auto claim = [&](const std::string& logical, bool required) {
    const std::string col = schema.column_for(logical);
    int idx = find_column(header, col);
    if (idx < 0 && required)
      throw Error("schema error: missing required column '" + col + "'");
    if (idx >= 0) claimed.insert(idx);
    return idx;
  };

  plan.visit_id = claim("visit_id", true);
  plan.patient_key = claim("patient_key", true);
  plan.days_to_event = claim("days_to_event", true);
  plan.visit_type = claim("visit_type", true);
  plan.age = claim("age", true);
  plan.sex = claim("sex", true);
  plan.admission_month = claim("admission_month", true);
  plan.primary_ccs = claim("primary_ccs", true);
  plan.race = claim("race", false);
  plan.length_of_stay = claim("length_of_stay", false);
  plan.disposition = claim("disposition", false);
  plan.facility_id = claim("facility_id", false);
  for (int i = 1; i <= kMaxSecondary; ++i)
    plan.secondary.push_back(claim("secondary_ccs_" + std::to_string(i), false));
  for (int i = 1; i <= kMaxProcedure; ++i)
    plan.procedure.push_back(claim("procedure_ccs_" + std::to_string(i), false));
  for (std::size_t i = 0; i < header.size(); ++i)
    if (!claimed.count(static_cast<int>(i))) plan.extras.emplace_back(header[i], static_cast<int>(i));
  return plan;
}

class RowReader {
 public:
  RowReader(const std::vector<std::string>& cells, long long row) : cells_(cells), row_(row) {}

  std::string_view cell(int idx) const {
    if (idx < 0 || static_cast<std::size_t>(idx) >= cells_.size()) return {};
    return trim(cells_[static_cast<std::size_t>(idx)]);
  }

  long long require_int(int idx, const char* field) const {
    auto v = parse_int(cell(idx));
    if (!v) fail(field, "not an integer", cell(idx));
    return *v;
  }

  [[noreturn]] void fail(const char* field, const char* what, std::string_view value) const {
    throw Error("parse error: row " + std::to_string(row_) + ": field '" + field + "': " +
                what + ": '" + std::string(value) + "'");
  }

 private:
  const std::vector<std::string>& cells_;
  long long row_;
};

}  // namespace

VisitTable ingest_visits(std::istream& source, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(source, line)) throw Error("schema error: empty input, header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const ColumnPlan plan = plan_columns(split(line, schema.delimiter), schema);

  VisitTable table;
  std::unordered_map<std::string, long long> seen_ids;
  long long row = 0;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line, schema.delimiter);
    RowReader r(cells, row);

    VisitRecord rec;
    rec.visit_id = std::string(r.cell(plan.visit_id));
    if (rec.visit_id.empty()) r.fail("visit_id", "empty", "");
    auto [it, inserted] = seen_ids.emplace(rec.visit_id, row);
    if (!inserted)
      throw Error("duplicate visit_id '" + rec.visit_id + "' at row " + std::to_string(row) +
                  " (first seen at row " + std::to_string(it->second) + ")");
    rec.patient_key = std::string(r.cell(plan.patient_key));

    rec.days_to_event = static_cast<int>(r.require_int(plan.days_to_event, "days_to_event"));
    if (rec.days_to_event < 0) r.fail("days_to_event", "negative", r.cell(plan.days_to_event));

    const std::string_view vt = r.cell(plan.visit_type);
    if (vt == "ED")
      rec.visit_type = VisitType::ed;
    else if (vt == "INPATIENT")
      rec.visit_type = VisitType::inpatient;
    else
      r.fail("visit_type", "expected ED or INPATIENT", vt);

    rec.age = static_cast<int>(r.require_int(plan.age, "age"));
    rec.sex = std::string(r.cell(plan.sex));
    rec.admission_month = static_cast<int>(r.require_int(plan.admission_month, "admission_month"));
    if (rec.admission_month < 1 || rec.admission_month > 12)
      r.fail("admission_month", "outside 1..12", r.cell(plan.admission_month));
    rec.primary_ccs = static_cast<int>(r.require_int(plan.primary_ccs, "primary_ccs"));
    if (rec.primary_ccs <= 0) r.fail("primary_ccs", "not a positive CCS code", r.cell(plan.primary_ccs));

    if (!r.cell(plan.race).empty()) rec.race = std::string(r.cell(plan.race));
    if (!r.cell(plan.length_of_stay).empty())
      rec.length_of_stay = static_cast<int>(r.require_int(plan.length_of_stay, "length_of_stay"));
    if (!r.cell(plan.disposition).empty()) rec.disposition = std::string(r.cell(plan.disposition));
    if (!r.cell(plan.facility_id).empty()) rec.facility_id = std::string(r.cell(plan.facility_id));

    for (int i = 0; i < kMaxSecondary; ++i) {
      const std::string_view c = r.cell(plan.secondary[static_cast<std::size_t>(i)]);
      if (c.empty()) continue;
      auto v = parse_int(c);
      if (!v || *v <= 0) r.fail("secondary_ccs", "not a positive CCS code", c);
      rec.secondary_ccs.push_back(static_cast<int>(*v));
    }
    for (int i = 0; i < kMaxProcedure; ++i) {
      const std::string_view c = r.cell(plan.procedure[static_cast<std::size_t>(i)]);
      if (c.empty()) continue;
      auto v = parse_int(c);
      if (!v || *v <= 0) r.fail("procedure_ccs", "not a positive CCS code", c);
      rec.procedure_ccs.push_back(static_cast<int>(*v));
    }
    for (const auto& [name, idx] : plan.extras) {
      const std::string_view c = r.cell(idx);
      if (!c.empty()) rec.extra_categoricals.emplace(name, std::string(c));
    }
    table.push_back(std::move(rec));
  }
  return table;
}

VisitTable ingest_visits_file(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  return ingest_visits(in, schema);
}

void write_visits(std::ostream& out, const VisitTable& table, const CsvSchema& schema) {
  const char d = schema.delimiter;
  std::set<std::string> extra_fields;
  for (const VisitRecord& rec : table)
    for (const auto& [name, _] : rec.extra_categoricals) extra_fields.insert(name);

  out << schema.column_for("visit_id") << d << schema.column_for("patient_key") << d
      << schema.column_for("days_to_event") << d << schema.column_for("visit_type") << d
      << schema.column_for("age") << d << schema.column_for("sex") << d
      << schema.column_for("admission_month") << d << schema.column_for("primary_ccs") << d
      << schema.column_for("race") << d << schema.column_for("length_of_stay") << d
      << schema.column_for("disposition") << d << schema.column_for("facility_id");
  for (int i = 1; i <= kMaxSecondary; ++i) out << d << "secondary_ccs_" << i;
  for (int i = 1; i <= kMaxProcedure; ++i) out << d << "procedure_ccs_" << i;
  for (const std::string& name : extra_fields) out << d << name;
  out << '\n';

  for (const VisitRecord& rec : table) {
    out << rec.visit_id << d << rec.patient_key << d << rec.days_to_event << d
        << (rec.visit_type == VisitType::ed ? "ED" : "INPATIENT") << d << rec.age << d << rec.sex
        << d << rec.admission_month << d << rec.primary_ccs << d << rec.race << d
        << rec.length_of_stay << d << rec.disposition << d << rec.facility_id;
    for (int i = 0; i < kMaxSecondary; ++i) {
      out << d;
      if (static_cast<std::size_t>(i) < rec.secondary_ccs.size())
        out << rec.secondary_ccs[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < kMaxProcedure; ++i) {
      out << d;
      if (static_cast<std::size_t>(i) < rec.procedure_ccs.size())
        out << rec.procedure_ccs[static_cast<std::size_t>(i)];
    }
    for (const std::string& name : extra_fields) {
      out << d;
      auto it = rec.extra_categoricals.find(name);
      if (it != rec.extra_categoricals.end()) out << it->second;
    }
    out << '\n';
  }
}

std::string visits_to_text(const VisitTable& table, const CsvSchema& schema) {
  std::ostringstream ss;
  write_visits(ss, table, schema);
  return ss.str();
}

}  // namespace edrisk
