#include "edrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "edrisk/rng.hpp"
#include "edrisk/util.hpp"

namespace edrisk {

namespace {

// Stream salts for independent draw streams per patient.
constexpr std::uint64_t kOutcomeSalt = 0x6f7574636f6d6521ULL;
constexpr std::uint64_t kOrphanSalt = 0x6f727068616e7321ULL;
constexpr std::uint64_t kRiskSalt = 0x7269736b77656967ULL;

// Population structure.
constexpr double kUnderageFrac = 0.015;
constexpr double kPregnantFrac = 0.010;
constexpr long long kOrphanDivisor = 250;  // one missing-key record per 250 patients
constexpr double kCarrierFrac = 0.012;     // per planted rule, of normal patients
constexpr double kBurstFrac = 0.45;        // patients whose visits cluster in 60 days
constexpr int kBurstSpanDays = 60;
constexpr int kHorizonDays = 365;

// Background admission risk model (logit scale).
constexpr double kRiskyCodeFrac = 0.28;
constexpr double kProtectiveCodeFrac = 0.12;
constexpr double kRiskyWeight = 2.2;
constexpr double kProtectiveWeight = -1.1;
constexpr double kAgeSlope = 0.012;
constexpr double kAgePivot = 55.0;
constexpr double kHistoryBoostPerVisit = 0.35;
constexpr int kHistoryBoostCap = 4;
constexpr double kHistoryCodeScale = 0.55;
constexpr double kBackgroundRateCap = 0.35;
constexpr double kRiskyPairBonus = 1.1;

// Outcome mechanics.
constexpr int kAdmissionMaxDelayDays = 14;
constexpr double kMentalAdmissionRate = 0.01;
constexpr int kLeakProcedureCode = 901;
constexpr double kLeakAttachPositive = 0.35;
constexpr double kLeakAttachNegative = 0.0001;

constexpr int kProcVocabularyCap = 200;

struct DraftVisit {
  int day = 0;
  int month = 1;
  std::string disposition;
  std::string facility;
  int primary = 0;
  std::vector<int> secondaries;
  std::vector<int> procedures;
  // filled later
  double risk_logit = 0.0;
  double plant_or = -1.0;     // >= 0 when some planted rule matches
  bool carrier_background = false;  // carrier patients: only planted visits admit
};

enum class Category { normal, underage, pregnant };

struct DraftPatient {
  Category category = Category::normal;
  int age = 0;
  std::string sex;
  std::string race;
  std::string home_facility;
  std::string payer;
  std::vector<DraftVisit> ed_visits;  // sorted by day
};

struct CodeSampler {
  std::vector<int> codes;
  std::vector<double> cumulative;

  int draw(Rng& rng) const { return codes[rng.weighted(cumulative)]; }
};

CodeSampler make_power_law_sampler(const std::vector<int>& codes, double exponent) {
  CodeSampler s;
  s.codes = codes;
  double total = 0.0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    total += std::pow(static_cast<double>(i + 1), -exponent);
    s.cumulative.push_back(total);
  }
  return s;
}

bool in_pregnancy_range(int code) { return code >= kPregnancyCcsLow && code <= kPregnancyCcsHigh; }
bool in_mental_range(int code) { return code >= kMentalCcsLow && code <= kMentalCcsHigh; }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double code_weight(std::uint64_t seed, int code) {
  const double u = static_cast<double>(splitmix64(seed ^ kRiskSalt ^
                                                  static_cast<std::uint64_t>(code)) >>
                                       11) *
                   0x1.0p-53;
  if (u < kRiskyCodeFrac) return kRiskyWeight;
  if (u < kRiskyCodeFrac + kProtectiveCodeFrac) return kProtectiveWeight;
  return 0.0;
}

std::string pick_weighted(Rng& rng, const std::vector<std::pair<std::string, double>>& options) {
  double total = 0.0;
  for (const auto& [_, w] : options) total += w;
  double u = rng.unit() * total;
  for (const auto& [value, w] : options) {
    if (u < w) return value;
    u -= w;
  }
  return options.back().first;
}

std::string facility_name(std::uint64_t n) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "f%03llu", static_cast<unsigned long long>(n));
  return std::string(buf);
}

const std::vector<std::pair<std::string, double>> kDispositions = {
    {"01", 0.75}, {"02", 0.10}, {"03", 0.08}, {"07", 0.05}, {"20", 0.02}};
const std::vector<std::pair<std::string, double>> kRaces = {
    {"1", 0.45}, {"2", 0.20}, {"3", 0.15}, {"4", 0.10}, {"5", 0.06}, {"6", 0.04}};
const std::vector<std::pair<std::string, double>> kPayers = {
    {"medicare", 0.25}, {"medicaid", 0.20}, {"private", 0.40}, {"selfpay", 0.10}, {"other", 0.05}};

void validate_config(const SynthConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error("configuration error: " + what); };
  if (cfg.n_patients < 0) fail("n_patients must be >= 0");
  if (cfg.visits_per_patient_mean <= 0.0) fail("visits_per_patient_mean must be positive");
  if (cfg.positive_rate_target <= 0.0 || cfg.positive_rate_target >= 1.0)
    fail("positive_rate_target must lie in (0,1)");
  if (cfg.ccs_vocabulary_size < 10) fail("ccs_vocabulary_size must be at least 10");
  for (const PlantedRule& rule : cfg.planted_rules) {
    if (rule.items.empty()) fail("planted rule with empty itemset");
    if (rule.confidence <= 0.0 || rule.confidence >= 1.0)
      fail("planted confidence must lie in (0,1)");
    for (int code : rule.items) {
      if (code < 1 || code > cfg.ccs_vocabulary_size)
        fail("planted code " + std::to_string(code) + " outside vocabulary 1.." +
             std::to_string(cfg.ccs_vocabulary_size));
      if (in_pregnancy_range(code) || in_mental_range(code))
        fail("planted code " + std::to_string(code) + " falls in an excluded CCS range");
    }
    if (rule.placement == ItemsetView::longitudinal && rule.items.size() > 13)
      fail("longitudinal plant too long for a 30-day lookback run");
    if (rule.placement == ItemsetView::horizontal && rule.items.size() > 21)
      fail("horizontal plant exceeds the 21 diagnosis slots");
  }
}

// Probability that a delay drawn uniformly from {0..14} after an admission
// triggered at day(u) lands inside the 14-day window after day(v).
double landing_prob(int day_u, int day_v) {
  const int overlap = 15 - std::abs(day_u - day_v);
  if (overlap <= 0) return 0.0;
  return static_cast<double>(overlap) / 15.0;
}

}  // namespace

std::vector<PlantedRule> default_planted_rules() {
  return {
      {Itemset{50, 141, 250, 251}, ItemsetView::longitudinal, 0.72},
      {Itemset{49, 248}, ItemsetView::horizontal, 0.65},
  };
}

std::string SynthManifest::to_text() const {
  std::ostringstream ss;
  ss << "synth_manifest 1\n";
  ss << "planted_rules " << planted_rules.size() << '\n';
  for (const PlantedRule& r : planted_rules)
    ss << itemset_to_string(r.items) << ' '
       << (r.placement == ItemsetView::longitudinal ? "longitudinal" : "horizontal") << ' '
       << fmt_double(r.confidence) << '\n';
  ss << "positive_rate_target " << fmt_double(positive_rate_target) << '\n';
  ss << "solved_background_intercept " << fmt_double(solved_background_intercept) << '\n';
  ss << "expected_positive_rate " << fmt_double(expected_positive_rate) << '\n';
  ss << "mean_background_rate " << fmt_double(mean_background_rate) << '\n';
  ss << "expected_exclusions missing_patient_key=" << expected_missing_key
     << " pregnancy=" << expected_pregnancy << " under_18=" << expected_under_18 << '\n';
  ss << "expected_retained " << expected_retained << '\n';
  ss << "total_records " << total_records << '\n';
  ss << "index_ed_visits " << index_ed_visits << '\n';
  ss << "leak_procedure_code " << leak_procedure_code << '\n';
  return ss.str();
}

SynthResult synthesize(const SynthConfig& cfg) {
  validate_config(cfg);

  std::vector<int> dx_codes;
  for (int c = 1; c <= cfg.ccs_vocabulary_size; ++c)
    if (!in_pregnancy_range(c) && !in_mental_range(c)) dx_codes.push_back(c);
  const CodeSampler dx_sampler = make_power_law_sampler(dx_codes, 1.25);

  std::vector<int> proc_codes;
  for (int c = 1; c <= std::min(cfg.ccs_vocabulary_size, kProcVocabularyCap); ++c)
    proc_codes.push_back(c);
  const CodeSampler proc_sampler = make_power_law_sampler(proc_codes, 0.9);

  // ---- Pass 1: patient structure, codes, and risk inputs --------------------
  std::vector<DraftPatient> patients(static_cast<std::size_t>(cfg.n_patients));
  for (long long p = 0; p < cfg.n_patients; ++p) {
    DraftPatient& pat = patients[static_cast<std::size_t>(p)];
    Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(p)));

    const double cat_u = rng.unit();
    if (cat_u < kUnderageFrac)
      pat.category = Category::underage;
    else if (cat_u < kUnderageFrac + kPregnantFrac)
      pat.category = Category::pregnant;

    switch (pat.category) {
      case Category::underage:
        pat.age = static_cast<int>(rng.range(1, 17));
        pat.sex = rng.bernoulli(0.5) ? "M" : "F";
        break;
      case Category::pregnant:
        pat.age = static_cast<int>(rng.range(18, 45));
        pat.sex = "F";
        break;
      case Category::normal: {
        const double u = rng.unit();
        pat.age = 18 + static_cast<int>(77.0 * u * u);
        pat.sex = rng.bernoulli(0.48) ? "M" : "F";
        break;
      }
    }
    pat.race = pick_weighted(rng, kRaces);
    pat.payer = pick_weighted(rng, kPayers);
    pat.home_facility = facility_name(rng.below(40));

    // Carrier selection: at most one planted rule per patient. Full carriers
    // present the whole itemset; partial carriers present it with one item
    // dropped, so subset rules get the diluted confidences the full rule
    // stands out from.
    int carrier_rule = -1;
    bool partial_carrier = false;
    if (pat.category == Category::normal && !cfg.planted_rules.empty()) {
      const double u = rng.unit();
      const double full_mass = kCarrierFrac * static_cast<double>(cfg.planted_rules.size());
      if (u < full_mass) {
        carrier_rule = static_cast<int>(u / kCarrierFrac);
      } else if (u < full_mass * 1.5) {
        carrier_rule = static_cast<int>((u - full_mass) / (0.5 * kCarrierFrac));
        partial_carrier = true;
      }
    }
    const bool longitudinal_carrier =
        carrier_rule >= 0 &&
        cfg.planted_rules[static_cast<std::size_t>(carrier_rule)].placement ==
            ItemsetView::longitudinal;

    // Longitudinal carriers get no background visits: their lookback must
    // contain the planted codes and nothing else.
    const long long n_background =
        longitudinal_carrier
            ? 0
            : 1 + std::min<long long>(
                      rng.geometric_count(std::max(0.0, cfg.visits_per_patient_mean - 1.0)), 4);
    const bool burst = rng.bernoulli(kBurstFrac);
    const int horizon_start = burst ? static_cast<int>(rng.range(0, kHorizonDays - kBurstSpanDays)) : 0;
    const int horizon_len = burst ? kBurstSpanDays : kHorizonDays;

    auto draw_visit = [&](int day) {
      DraftVisit v;
      v.day = day;
      v.month = static_cast<int>(rng.range(1, 12));
      v.disposition = pick_weighted(rng, kDispositions);
      v.facility = rng.bernoulli(0.7) ? pat.home_facility : facility_name(rng.below(40));
      v.primary = dx_sampler.draw(rng);
      const long long n_sec = std::min<long long>(rng.geometric_count(0.9), 5);
      for (long long i = 0; i < n_sec; ++i) {
        const int code = dx_sampler.draw(rng);
        if (code != v.primary &&
            std::find(v.secondaries.begin(), v.secondaries.end(), code) == v.secondaries.end())
          v.secondaries.push_back(code);
      }
      const long long n_proc = std::min<long long>(rng.geometric_count(0.8), 5);
      for (long long i = 0; i < n_proc; ++i) {
        const int code = proc_sampler.draw(rng);
        if (std::find(v.procedures.begin(), v.procedures.end(), code) == v.procedures.end())
          v.procedures.push_back(code);
      }
      return v;
    };

    for (long long i = 0; i < n_background; ++i)
      pat.ed_visits.push_back(draw_visit(horizon_start + static_cast<int>(rng.below(
                                             static_cast<std::uint64_t>(horizon_len)))));

    if (pat.category == Category::pregnant) {
      DraftVisit& v = pat.ed_visits[rng.below(pat.ed_visits.size())];
      v.primary = static_cast<int>(rng.range(kPregnancyCcsLow, kPregnancyCcsHigh));
    }

    if (carrier_rule >= 0) {
      const PlantedRule& rule = cfg.planted_rules[static_cast<std::size_t>(carrier_rule)];
      Itemset planted = rule.items;
      if (partial_carrier && planted.size() > 1)
        planted.erase(planted.begin() + static_cast<long>(rng.below(planted.size())));
      if (rule.placement == ItemsetView::horizontal) {
        // One visit presents exactly the planted codes; the patient's other
        // visits never trigger an admission, so the observed conditional
        // rate stays at the planted confidence.
        DraftVisit& v = pat.ed_visits[rng.below(pat.ed_visits.size())];
        v.primary = planted.front();
        v.secondaries.assign(planted.begin() + 1, planted.end());
        for (DraftVisit& other : pat.ed_visits)
          if (&other != &v) other.carrier_background = true;
      } else {
        // Precursor run covering the planted codes inside the 30-day
        // lookback of a fresh index visit. Runs never admit on their own.
        Itemset order = planted;
        rng.shuffle(order);
        const std::size_t k = order.size();
        const int max_gap = std::max(2, static_cast<int>(26 / k));
        int day = static_cast<int>(rng.range(30, kHorizonDays - 35));
        for (std::size_t i = 0; i < k; ++i) {
          DraftVisit v = draw_visit(day);
          v.primary = order[i];
          v.carrier_background = true;
          pat.ed_visits.push_back(std::move(v));
          day += static_cast<int>(rng.range(2, max_gap));
        }
        pat.ed_visits.push_back(draw_visit(day));  // the index visit
      }
    }

    std::stable_sort(pat.ed_visits.begin(), pat.ed_visits.end(),
                     [](const DraftVisit& a, const DraftVisit& b) { return a.day < b.day; });

    // Risk inputs (background logit without intercept, planted matches).
    if (pat.category == Category::normal) {
      for (std::size_t i = 0; i < pat.ed_visits.size(); ++i) {
        DraftVisit& v = pat.ed_visits[i];
        double logit = kAgeSlope * (pat.age - kAgePivot);
        int risky_codes = 0;
        auto add_code = [&](int code) {
          const double w = code_weight(cfg.seed, code);
          logit += w;
          if (w > 0.0) ++risky_codes;
        };
        add_code(v.primary);
        for (int code : v.secondaries) add_code(code);
        if (risky_codes > 1) logit += kRiskyPairBonus * (risky_codes - 1);

        Itemset prior_primaries;
        int prior_count = 0;
        for (std::size_t j = 0; j < pat.ed_visits.size(); ++j) {
          if (j == i) continue;
          const int delta = v.day - pat.ed_visits[j].day;
          if (delta < 1 || delta > 30) continue;
          ++prior_count;
          prior_primaries.push_back(pat.ed_visits[j].primary);
        }
        prior_primaries = make_itemset(std::move(prior_primaries));
        logit += kHistoryBoostPerVisit * std::min(prior_count, kHistoryBoostCap);
        double history_weight = 0.0;
        for (int code : prior_primaries) history_weight += code_weight(cfg.seed, code);
        logit += kHistoryCodeScale * history_weight;
        v.risk_logit = logit;

        Itemset horizontal = make_itemset([&] {
          std::vector<int> codes = v.secondaries;
          codes.push_back(v.primary);
          return codes;
        }());
        double miss_all = 1.0;
        bool matched = false;
        for (const PlantedRule& rule : cfg.planted_rules) {
          const Itemset& view =
              rule.placement == ItemsetView::horizontal ? horizontal : prior_primaries;
          if (itemset_subsumes(rule.items, view)) {
            matched = true;
            miss_all *= 1.0 - rule.confidence;
          }
        }
        if (matched) v.plant_or = 1.0 - miss_all;
      }
      if (carrier_rule >= 0)
        for (DraftVisit& v : pat.ed_visits)
          if (v.plant_or < 0.0) v.carrier_background = true;
    }
  }

  // ---- Calibration: solve the background intercept so the expected realized
  // 14-day positive rate over retained index visits equals the target. ------
  std::uint64_t n_index_visits = 0;
  for (const DraftPatient& pat : patients)
    if (pat.category == Category::normal) n_index_visits += pat.ed_visits.size();

  auto admission_prob = [&](const DraftVisit& v, double intercept) {
    if (v.plant_or >= 0.0) return v.plant_or;
    if (v.carrier_background) return 0.0;  // keep planted confidences clean
    return std::min(sigmoid(intercept + v.risk_logit), kBackgroundRateCap);
  };

  auto expected_rate = [&](double intercept) {
    double total = 0.0;
    for (const DraftPatient& pat : patients) {
      if (pat.category != Category::normal) continue;
      for (const DraftVisit& v : pat.ed_visits) {
        double miss = 1.0;
        for (const DraftVisit& u : pat.ed_visits)
          miss *= 1.0 - admission_prob(u, intercept) * landing_prob(u.day, v.day);
        total += 1.0 - miss;
      }
    }
    return n_index_visits ? total / static_cast<double>(n_index_visits) : 0.0;
  };

  double intercept = 0.0;
  if (n_index_visits > 0) {
    double lo = -30.0, hi = 5.0;
    if (expected_rate(lo) > cfg.positive_rate_target)
      throw Error(
          "configuration error: positive_rate_target is infeasible, planted rules alone exceed it");
    if (expected_rate(hi) < cfg.positive_rate_target)
      throw Error("configuration error: positive_rate_target is unreachable at the background cap");
    for (int iter = 0; iter < 100; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (expected_rate(mid) < cfg.positive_rate_target)
        lo = mid;
      else
        hi = mid;
    }
    intercept = 0.5 * (lo + hi);
  }

  // ---- Pass 2: admissions, leak code, mental-health noise ------------------
  SynthManifest manifest;
  manifest.planted_rules = cfg.planted_rules;
  manifest.positive_rate_target = cfg.positive_rate_target;
  manifest.solved_background_intercept = intercept;
  manifest.expected_positive_rate = n_index_visits ? expected_rate(intercept) : 0.0;
  manifest.leak_procedure_code = kLeakProcedureCode;
  manifest.index_ed_visits = n_index_visits;

  double background_sum = 0.0;
  std::uint64_t background_n = 0;

  VisitTable table;
  for (long long p = 0; p < cfg.n_patients; ++p) {
    DraftPatient& pat = patients[static_cast<std::size_t>(p)];
    Rng rng(substream_seed(splitmix64(cfg.seed ^ kOutcomeSalt), static_cast<std::uint64_t>(p)));

    char key[24];
    std::snprintf(key, sizeof(key), "p%06lld", p);

    struct Extra {
      DraftVisit visit;
      bool mental = false;
      int los = 1;
    };
    std::vector<Extra> admissions;
    if (pat.category == Category::normal) {
      for (DraftVisit& v : pat.ed_visits) {
        const double prob = admission_prob(v, intercept);
        if (v.plant_or < 0.0) {
          background_sum += prob;
          ++background_n;
        }
        const bool admit = rng.bernoulli(prob);
        if (admit) {
          Extra adm;
          adm.visit.day = v.day + static_cast<int>(rng.range(0, kAdmissionMaxDelayDays));
          adm.visit.month = static_cast<int>(rng.range(1, 12));
          adm.visit.disposition = "01";
          adm.visit.facility = pat.home_facility;
          adm.visit.primary = dx_sampler.draw(rng);
          const long long n_sec = std::min<long long>(rng.geometric_count(1.2), 5);
          for (long long i = 0; i < n_sec; ++i) {
            const int code = dx_sampler.draw(rng);
            if (code != adm.visit.primary &&
                std::find(adm.visit.secondaries.begin(), adm.visit.secondaries.end(), code) ==
                    adm.visit.secondaries.end())
              adm.visit.secondaries.push_back(code);
          }
          adm.los = 1 + static_cast<int>(rng.geometric_count(2.0));
          admissions.push_back(std::move(adm));
        }
        const double leak_p = admit ? kLeakAttachPositive : kLeakAttachNegative;
        if (rng.bernoulli(leak_p) && v.procedures.size() < 21 &&
            std::find(v.procedures.begin(), v.procedures.end(), kLeakProcedureCode) ==
                v.procedures.end())
          v.procedures.push_back(kLeakProcedureCode);
        if (rng.bernoulli(kMentalAdmissionRate)) {
          Extra adm;
          adm.visit.day = v.day + static_cast<int>(rng.range(0, 60));
          adm.visit.month = static_cast<int>(rng.range(1, 12));
          adm.visit.disposition = "01";
          adm.visit.facility = pat.home_facility;
          adm.visit.primary = static_cast<int>(rng.range(kMentalCcsLow, kMentalCcsHigh));
          adm.los = 1 + static_cast<int>(rng.geometric_count(4.0));
          adm.mental = true;
          admissions.push_back(std::move(adm));
        }
      }
    }

    // Emit this patient's records sorted by (day, id). IDs are assigned in
    // day order per stream so the sort is stable and reproducible.
    std::vector<VisitRecord> records;
    int ed_ordinal = 0;
    for (const DraftVisit& v : pat.ed_visits) {
      VisitRecord rec;
      char id[40];
      std::snprintf(id, sizeof(id), "%s-v%02d", key, ed_ordinal++);
      rec.visit_id = id;
      rec.patient_key = key;
      rec.days_to_event = v.day;
      rec.visit_type = VisitType::ed;
      rec.age = pat.age;
      rec.sex = pat.sex;
      rec.race = pat.race;
      rec.admission_month = v.month;
      rec.length_of_stay = 0;
      rec.disposition = v.disposition;
      rec.facility_id = v.facility;
      rec.primary_ccs = v.primary;
      rec.secondary_ccs = v.secondaries;
      rec.procedure_ccs = v.procedures;
      rec.extra_categoricals.emplace("payer", pat.payer);
      records.push_back(std::move(rec));
    }
    std::stable_sort(admissions.begin(), admissions.end(),
                     [](const Extra& a, const Extra& b) { return a.visit.day < b.visit.day; });
    int adm_ordinal = 0;
    for (const Extra& adm : admissions) {
      VisitRecord rec;
      char id[40];
      std::snprintf(id, sizeof(id), "%s-a%02d", key, adm_ordinal++);
      rec.visit_id = id;
      rec.patient_key = key;
      rec.days_to_event = adm.visit.day;
      rec.visit_type = VisitType::inpatient;
      rec.age = pat.age;
      rec.sex = pat.sex;
      rec.race = pat.race;
      rec.admission_month = adm.visit.month;
      rec.length_of_stay = adm.los;
      rec.disposition = adm.visit.disposition;
      rec.facility_id = adm.visit.facility;
      rec.primary_ccs = adm.visit.primary;
      rec.secondary_ccs = adm.visit.secondaries;
      rec.procedure_ccs = adm.visit.procedures;
      rec.extra_categoricals.emplace("payer", pat.payer);
      records.push_back(std::move(rec));
    }
    std::sort(records.begin(), records.end(), [](const VisitRecord& a, const VisitRecord& b) {
      if (a.days_to_event != b.days_to_event) return a.days_to_event < b.days_to_event;
      return a.visit_id < b.visit_id;
    });

    switch (pat.category) {
      case Category::underage:
        manifest.expected_under_18 += records.size();
        break;
      case Category::pregnant:
        manifest.expected_pregnancy += records.size();
        break;
      case Category::normal:
        manifest.expected_retained += records.size();
        break;
    }
    for (VisitRecord& rec : records) table.push_back(std::move(rec));
  }

  // Orphan records without a patient key, for exclusion testing.
  const long long n_orphans = cfg.n_patients / kOrphanDivisor;
  for (long long i = 0; i < n_orphans; ++i) {
    Rng rng(substream_seed(splitmix64(cfg.seed ^ kOrphanSalt), static_cast<std::uint64_t>(i)));
    VisitRecord rec;
    char id[24];
    std::snprintf(id, sizeof(id), "x%05lld", i);
    rec.visit_id = id;
    rec.patient_key = "";
    rec.days_to_event = static_cast<int>(rng.below(kHorizonDays));
    rec.visit_type = VisitType::ed;
    rec.age = 18 + static_cast<int>(rng.below(70));
    rec.sex = rng.bernoulli(0.5) ? "M" : "F";
    rec.race = pick_weighted(rng, kRaces);
    rec.admission_month = static_cast<int>(rng.range(1, 12));
    rec.disposition = pick_weighted(rng, kDispositions);
    rec.facility_id = facility_name(rng.below(40));
    rec.primary_ccs = dx_sampler.draw(rng);
    rec.extra_categoricals.emplace("payer", pick_weighted(rng, kPayers));
    table.push_back(std::move(rec));
  }
  manifest.expected_missing_key = static_cast<std::uint64_t>(n_orphans);
  manifest.total_records = table.size();
  manifest.mean_background_rate =
      background_n ? background_sum / static_cast<double>(background_n) : 0.0;

  return {std::move(table), std::move(manifest)};
}

VisitTable generate_synthetic_cohort(const SynthConfig& config) {
  return synthesize(config).visits;
}

SynthManifest plant_manifest(const SynthConfig& config) {
  return synthesize(config).manifest;
}

}  // namespace edrisk
