#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edrisk/arc.hpp"
#include "edrisk/visit.hpp"

namespace edrisk {

struct PlantedRule {
  Itemset items;
  ItemsetView placement = ItemsetView::horizontal;
  double confidence = 0.5;
};

struct SynthConfig {
  long long n_patients = 38000;
  double visits_per_patient_mean = 3.0;
  double positive_rate_target = 0.02;
  std::vector<PlantedRule> planted_rules;  // see default_planted_rules()
  int ccs_vocabulary_size = 260;
  std::uint64_t seed = 20090;
};

// Table-4-derived plants: one longitudinal, one horizontal.
std::vector<PlantedRule> default_planted_rules();

struct SynthManifest {
  std::vector<PlantedRule> planted_rules;
  double positive_rate_target = 0.0;
  double solved_background_intercept = 0.0;  // logit intercept after calibration
  double expected_positive_rate = 0.0;       // expected realized 14-day rate
  double mean_background_rate = 0.0;         // mean admission prob of unmatched visits
  std::uint64_t expected_missing_key = 0;
  std::uint64_t expected_pregnancy = 0;
  std::uint64_t expected_under_18 = 0;
  std::uint64_t expected_retained = 0;
  std::uint64_t total_records = 0;
  std::uint64_t index_ed_visits = 0;  // ED visits surviving exclusions
  int leak_procedure_code = 0;

  std::string to_text() const;
};

struct SynthResult {
  VisitTable visits;
  SynthManifest manifest;
};

// Deterministic for a fixed config (per-patient counter-based sub-seeding).
SynthResult synthesize(const SynthConfig& config);

VisitTable generate_synthetic_cohort(const SynthConfig& config);
SynthManifest plant_manifest(const SynthConfig& config);

}  // namespace edrisk
