#pragma once

#include <string>

#include "edrisk/stack.hpp"

namespace edrisk {

// Directory-style bundle: component model files plus a manifest carrying the
// format version and a content digest per file. Any single-byte corruption
// fails the digest check at load; unknown versions are refused before any
// component is parsed.
void save_model_bundle(const EnsembleModel& model, const std::vector<LeakageFlag>& audit,
                       const std::string& dir);

struct LoadedBundle {
  EnsembleModel model;
  std::string audit_text;
};

LoadedBundle load_model_bundle(const std::string& dir);

// Per-component text forms (also used by tests).
std::string logistic_to_text(const LogisticModel& model, const std::string& kind);
LogisticModel logistic_from_text(const std::string& text, const std::string& kind);
std::string naive_bayes_to_text(const NaiveBayesModel& model);
NaiveBayesModel naive_bayes_from_text(const std::string& text);
std::string ruleset_to_text(const RuleSet& rules);
RuleSet ruleset_from_text(const std::string& text);

}  // namespace edrisk
