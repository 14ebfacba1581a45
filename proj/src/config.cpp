#include "edrisk/config.hpp"

#include <algorithm>
#include <set>

#include "edrisk/util.hpp"

namespace edrisk {

namespace {

long long want_int(const std::string& key, const std::string& value) {
  auto v = parse_int(value);
  if (!v) throw ConfigError("config error: " + key + ": not an integer: '" + value + "'");
  return *v;
}

double want_double(const std::string& key, const std::string& value) {
  auto v = parse_double(value);
  if (!v) throw ConfigError("config error: " + key + ": not a number: '" + value + "'");
  return *v;
}

PlantedRule parse_plant(const std::string& value) {
  // "<codes> <longitudinal|horizontal> <confidence>"
  const std::vector<std::string> parts = split(std::string(trim(value)), ' ');
  std::vector<std::string> tokens;
  for (const std::string& p : parts)
    if (!trim(p).empty()) tokens.emplace_back(trim(p));
  if (tokens.size() != 3)
    throw ConfigError("config error: synth.plant: expected '<codes> <view> <confidence>', got '" +
                      value + "'");
  PlantedRule rule;
  rule.items = itemset_from_string(tokens[0]);
  if (tokens[1] == "longitudinal")
    rule.placement = ItemsetView::longitudinal;
  else if (tokens[1] == "horizontal")
    rule.placement = ItemsetView::horizontal;
  else
    throw ConfigError("config error: synth.plant: unknown view '" + tokens[1] + "'");
  rule.confidence = want_double("synth.plant", tokens[2]);
  return rule;
}

}  // namespace

PipelineConfig default_pipeline_config() {
  PipelineConfig config;
  config.synth = SynthConfig{};
  config.synth->planted_rules = default_planted_rules();
  return config;
}

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig config;
  bool synth_touched = false;
  auto synth = [&]() -> SynthConfig& {
    if (!config.synth) {
      config.synth = SynthConfig{};
      config.synth->planted_rules = default_planted_rules();
    }
    synth_touched = true;
    return *config.synth;
  };
  bool plants_cleared = false;
  std::set<std::string> seen;

  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config error: line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));

    if (key != "synth.plant" && !seen.insert(key).second)
      throw ConfigError("config error: duplicate key '" + key + "'");

    if (key == "input.path") {
      config.input_path = value;
    } else if (key == "input.delimiter") {
      if (value.size() != 1)
        throw ConfigError("config error: input.delimiter must be a single character");
      config.delimiter = value[0];
    } else if (key == "synth.n_patients") {
      synth().n_patients = want_int(key, value);
    } else if (key == "synth.visits_per_patient_mean") {
      synth().visits_per_patient_mean = want_double(key, value);
    } else if (key == "synth.positive_rate_target") {
      synth().positive_rate_target = want_double(key, value);
    } else if (key == "synth.ccs_vocabulary_size") {
      synth().ccs_vocabulary_size = static_cast<int>(want_int(key, value));
    } else if (key == "synth.seed") {
      synth().seed = static_cast<std::uint64_t>(want_int(key, value));
    } else if (key == "synth.plant") {
      SynthConfig& s = synth();
      if (!plants_cleared) {
        s.planted_rules.clear();  // explicit plants replace the defaults
        plants_cleared = true;
      }
      s.planted_rules.push_back(parse_plant(value));
    } else if (key == "windows") {
      config.windows.clear();
      for (const std::string& w : split(value, ','))
        if (!trim(w).empty()) config.windows.push_back(static_cast<int>(want_int(key, w)));
    } else if (key == "split.seed") {
      config.train.split_seed = static_cast<std::uint64_t>(want_int(key, value));
    } else if (key == "split.unit") {
      if (value == "record")
        config.train.split_unit = SplitUnit::record;
      else if (value == "patient")
        config.train.split_unit = SplitUnit::patient;
      else
        throw ConfigError("config error: split.unit must be record or patient");
    } else if (key == "featurize.count_bin_cap") {
      config.train.count_bin_cap = static_cast<int>(want_int(key, value));
    } else if (key == "featurize.vocabulary") {
      config.vocabulary_path = value;
    } else if (key == "lr.l2") {
      config.train.lr.l2 = want_double(key, value);
    } else if (key == "lr.learning_rate") {
      config.train.lr.learning_rate = want_double(key, value);
    } else if (key == "lr.max_epochs") {
      config.train.lr.max_epochs = static_cast<int>(want_int(key, value));
    } else if (key == "lr.tolerance") {
      config.train.lr.tolerance = want_double(key, value);
    } else if (key == "nb.alpha") {
      config.train.nb_alpha = want_double(key, value);
    } else if (key == "arc.grid") {
      config.train.arc_grid.clear();
      for (const std::string& g : split(value, ','))
        if (!trim(g).empty())
          config.train.arc_grid.push_back(static_cast<std::uint32_t>(want_int(key, g)));
    } else if (key == "arc.max_len") {
      if (value == "none")
        config.train.arc_max_len.reset();
      else
        config.train.arc_max_len = static_cast<int>(want_int(key, value));
    } else if (key == "arc.tie_break") {
      if (value == "lexicographic")
        config.train.tie_break = TieBreak::lexicographic;
      else if (value == "confidence")
        config.train.tie_break = TieBreak::confidence;
      else
        throw ConfigError("config error: arc.tie_break must be lexicographic or confidence");
    } else if (key == "meta.features") {
      if (value == "raw")
        config.train.meta_mode = MetaFeatureMode::raw;
      else if (value == "log_odds")
        config.train.meta_mode = MetaFeatureMode::log_odds;
      else
        throw ConfigError("config error: meta.features must be raw or log_odds");
    } else if (key == "audit.min_count") {
      config.train.audit_min_count = static_cast<std::uint32_t>(want_int(key, value));
    } else if (key == "audit.rate_threshold") {
      config.train.audit_rate_threshold = want_double(key, value);
    } else if (key == "out") {
      config.out_dir = value;
    } else {
      throw ConfigError("config error: unknown key '" + key + "'");
    }
  }
  (void)synth_touched;
  validate_config(config);
  return config;
}

PipelineConfig load_config(const std::string& path) { return parse_config_text(read_file(path)); }

void validate_config(const PipelineConfig& config) {
  if (config.input_path && config.synth)
    throw ConfigError("config error: exactly one of input.path and synth.* may be set");
  if (!config.input_path && !config.synth)
    throw ConfigError("config error: one of input.path or synth.* is required");
  if (config.windows.empty()) throw ConfigError("config error: windows must be non-empty");
  for (int w : config.windows)
    if (w != 3 && w != 7 && w != 14)
      throw ConfigError("config error: windows must be drawn from {3,7,14}, got " +
                        std::to_string(w));
  std::set<int> dedup(config.windows.begin(), config.windows.end());
  if (dedup.size() != config.windows.size())
    throw ConfigError("config error: duplicate window values");
  if (config.train.count_bin_cap < 1)
    throw ConfigError("config error: featurize.count_bin_cap must be >= 1");
  if (config.train.arc_grid.empty()) throw ConfigError("config error: arc.grid must be non-empty");
  if (config.train.nb_alpha <= 0) throw ConfigError("config error: nb.alpha must be positive");
  if (config.train.lr.max_epochs < 1)
    throw ConfigError("config error: lr.max_epochs must be >= 1");
  if (config.out_dir.empty()) throw ConfigError("config error: out must be non-empty");
}

}  // namespace edrisk
