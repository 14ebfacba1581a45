#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edrisk/stack.hpp"
#include "edrisk/synth.hpp"

namespace edrisk {

struct ConfigError : Error {
  using Error::Error;
};

// Flat key-value config with dotted section prefixes; every key has a
// default. Exactly one of input.path / synth.* drives the pipeline.
struct PipelineConfig {
  std::optional<std::string> input_path;
  char delimiter = ',';
  std::optional<SynthConfig> synth;
  std::vector<int> windows = {3, 7, 14};
  TrainOptions train;
  std::optional<std::string> vocabulary_path;  // featurize.vocabulary override
  std::string out_dir = "out";
};

PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::string& path);

// Built-in default: synthetic cohort with the Table-4-derived plants.
PipelineConfig default_pipeline_config();

void validate_config(const PipelineConfig& config);

}  // namespace edrisk
