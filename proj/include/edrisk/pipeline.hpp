#pragma once

#include <iosfwd>
#include <string>

#include "edrisk/config.hpp"

namespace edrisk {

// Full run: data -> exclusions -> labeling per window -> split -> featurize
// -> ensemble training -> evaluation. Writes all artifacts under
// config.out_dir; stage timings go to the diagnostics stream. Throws Error
// with the failing stage named.
void run_pipeline(const PipelineConfig& config, std::ostream& diagnostics);

// Writes cohort.csv and synth_manifest.txt for the config's synth section.
void run_synth(const PipelineConfig& config, std::ostream& diagnostics);

// Parses the input file, applies exclusions, writes cleaned.csv and
// exclusion_report.txt.
void run_ingest(const PipelineConfig& config, std::ostream& diagnostics);

// Re-evaluates saved window bundles under <bundle_root>/models on the
// config's data; writes eval_report.txt into bundle_root.
void run_evaluate(const PipelineConfig& config, const std::string& bundle_root,
                  std::ostream& diagnostics);

// Prints top-k coefficients, top-k rules per ARC view (Table-style layout)
// and the persisted leakage audit for one window bundle.
void run_explain(const std::string& bundle_dir, int k, std::ostream& out);

// Scores every ED visit in visits_path using the bundle(s) at bundle_path
// (a single window bundle or a directory of w<N> bundles); history comes
// from timelines_path. One output line per visit: id then one score per
// window. Rows without a resolvable timeline fall back to an empty context
// with a warning.
void run_predict(const std::string& bundle_path, const std::string& visits_path,
                 const std::string& timelines_path, const std::string& out_path,
                 std::ostream& diagnostics);

}  // namespace edrisk
