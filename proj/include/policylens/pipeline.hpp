#pragma once

#include <cstdint>
#include <string>

namespace policylens {

struct PipelineConfig {
  std::string input_dir;
  std::string out_dir;
  std::string model_path;        // reuse an existing model instead of training
  std::string classifier = "nb"; // nb | knn | svm
  std::string stopword_path;     // empty -> builtin list
  int top_k = 500;
  int folds = 5;
  std::uint64_t seed = 1;
  double assign_threshold = 0.25;
  int lda_iterations = 500;
  int min_policy_df = 4;
  bool emit_cv = true;
};

// Reads a config file holding the fields above. JSON when the content starts
// with '{', otherwise a flat key = value TOML subset (strings, integers,
// floats, booleans; '#' comments). Unknown keys raise UsageError.
PipelineConfig load_config(const std::string& path);

// ingest -> preprocess -> vectorize -> train/predict -> shorten -> topics ->
// report. Writes every intermediate artifact plus run.json under out_dir.
// Returns the process exit code: 0 success, 4 stage failure (run.json then
// names the failed stage).
int run_pipeline(const PipelineConfig& config);

}  // namespace policylens
