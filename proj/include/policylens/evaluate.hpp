#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "policylens/classify.hpp"

namespace policylens {

// Sensitive is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

// Each metric is nullopt when its denominator is zero; never 0/0 coerced.
struct Metrics {
  std::optional<double> precision;            // tp / (tp + fp)
  std::optional<double> recall;               // tp / (tp + fn)
  std::optional<double> true_negative_rate;   // tn / (tn + fp)
  std::optional<double> accuracy;             // (tp + tn) / total
  std::optional<double> f1;                   // harmonic mean of P and R
};

struct FoldResult {
  ConfusionMatrix cells;
  Metrics metrics;
  bool degenerate = false;  // training subset collapsed to one class
};

struct CVReport {
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold_assignment;  // fold id per dataset row
  std::vector<FoldResult> per_fold;
  // Micro-average over the summed cells of non-degenerate folds.
  ConfusionMatrix aggregate_cells;
  Metrics aggregate;
};

// Throws UsageError on length mismatch.
ConfusionMatrix confusion(std::span<const SentenceLabel> predicted,
                          std::span<const SentenceLabel> truth);

Metrics compute_metrics(const ConfusionMatrix& cm);

// Seeded shuffle, then a stratified contiguous split: each label stream is
// cut into `folds` chunks whose sizes differ by at most one, arranged so
// fold totals also differ by at most one. Each fold serves once as the test
// set with the classifier retrained on the rest. A fold whose training
// subset is single-class is flagged degenerate and left out of the
// aggregate.
CVReport cross_validate(const ClassifierSpec& spec, const Dataset& data,
                        int folds, std::uint64_t seed);

// Stable JSON (sorted keys, fold order by index); undefined metrics are
// null. Byte-identical for identical inputs.
std::string cv_report_to_json(const CVReport& report);

}  // namespace policylens
