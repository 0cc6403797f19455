#include "policylens/evaluate.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "policylens/errors.hpp"
#include "policylens/rng.hpp"

namespace policylens {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json cells_to_json(const ConfusionMatrix& cm) {
  ordered_json j;
  j["tp"] = cm.tp;
  j["fp"] = cm.fp;
  j["tn"] = cm.tn;
  j["fn"] = cm.fn;
  return j;
}

ordered_json metric_to_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

ordered_json metrics_to_json(const Metrics& m) {
  ordered_json j;
  j["precision"] = metric_to_json(m.precision);
  j["recall"] = metric_to_json(m.recall);
  j["true_negative_rate"] = metric_to_json(m.true_negative_rate);
  j["accuracy"] = metric_to_json(m.accuracy);
  j["f1"] = metric_to_json(m.f1);
  return j;
}

}  // namespace

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

ConfusionMatrix confusion(std::span<const SentenceLabel> predicted,
                          std::span<const SentenceLabel> truth) {
  if (predicted.size() != truth.size()) {
    throw UsageError("predicted and truth label lists differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == SentenceLabel::kSensitive;
    const bool t = truth[i] == SentenceLabel::kSensitive;
    if (p && t) {
      ++cm.tp;
    } else if (p && !t) {
      ++cm.fp;
    } else if (!p && t) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  return cm;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  Metrics m;
  const auto ratio = [](std::uint64_t num,
                        std::uint64_t denom) -> std::optional<double> {
    if (denom == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(denom);
  };
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.true_negative_rate = ratio(cm.tn, cm.tn + cm.fp);
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

CVReport cross_validate(const ClassifierSpec& spec, const Dataset& data,
                        int folds, std::uint64_t seed) {
  if (folds < 2) throw UsageError("folds must be at least 2");
  const std::size_t n = data.rows.size();
  if (n < static_cast<std::size_t>(folds)) {
    throw DataError("fewer rows than folds");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& row : data.rows) {
    (row.label == SentenceLabel::kSensitive ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw DataError("degenerate labels");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (const std::size_t idx : order) {
    (data.rows[idx].label == SentenceLabel::kSensitive ? positives : negatives)
        .push_back(idx);
  }

  // Contiguous chunks per label stream. Oversized positive chunks sit in
  // the first folds and oversized negative chunks in the last, so fold
  // totals differ by at most one.
  CVReport report;
  report.folds = folds;
  report.seed = seed;
  report.fold_assignment.assign(n, 0);
  const auto f = static_cast<std::size_t>(folds);
  const auto assign_stream = [&](const std::vector<std::size_t>& stream,
                                 bool extras_first) {
    const std::size_t base = stream.size() / f;
    const std::size_t rem = stream.size() % f;
    std::size_t cursor = 0;
    for (std::size_t fold = 0; fold < f; ++fold) {
      const bool extra = extras_first ? fold < rem : fold >= f - rem;
      const std::size_t take = base + (extra ? 1 : 0);
      for (std::size_t i = 0; i < take; ++i) {
        report.fold_assignment[stream[cursor++]] = static_cast<int>(fold);
      }
    }
  };
  assign_stream(positives, true);
  assign_stream(negatives, false);

  for (int fold = 0; fold < folds; ++fold) {
    Dataset train_set;
    train_set.vocabulary = data.vocabulary;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (report.fold_assignment[i] == fold) {
        test_rows.push_back(i);
      } else {
        train_set.rows.push_back(data.rows[i]);
      }
    }

    FoldResult result;
    bool train_pos = false;
    bool train_neg = false;
    for (const auto& row : train_set.rows) {
      (row.label == SentenceLabel::kSensitive ? train_pos : train_neg) = true;
    }
    if (!train_pos || !train_neg) {
      result.degenerate = true;
    } else {
      const Model model = train(spec, train_set);
      std::vector<SentenceLabel> predicted;
      std::vector<SentenceLabel> truth;
      predicted.reserve(test_rows.size());
      truth.reserve(test_rows.size());
      for (const std::size_t i : test_rows) {
        predicted.push_back(predict(model, data.rows[i].x).label);
        truth.push_back(data.rows[i].label);
      }
      result.cells = confusion(predicted, truth);
      result.metrics = compute_metrics(result.cells);
      report.aggregate_cells += result.cells;
    }
    report.per_fold.push_back(std::move(result));
  }
  report.aggregate = compute_metrics(report.aggregate_cells);
  return report;
}

std::string cv_report_to_json(const CVReport& report) {
  ordered_json j;
  j["folds"] = report.folds;
  j["seed"] = report.seed;
  j["fold_assignment"] = report.fold_assignment;
  ordered_json per_fold = ordered_json::array();
  for (std::size_t i = 0; i < report.per_fold.size(); ++i) {
    const auto& fr = report.per_fold[i];
    ordered_json fj;
    fj["fold"] = i;
    fj["degenerate"] = fr.degenerate;
    fj["cells"] = cells_to_json(fr.cells);
    fj["metrics"] = metrics_to_json(fr.metrics);
    per_fold.push_back(std::move(fj));
  }
  j["per_fold"] = std::move(per_fold);
  ordered_json agg;
  agg["cells"] = cells_to_json(report.aggregate_cells);
  agg["metrics"] = metrics_to_json(report.aggregate);
  j["aggregate"] = std::move(agg);
  return j.dump(2) + "\n";
}

}  // namespace policylens
