#include "policylens/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "policylens/errors.hpp"
#include "policylens/rng.hpp"

namespace policylens {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kModelFormatVersion = 1;

double sparse_dot(const FeatureVector& u, const FeatureVector& v) {
  double dot = 0.0;
  auto iu = u.entries.begin();
  auto iv = v.entries.begin();
  while (iu != u.entries.end() && iv != v.entries.end()) {
    if (iu->first < iv->first) {
      ++iu;
    } else if (iv->first < iu->first) {
      ++iv;
    } else {
      dot += static_cast<double>(iu->second) * static_cast<double>(iv->second);
      ++iu;
      ++iv;
    }
  }
  return dot;
}

double dense_dot(const std::vector<double>& w, const FeatureVector& x) {
  double dot = 0.0;
  for (const auto& [pos, count] : x.entries) {
    dot += w[pos] * static_cast<double>(count);
  }
  return dot;
}

void check_both_labels(const Dataset& data) {
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& row : data.rows) {
    (row.label == SentenceLabel::kSensitive ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw DataError("degenerate labels");
}

NBModel train_nb(const NbParams& params, const Dataset& data) {
  const std::size_t dim = data.vocabulary.size();
  std::vector<std::uint64_t> counts_pos(dim, 0);
  std::vector<std::uint64_t> counts_neg(dim, 0);
  std::uint64_t total_pos = 0;
  std::uint64_t total_neg = 0;
  std::uint64_t rows_pos = 0;
  std::uint64_t rows_neg = 0;
  for (const auto& row : data.rows) {
    const bool pos = row.label == SentenceLabel::kSensitive;
    auto& counts = pos ? counts_pos : counts_neg;
    auto& total = pos ? total_pos : total_neg;
    for (const auto& [p, c] : row.x.entries) {
      counts[p] += c;
      total += c;
    }
    ++(pos ? rows_pos : rows_neg);
  }

  NBModel model;
  model.alpha = params.alpha;
  model.vocab_dimension = static_cast<std::uint32_t>(dim);
  const double n = static_cast<double>(data.rows.size());
  model.log_prior_sensitive = std::log(static_cast<double>(rows_pos) / n);
  model.log_prior_non_sensitive = std::log(static_cast<double>(rows_neg) / n);
  model.log_likelihood_sensitive.resize(dim);
  model.log_likelihood_non_sensitive.resize(dim);
  const double denom_pos =
      static_cast<double>(total_pos) + params.alpha * static_cast<double>(dim);
  const double denom_neg =
      static_cast<double>(total_neg) + params.alpha * static_cast<double>(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    model.log_likelihood_sensitive[i] =
        std::log((static_cast<double>(counts_pos[i]) + params.alpha) / denom_pos);
    model.log_likelihood_non_sensitive[i] =
        std::log((static_cast<double>(counts_neg[i]) + params.alpha) / denom_neg);
  }
  return model;
}

KNNModel train_knn(const KnnParams& params, const Dataset& data) {
  if (static_cast<std::size_t>(params.k) > data.rows.size()) {
    throw DataError("k exceeds the number of training rows");
  }
  KNNModel model;
  model.k = params.k;
  model.vocab_dimension = static_cast<std::uint32_t>(data.vocabulary.size());
  model.rows.reserve(data.rows.size());
  model.labels.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    model.rows.push_back(row.x);
    model.labels.push_back(row.label);
  }
  return model;
}

double svm_objective(const std::vector<double>& w, double bias, double lambda,
                     const Dataset& data) {
  double norm_sq = 0.0;
  for (double wi : w) norm_sq += wi * wi;
  double hinge = 0.0;
  for (const auto& row : data.rows) {
    const double y = row.label == SentenceLabel::kSensitive ? 1.0 : -1.0;
    const double margin = y * (dense_dot(w, row.x) + bias);
    hinge += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * lambda * norm_sq + hinge / static_cast<double>(data.rows.size());
}

// Primal subgradient descent on the L2-regularized hinge loss with step
// size 1/(lambda * t). The bias term follows only the hinge subgradient
// (no shrinkage), keeping the offset unregularized.
SVMModel train_svm(const SvmParams& params, const Dataset& data) {
  const std::size_t dim = data.vocabulary.size();
  SVMModel model;
  model.lambda = params.lambda;
  model.epochs = params.epochs;
  model.seed = params.seed;
  model.vocab_dimension = static_cast<std::uint32_t>(dim);
  model.weights.assign(dim, 0.0);
  model.bias = 0.0;

  Rng rng(params.seed);
  std::vector<std::size_t> order(data.rows.size());
  std::iota(order.begin(), order.end(), 0);

  std::uint64_t t = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (params.lambda * static_cast<double>(t));
      const auto& row = data.rows[idx];
      const double y = row.label == SentenceLabel::kSensitive ? 1.0 : -1.0;
      const double margin = y * (dense_dot(model.weights, row.x) + model.bias);
      const double decay = 1.0 - eta * params.lambda;
      for (double& wi : model.weights) wi *= decay;
      if (margin < 1.0) {
        for (const auto& [pos, count] : row.x.entries) {
          model.weights[pos] += eta * y * static_cast<double>(count);
        }
        model.bias += eta * y;
      }
    }
    model.epoch_losses.push_back(
        svm_objective(model.weights, model.bias, params.lambda, data));
  }
  return model;
}

ordered_json feature_vector_to_json(const FeatureVector& x) {
  ordered_json entries = ordered_json::array();
  for (const auto& [pos, count] : x.entries) {
    entries.push_back(ordered_json::array({pos, count}));
  }
  return entries;
}

FeatureVector feature_vector_from_json(const nlohmann::json& j,
                                       std::uint32_t dimension) {
  FeatureVector x;
  x.dimension = dimension;
  for (const auto& pair : j) {
    x.entries.emplace_back(pair.at(0).get<std::uint32_t>(),
                           pair.at(1).get<std::uint32_t>());
  }
  return x;
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kNaiveBayes:
      return "nb";
    case ClassifierKind::kKnn:
      return "knn";
    case ClassifierKind::kSvm:
      return "svm";
  }
  return "nb";
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
  if (s == "nb") return ClassifierKind::kNaiveBayes;
  if (s == "knn") return ClassifierKind::kKnn;
  if (s == "svm") return ClassifierKind::kSvm;
  throw UsageError("unknown classifier kind: " + s);
}

ClassifierSpec ClassifierSpec::naive_bayes(double alpha) {
  if (alpha <= 0.0) throw UsageError("alpha must be positive");
  return {ClassifierKind::kNaiveBayes, NbParams{alpha}};
}

ClassifierSpec ClassifierSpec::knn(int k) {
  if (k < 1 || k % 2 == 0) throw UsageError("k must be odd and at least 1");
  return {ClassifierKind::kKnn, KnnParams{k}};
}

ClassifierSpec ClassifierSpec::svm(double lambda, int epochs,
                                   std::uint64_t seed) {
  if (lambda <= 0.0) throw UsageError("lambda must be positive");
  if (epochs < 1) throw UsageError("epochs must be at least 1");
  return {ClassifierKind::kSvm, SvmParams{lambda, epochs, seed}};
}

Model train(const ClassifierSpec& spec, const Dataset& data) {
  if (data.rows.empty()) throw DataError("empty dataset");
  if (data.vocabulary.empty()) throw DataError("empty vocabulary");
  check_both_labels(data);
  for (const auto& row : data.rows) {
    if (row.x.dimension != data.vocabulary.size()) {
      throw UsageError("dataset row dimension does not match vocabulary");
    }
  }
  switch (spec.kind) {
    case ClassifierKind::kNaiveBayes:
      return train_nb(std::get<NbParams>(spec.hyperparams), data);
    case ClassifierKind::kKnn:
      return train_knn(std::get<KnnParams>(spec.hyperparams), data);
    case ClassifierKind::kSvm:
      return train_svm(std::get<SvmParams>(spec.hyperparams), data);
  }
  throw UsageError("unknown classifier kind");
}

Prediction predict(const Model& model, const FeatureVector& x) {
  if (x.dimension != model_dimension(model)) {
    throw UsageError("query dimension does not match model");
  }
  Prediction pred;
  if (const auto* nb = std::get_if<NBModel>(&model)) {
    double lp = nb->log_prior_sensitive;
    double ln = nb->log_prior_non_sensitive;
    for (const auto& [pos, count] : x.entries) {
      lp += static_cast<double>(count) * nb->log_likelihood_sensitive[pos];
      ln += static_cast<double>(count) * nb->log_likelihood_non_sensitive[pos];
    }
    pred.score = lp - ln;
    pred.label = pred.score > 0.0 ? SentenceLabel::kSensitive
                                  : SentenceLabel::kNonSensitive;
    return pred;
  }
  if (const auto* knn = std::get_if<KNNModel>(&model)) {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(knn->rows.size());
    for (std::size_t i = 0; i < knn->rows.size(); ++i) {
      ranked.emplace_back(cosine_similarity(x, knn->rows[i]), i);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const std::size_t k = static_cast<std::size_t>(knn->k);
    std::size_t votes = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (knn->labels[ranked[i].second] == SentenceLabel::kSensitive) ++votes;
    }
    pred.score = static_cast<double>(votes) / static_cast<double>(k);
    pred.label = pred.score > 0.5 ? SentenceLabel::kSensitive
                                  : SentenceLabel::kNonSensitive;
    return pred;
  }
  const auto& svm = std::get<SVMModel>(model);
  pred.score = dense_dot(svm.weights, x) + svm.bias;
  pred.label = pred.score > 0.0 ? SentenceLabel::kSensitive
                                : SentenceLabel::kNonSensitive;
  return pred;
}

double cosine_similarity(const FeatureVector& u, const FeatureVector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return sparse_dot(u, v) / (nu * nv);
}

ClassifierKind model_kind(const Model& model) {
  if (std::holds_alternative<NBModel>(model)) return ClassifierKind::kNaiveBayes;
  if (std::holds_alternative<KNNModel>(model)) return ClassifierKind::kKnn;
  return ClassifierKind::kSvm;
}

std::uint32_t model_dimension(const Model& model) {
  return std::visit([](const auto& m) { return m.vocab_dimension; }, model);
}

std::string model_file_to_json(const ModelFile& mf) {
  ordered_json j;
  j["format"] = "policylens-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(model_kind(mf.model));
  j["vocab_hash"] = mf.vocabulary.content_hash();
  j["top_k"] = mf.vocabulary.top_k;
  j["vocabulary"] = mf.vocabulary.stems;

  ordered_json m;
  if (const auto* nb = std::get_if<NBModel>(&mf.model)) {
    m["alpha"] = nb->alpha;
    m["log_prior_sensitive"] = nb->log_prior_sensitive;
    m["log_prior_non_sensitive"] = nb->log_prior_non_sensitive;
    m["log_likelihood_sensitive"] = nb->log_likelihood_sensitive;
    m["log_likelihood_non_sensitive"] = nb->log_likelihood_non_sensitive;
  } else if (const auto* knn = std::get_if<KNNModel>(&mf.model)) {
    m["k"] = knn->k;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < knn->rows.size(); ++i) {
      ordered_json row;
      row["label"] = to_string(knn->labels[i]);
      row["entries"] = feature_vector_to_json(knn->rows[i]);
      rows.push_back(std::move(row));
    }
    m["rows"] = std::move(rows);
  } else {
    const auto& svm = std::get<SVMModel>(mf.model);
    m["lambda"] = svm.lambda;
    m["epochs"] = svm.epochs;
    m["seed"] = svm.seed;
    m["bias"] = svm.bias;
    m["weights"] = svm.weights;
    m["epoch_losses"] = svm.epoch_losses;
  }
  j["model"] = std::move(m);
  return j.dump(2) + "\n";
}

ModelFile model_file_from_json(const std::string& text) {
  ModelFile mf;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "policylens-model") {
      throw DataError("not a model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model version");
    }
    mf.vocabulary.top_k = j.at("top_k").get<int>();
    mf.vocabulary.stems = j.at("vocabulary").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < mf.vocabulary.stems.size(); ++i) {
      mf.vocabulary.index[mf.vocabulary.stems[i]] =
          static_cast<std::uint32_t>(i);
    }
    if (j.at("vocab_hash").get<std::string>() != mf.vocabulary.content_hash()) {
      throw DataError("vocabulary hash mismatch in model file");
    }
    const auto dim = static_cast<std::uint32_t>(mf.vocabulary.size());
    const auto kind = classifier_kind_from_string(j.at("kind").get<std::string>());
    const auto& m = j.at("model");
    if (kind == ClassifierKind::kNaiveBayes) {
      NBModel nb;
      nb.alpha = m.at("alpha").get<double>();
      nb.log_prior_sensitive = m.at("log_prior_sensitive").get<double>();
      nb.log_prior_non_sensitive = m.at("log_prior_non_sensitive").get<double>();
      nb.log_likelihood_sensitive =
          m.at("log_likelihood_sensitive").get<std::vector<double>>();
      nb.log_likelihood_non_sensitive =
          m.at("log_likelihood_non_sensitive").get<std::vector<double>>();
      nb.vocab_dimension = dim;
      if (nb.log_likelihood_sensitive.size() != dim ||
          nb.log_likelihood_non_sensitive.size() != dim) {
        throw DataError("likelihood table does not match vocabulary size");
      }
      mf.model = std::move(nb);
    } else if (kind == ClassifierKind::kKnn) {
      KNNModel knn;
      knn.k = m.at("k").get<int>();
      knn.vocab_dimension = dim;
      for (const auto& row : m.at("rows")) {
        knn.labels.push_back(label_from_string(row.at("label").get<std::string>()));
        knn.rows.push_back(feature_vector_from_json(row.at("entries"), dim));
      }
      if (knn.rows.size() < static_cast<std::size_t>(knn.k)) {
        throw DataError("k exceeds the number of stored rows");
      }
      mf.model = std::move(knn);
    } else {
      SVMModel svm;
      svm.lambda = m.at("lambda").get<double>();
      svm.epochs = m.at("epochs").get<int>();
      svm.seed = m.at("seed").get<std::uint64_t>();
      svm.bias = m.at("bias").get<double>();
      svm.weights = m.at("weights").get<std::vector<double>>();
      svm.epoch_losses = m.at("epoch_losses").get<std::vector<double>>();
      svm.vocab_dimension = dim;
      if (svm.weights.size() != dim) {
        throw DataError("weight vector does not match vocabulary size");
      }
      mf.model = std::move(svm);
    }
  } catch (const DataError&) {
    throw;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("bad model file: ") + e.what());
  }
  return mf;
}

void save_model(const ModelFile& mf, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model: " + path.string());
  out << model_file_to_json(mf);
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read model: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return model_file_from_json(buf.str());
}

}  // namespace policylens
