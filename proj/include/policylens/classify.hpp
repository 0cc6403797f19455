#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "policylens/features.hpp"

namespace policylens {

enum class ClassifierKind { kNaiveBayes, kKnn, kSvm };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& s);

struct NbParams {
  double alpha = 1.0;  // add-alpha smoothing, > 0
};

struct KnnParams {
  int k = 5;  // >= 1 and odd; cosine similarity
};

struct SvmParams {
  double lambda = 1e-4;  // L2 regularization, > 0
  int epochs = 20;       // >= 1
  std::uint64_t seed = 1;
  // Step size at update t; the only implemented schedule is 1/(lambda*t).
  std::string schedule = "inv_lambda_t";
};

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kNaiveBayes;
  std::variant<NbParams, KnnParams, SvmParams> hyperparams = NbParams{};

  static ClassifierSpec naive_bayes(double alpha = 1.0);
  static ClassifierSpec knn(int k = 5);
  static ClassifierSpec svm(double lambda = 1e-4, int epochs = 20,
                            std::uint64_t seed = 1);
};

// Multinomial model in log space; likelihoods add-alpha smoothed over the
// vocabulary so each class's word distribution sums to one.
struct NBModel {
  double alpha = 1.0;
  double log_prior_sensitive = 0.0;
  double log_prior_non_sensitive = 0.0;
  std::vector<double> log_likelihood_sensitive;      // per vocab position
  std::vector<double> log_likelihood_non_sensitive;  // per vocab position
  std::uint32_t vocab_dimension = 0;
};

struct KNNModel {
  int k = 5;
  std::vector<FeatureVector> rows;
  std::vector<SentenceLabel> labels;
  std::uint32_t vocab_dimension = 0;
};

struct SVMModel {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 1e-4;
  int epochs = 20;
  std::uint64_t seed = 1;
  std::vector<double> epoch_losses;  // regularized hinge loss after each epoch
  std::uint32_t vocab_dimension = 0;
};

using Model = std::variant<NBModel, KNNModel, SVMModel>;

// score: NB log-odds sensitive vs non-sensitive; KNN fraction of the k
// neighbors voting sensitive; SVM signed margin w.x + b. Sensitive iff
// score > 0 (NB/SVM) or > 0.5 (KNN); exact boundaries predict non-sensitive.
struct Prediction {
  SentenceLabel label = SentenceLabel::kNonSensitive;
  double score = 0.0;
};

// Throws DataError when the dataset is empty, single-class, or has an empty
// vocabulary. Deterministic for a given ClassifierSpec (SVM: via its seed).
Model train(const ClassifierSpec& spec, const Dataset& data);

// Throws UsageError on dimension mismatch.
Prediction predict(const Model& model, const FeatureVector& x);

// u.v / (|u||v|); 0 when either norm is zero.
double cosine_similarity(const FeatureVector& u, const FeatureVector& v);

// A trained model bundled with its vocabulary, persisted as versioned JSON
// carrying the vocabulary hash.
struct ModelFile {
  Vocabulary vocabulary;
  Model model;
};

std::string model_file_to_json(const ModelFile& mf);
ModelFile model_file_from_json(const std::string& text);
void save_model(const ModelFile& mf, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

ClassifierKind model_kind(const Model& model);
std::uint32_t model_dimension(const Model& model);

}  // namespace policylens
