#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "policylens/preprocess.hpp"
#include "policylens/rng.hpp"

namespace policylens {

struct TopicSpec {
  std::string name;
  std::vector<std::string> seed_stems;
};

// The six data-practice topics with their seed stems (already stemmed).
const std::vector<TopicSpec>& default_topics();

struct TopicModelParams {
  double alpha = 0.5;
  double beta = 0.01;
  double seed_boost = 50.0;
  int iterations = 500;
  int min_policy_df = 4;
  std::uint64_t seed = 1;
};

struct TopicModel {
  std::vector<TopicSpec> topics;
  std::vector<std::string> terms;               // modelled vocabulary, sorted
  std::map<std::string, std::uint32_t> term_index;
  std::vector<std::vector<double>> phi;          // [topic][term]
  TopicModelParams params;
};

struct TopicAssignment {
  std::string doc_id;
  int sentence_index = 0;
  std::vector<double> scores;        // normalized, one per topic
  std::vector<std::string> assigned; // topics with score >= threshold
  bool fallback = false;             // true when no score cleared the threshold
};

struct TopicDistribution {
  // fraction of assigned sentences carrying each topic; fractions can sum
  // to more than one because a sentence may carry several topics.
  std::vector<std::pair<std::string, double>> fractions;
};

// Drops terms that occur in fewer than `min_policy_df` distinct documents.
// Seed stems are always retained regardless of their document frequency.
std::vector<TokenizedSentence> filter_rare_terms(
    std::span<const TokenizedSentence> sentences,
    const std::vector<TopicSpec>& topics, int min_policy_df);

// Collapsed Gibbs sampling with asymmetric term priors: a seed stem gets
// beta * seed_boost in its home topic and plain beta elsewhere. Sentences
// are the documents. Throws DataError when no modelled term survives.
TopicModel fit_labeled_lda(std::span<const TokenizedSentence> sentences,
                           const std::vector<TopicSpec>& topics,
                           const TopicModelParams& params);

// score[t] proportional to sum over sentence terms of phi[t][w] * count(w),
// normalized to sum 1. Topics at or above `threshold` are assigned; when
// none clears it the single argmax topic is assigned (ties to the lowest
// topic index). A sentence with no in-model stem gets the first topic with
// uniform scores and fallback = true. Assignments are never empty.
TopicAssignment assign_topics(const TopicModel& model,
                              const TokenizedSentence& sentence,
                              double threshold = 0.25);

// Fraction of sentences carrying each topic.
TopicDistribution topic_distribution(std::span<const TopicAssignment> assignments,
                                     const std::vector<TopicSpec>& topics);

// Fraction of policies with at least one sentence carrying each topic.
TopicDistribution topic_distribution_by_policy(
    std::span<const TopicAssignment> assignments,
    const std::vector<TopicSpec>& topics);

// Top `n` terms of a topic by phi, ties broken lexicographically.
std::vector<std::string> top_terms(const TopicModel& model, int topic, int n);

std::string topic_model_to_json(const TopicModel& model);
TopicModel topic_model_from_json(const std::string& text);
void save_topic_model(const TopicModel& model, const std::string& path);
TopicModel load_topic_model(const std::string& path);

std::string assignment_to_jsonl(const TopicAssignment& a,
                                const std::vector<TopicSpec>& topics);
TopicAssignment assignment_from_jsonl(const std::string& line,
                                      const std::vector<TopicSpec>& topics);

std::string distribution_to_csv(const TopicDistribution& dist);

}  // namespace policylens
