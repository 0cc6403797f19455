#pragma once

#include <span>
#include <string>
#include <vector>

#include "policylens/classify.hpp"
#include "policylens/corpus.hpp"
#include "policylens/stopwords.hpp"

namespace policylens {

struct ShortenedPolicy {
  std::string doc_id;
  std::vector<Sentence> kept;  // predicted sensitive, original order
  int removed_count = 0;
  int original_sentences = 0;
  // Raw whitespace-token counts over sentence text, before any stop word
  // or stemming treatment.
  int original_words = 0;
  int kept_words = 0;
  double sentence_reduction_ratio = 0.0;  // removed / original
};

// Keeps exactly the sentences whose prediction is sensitive. The labels
// vector is parallel to `sentences`.
ShortenedPolicy apply_shortening(const PolicyDocument& doc,
                                 std::span<const Sentence> sentences,
                                 std::span<const SentenceLabel> predicted);

// Segments, preprocesses, vectorizes and predicts each sentence with the
// bundled model, then applies the shortening. Throws DataError when the
// document is empty or when `vocab` does not hash-match the model file's
// vocabulary.
ShortenedPolicy shorten(const PolicyDocument& doc, const ModelFile& model,
                        const Vocabulary& vocab, const StopwordList& stoplist);

// Kept sentences joined for output; a blank line is preserved between two
// kept sentences that were separated by one originally.
std::string shortened_text(const ShortenedPolicy& sp, const PolicyDocument& doc);

// Scalar fields as JSON for the --stats output.
std::string shortened_stats_json(const ShortenedPolicy& sp);

}  // namespace policylens
