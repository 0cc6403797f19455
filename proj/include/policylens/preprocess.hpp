#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "policylens/corpus.hpp"
#include "policylens/stopwords.hpp"

namespace policylens {

struct TokenizedSentence {
  std::string doc_id;
  int sentence_index = 0;
  std::vector<std::string> stems;  // lowercase, non-empty, no stop stems
  std::optional<SentenceLabel> label;
};

// Stem -> total occurrences over some scope (corpus or single policy).
struct FrequencyTable {
  std::map<std::string, std::uint64_t> counts;

  std::uint64_t total() const;
};

// Maximal runs of letters, lowercased. Apostrophes (' and the right single
// quote) are kept when flanked by letters, so "don't" stays one token.
// Digits and punctuation separate tokens.
std::vector<std::string> tokenize(std::string_view text);

// Order-preserving filter; every surviving token is not in the list.
std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stoplist);

// Porter stem of one lowercase token.
std::string stem(std::string_view token);

// tokenize -> remove_stopwords -> stem, then drop stems shorter than two
// characters and stems that are themselves stop entries (the list is closed
// under stemming, so this bars every stop word's stem).
TokenizedSentence preprocess_sentence(const Sentence& sentence,
                                      const StopwordList& stoplist);

FrequencyTable term_frequency(std::span<const TokenizedSentence> sentences);

// JSONL: {"doc_id","sentence_index","stems":[...],"label"?}.
std::string tokenized_to_jsonl(const TokenizedSentence& ts);
TokenizedSentence tokenized_from_jsonl(const std::string& line);

// CSV "stem,count", count descending then stem ascending, with header.
std::string frequency_to_csv(const FrequencyTable& table);

}  // namespace policylens
