#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "policylens/corpus.hpp"
#include "policylens/preprocess.hpp"

namespace policylens {

// Frequency-ranked stem dictionary: count descending, ties lexicographic
// ascending, truncated to top_k.
struct Vocabulary {
  std::vector<std::string> stems;                    // position = index
  std::unordered_map<std::string, std::uint32_t> index;
  int top_k = 0;

  std::size_t size() const { return stems.size(); }
  bool empty() const { return stems.empty(); }
  // FNV-1a over the newline-joined stems; stored in model files to detect
  // vocabulary/model mismatches.
  std::string content_hash() const;
};

// Sparse bag-of-words counts; entries sorted by position, counts > 0.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  std::uint32_t dimension = 0;

  std::uint64_t sum() const;
  double norm() const;
};

struct DatasetRow {
  FeatureVector x;
  SentenceLabel label = SentenceLabel::kNonSensitive;
  std::string doc_id;
  int sentence_index = 0;
};

struct Dataset {
  Vocabulary vocabulary;
  std::vector<DatasetRow> rows;
};

Vocabulary build_vocabulary(const FrequencyTable& freq, int top_k = 500);

FeatureVector vectorize(const TokenizedSentence& ts, const Vocabulary& vocab);

// One row per sentence, original order. Throws DataError on an unlabeled
// sentence, naming its doc_id and index.
Dataset build_dataset(std::span<const TokenizedSentence> sentences,
                      const Vocabulary& vocab);

// One stem per line, position = line number.
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path, int top_k = 500);

// Sparse CSV rows: doc_id,sentence_index,label,pos:count;pos:count;...
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& csv_path,
                     const std::filesystem::path& vocab_path);

}  // namespace policylens
