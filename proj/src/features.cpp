#include "policylens/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "policylens/errors.hpp"
#include "policylens/hash.hpp"

namespace policylens {

std::string Vocabulary::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& stem : stems) {
    h = fnv1a64(stem, h);
    h = fnv1a64("\n", h);
  }
  return to_hex(h);
}

std::uint64_t FeatureVector::sum() const {
  std::uint64_t total = 0;
  for (const auto& [pos, count] : entries) total += count;
  return total;
}

double FeatureVector::norm() const {
  double sq = 0.0;
  for (const auto& [pos, count] : entries) {
    const double c = static_cast<double>(count);
    sq += c * c;
  }
  return std::sqrt(sq);
}

Vocabulary build_vocabulary(const FrequencyTable& freq, int top_k) {
  if (top_k < 1) throw UsageError("top_k must be at least 1");
  std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.counts.begin(),
                                                            freq.counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(top_k)) {
    ranked.resize(static_cast<std::size_t>(top_k));
  }
  Vocabulary vocab;
  vocab.top_k = top_k;
  vocab.stems.reserve(ranked.size());
  for (auto& [stem, count] : ranked) {
    vocab.index[stem] = static_cast<std::uint32_t>(vocab.stems.size());
    vocab.stems.push_back(std::move(stem));
  }
  return vocab;
}

FeatureVector vectorize(const TokenizedSentence& ts, const Vocabulary& vocab) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& stem : ts.stems) {
    const auto it = vocab.index.find(stem);
    if (it != vocab.index.end()) ++counts[it->second];
  }
  FeatureVector x;
  x.dimension = static_cast<std::uint32_t>(vocab.size());
  x.entries.assign(counts.begin(), counts.end());
  return x;
}

Dataset build_dataset(std::span<const TokenizedSentence> sentences,
                      const Vocabulary& vocab) {
  Dataset data;
  data.vocabulary = vocab;
  data.rows.reserve(sentences.size());
  for (const auto& ts : sentences) {
    if (!ts.label) {
      throw DataError("unlabeled sentence " + ts.doc_id + "#" +
                      std::to_string(ts.sentence_index));
    }
    DatasetRow row;
    row.x = vectorize(ts, vocab);
    row.label = *ts.label;
    row.doc_id = ts.doc_id;
    row.sentence_index = ts.sentence_index;
    data.rows.push_back(std::move(row));
  }
  return data;
}

void save_vocabulary(const Vocabulary& vocab,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary: " + path.string());
  for (const auto& stem : vocab.stems) out << stem << '\n';
}

Vocabulary load_vocabulary(const std::filesystem::path& path, int top_k) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read vocabulary: " + path.string());
  Vocabulary vocab;
  vocab.top_k = top_k;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (vocab.index.count(line) > 0) {
      throw DataError("duplicate vocabulary stem: " + line);
    }
    vocab.index[line] = static_cast<std::uint32_t>(vocab.stems.size());
    vocab.stems.push_back(line);
  }
  if (vocab.stems.size() > static_cast<std::size_t>(top_k)) {
    vocab.top_k = static_cast<int>(vocab.stems.size());
  }
  return vocab;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset: " + path.string());
  out << "doc_id,sentence_index,label,features\n";
  for (const auto& row : dataset.rows) {
    out << row.doc_id << ',' << row.sentence_index << ','
        << to_string(row.label) << ',';
    bool first = true;
    for (const auto& [pos, count] : row.x.entries) {
      if (!first) out << ';';
      out << pos << ':' << count;
      first = false;
    }
    out << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& csv_path,
                     const std::filesystem::path& vocab_path) {
  Dataset data;
  data.vocabulary = load_vocabulary(vocab_path);
  const auto dim = static_cast<std::uint32_t>(data.vocabulary.size());

  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot read dataset: " + csv_path.string());
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string doc_id, index_str, label_str, features;
    if (!std::getline(ss, doc_id, ',') || !std::getline(ss, index_str, ',') ||
        !std::getline(ss, label_str, ',')) {
      throw DataError("bad dataset row at line " + std::to_string(line_no));
    }
    std::getline(ss, features);

    DatasetRow row;
    row.doc_id = doc_id;
    row.label = label_from_string(label_str);
    row.x.dimension = dim;
    try {
      row.sentence_index = std::stoi(index_str);
      std::stringstream fs(features);
      std::string pair;
      while (std::getline(fs, pair, ';')) {
        if (pair.empty()) continue;
        const auto colon = pair.find(':');
        if (colon == std::string::npos) {
          throw DataError("bad feature pair: " + pair);
        }
        const auto pos =
            static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon)));
        const auto count =
            static_cast<std::uint32_t>(std::stoul(pair.substr(colon + 1)));
        if (pos >= dim) {
          throw DataError("feature position " + std::to_string(pos) +
                          " outside vocabulary of size " + std::to_string(dim));
        }
        if (count == 0) throw DataError("zero count in feature pair: " + pair);
        row.x.entries.emplace_back(pos, count);
      }
    } catch (const DataError&) {
      throw;
    } catch (const std::exception&) {
      throw DataError("bad dataset row at line " + std::to_string(line_no));
    }
    if (!std::is_sorted(row.x.entries.begin(), row.x.entries.end())) {
      throw DataError("unsorted feature positions at line " +
                      std::to_string(line_no));
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace policylens
