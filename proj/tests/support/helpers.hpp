#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "policylens/corpus.hpp"
#include "policylens/preprocess.hpp"

namespace testing_support {

// Unique writable directory removed at scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 gen(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("policylens_" + tag + "_" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& bytes) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline policylens::PolicyDocument make_doc(const std::string& id,
                                           const std::string& text) {
  policylens::PolicyDocument doc;
  doc.id = id;
  doc.title = id;
  doc.raw_text = text;
  return doc;
}

inline policylens::Sentence make_sentence(const std::string& doc_id, int index,
                                          const std::string& text) {
  policylens::Sentence s;
  s.doc_id = doc_id;
  s.index = index;
  s.text = text;
  s.span_begin = 0;
  s.span_end = text.size();
  return s;
}

inline policylens::TokenizedSentence make_stems(
    const std::string& doc_id, int index, std::vector<std::string> stems,
    std::optional<policylens::SentenceLabel> label = std::nullopt) {
  policylens::TokenizedSentence ts;
  ts.doc_id = doc_id;
  ts.sentence_index = index;
  ts.stems = std::move(stems);
  ts.label = label;
  return ts;
}

}  // namespace testing_support
