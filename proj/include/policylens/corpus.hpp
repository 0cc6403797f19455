#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace policylens {

enum class SourceKind { kIot, kMobile, kUnknown };

std::string to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& s);

enum class SentenceLabel { kSensitive, kNonSensitive };

std::string to_string(SentenceLabel label);
SentenceLabel label_from_string(const std::string& s);

struct PolicyDocument {
  std::string id;     // filename without extension, unique within a corpus
  std::string title;  // human-readable name derived from the id
  SourceKind source_kind = SourceKind::kUnknown;
  std::string raw_text;  // UTF-8, non-empty for a loaded document
};

struct Sentence {
  std::string doc_id;
  int index = 0;  // 0-based ordinal within the document, gap-free
  std::string text;
  // Byte offsets into raw_text; raw_text.substr(begin, end - begin) == text.
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
};

struct LoadIssue {
  std::string path;
  std::string message;
};

struct LoadResult {
  std::vector<PolicyDocument> documents;  // lexicographic by filename
  std::vector<LoadIssue> issues;          // per-file problems, never fatal
};

// Loads every .txt file under `path` (or the single file `path`). A sidecar
// manifest.json ({"<filename>": "iot"|"mobile"}) assigns source kinds.
// Unreadable files are reported in issues; empty files are skipped with a
// warning. Invalid UTF-8 bytes are replaced with U+FFFD and noted.
LoadResult load_corpus(const std::filesystem::path& path);

// Rule-based splitter. Boundaries at . ? ! ; followed by whitespace, with a
// guard for listed abbreviations ("e.g.", "etc.", titles) and for dotted
// continuations such as the second period of "u.s.". Blank lines always
// break; a newline breaks when the next line starts a bullet item or when
// the current sentence is itself a bullet item.
std::vector<Sentence> segment_sentences(const PolicyDocument& doc);

// JSON Lines: {"doc_id","index","text","label"?}; label only when known.
struct SentenceRecord {
  std::string doc_id;
  int index = 0;
  std::string text;
  std::optional<SentenceLabel> label;
};

std::string sentence_record_to_jsonl(const SentenceRecord& rec);
SentenceRecord sentence_record_from_jsonl(const std::string& line);

}  // namespace policylens
