#include "policylens/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "policylens/errors.hpp"

namespace policylens {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Replaces every byte that does not start or continue a well-formed UTF-8
// sequence with U+FFFD. Returns the number of replacements.
int sanitize_utf8(std::string& text) {
  static const std::string kReplacement = "\xef\xbf\xbd";
  std::string out;
  out.reserve(text.size());
  int replaced = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const unsigned char b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xe0) == 0xc0) {
      len = 2;
      cp = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
      len = 3;
      cp = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len != 0 && i + len <= n;
    for (std::size_t k = 1; ok && k < len; ++k) {
      const unsigned char bk = static_cast<unsigned char>(text[i + k]);
      if ((bk & 0xc0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (bk & 0x3f);
      }
    }
    if (ok && len == 2 && cp < 0x80) ok = false;         // overlong
    if (ok && len == 3 && cp < 0x800) ok = false;        // overlong
    if (ok && len == 4 && cp < 0x10000) ok = false;      // overlong
    if (ok && cp >= 0xd800 && cp <= 0xdfff) ok = false;  // surrogate
    if (ok && cp > 0x10ffff) ok = false;
    if (ok) {
      out.append(text, i, len);
      i += len;
    } else {
      out += kReplacement;
      ++replaced;
      ++i;
    }
  }
  text = std::move(out);
  return replaced;
}

std::string title_from_id(const std::string& id) {
  std::string title;
  bool word_start = true;
  for (char c : id) {
    if (c == '_' || c == '-') {
      title += ' ';
      word_start = true;
    } else if (word_start) {
      title += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      word_start = false;
    } else {
      title += c;
    }
  }
  return title;
}

std::map<std::string, SourceKind> read_manifest(
    const std::filesystem::path& dir, std::vector<LoadIssue>& issues) {
  std::map<std::string, SourceKind> kinds;
  const auto manifest = dir / "manifest.json";
  std::error_code ec;
  if (!std::filesystem::exists(manifest, ec)) return kinds;
  std::ifstream in(manifest);
  if (!in) {
    issues.push_back({manifest.string(), "unreadable manifest"});
    return kinds;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    const auto parsed = nlohmann::json::parse(buf.str());
    for (const auto& [file, kind] : parsed.items()) {
      kinds[file] = source_kind_from_string(kind.get<std::string>());
    }
  } catch (const std::exception& e) {
    issues.push_back({manifest.string(), std::string("bad manifest: ") + e.what()});
  }
  return kinds;
}

// --- segmentation helpers ---

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> kAbbrev = {
      "etc", "vs", "mr", "mrs", "ms", "dr", "inc", "ltd", "co", "corp"};
  return kAbbrev;
}

bool is_ascii_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// Quote and bracket characters allowed between a terminator and the
// following whitespace. Covers " ' ) ] and the curly quotes and .
bool is_closer(const std::string& s, std::size_t i, std::size_t& len) {
  const char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') {
    len = 1;
    return true;
  }
  if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xe2 &&
      static_cast<unsigned char>(s[i + 1]) == 0x80) {
    const unsigned char b2 = static_cast<unsigned char>(s[i + 2]);
    if (b2 == 0x9d || b2 == 0x99) {  // ” ’
      len = 3;
      return true;
    }
  }
  return false;
}

// True when a '.' at position i must not end a sentence: the word before it
// is a listed abbreviation, a dotted continuation ("e.g.", "u.s.") or an
// enumeration number ("1.").
bool guarded_period(const std::string& s, std::size_t i) {
  std::size_t b = i;
  while (b > 0 && is_ascii_letter(s[b - 1])) --b;
  const std::size_t run = i - b;
  if (run == 0) {
    std::size_t d = i;
    while (d > 0 && is_ascii_digit(s[d - 1])) --d;
    return d < i;  // digits directly before the period
  }
  std::string word(s, b, run);
  std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  if (abbreviations().count(word) > 0) return true;
  // A single letter attached to a previous dot continues an abbreviation
  // ("e.g.", "i.e."); a free-standing single letter still terminates.
  return run == 1 && b > 0 && s[b - 1] == '.';
}

// True when position j starts a bullet item: "-", "*", or a bullet dot,
// optionally an enumeration like "3." or "3)", each followed by a space.
bool starts_bullet(const std::string& s, std::size_t j) {
  const std::size_t n = s.size();
  if (j >= n) return false;
  const char c = s[j];
  if ((c == '-' || c == '*') && j + 1 < n && (s[j + 1] == ' ' || s[j + 1] == '\t')) {
    return true;
  }
  if (j + 2 < n && static_cast<unsigned char>(c) == 0xe2 &&
      static_cast<unsigned char>(s[j + 1]) == 0x80 &&
      static_cast<unsigned char>(s[j + 2]) == 0xa2) {
    return true;  // U+2022
  }
  std::size_t d = j;
  while (d < n && is_ascii_digit(s[d])) ++d;
  if (d > j && d < n && (s[d] == '.' || s[d] == ')')) {
    return d + 1 < n && (s[d + 1] == ' ' || s[d + 1] == '\t');
  }
  return false;
}

}  // namespace

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kIot:
      return "iot";
    case SourceKind::kMobile:
      return "mobile";
    case SourceKind::kUnknown:
      return "unknown";
  }
  return "unknown";
}

SourceKind source_kind_from_string(const std::string& s) {
  if (s == "iot") return SourceKind::kIot;
  if (s == "mobile") return SourceKind::kMobile;
  if (s == "unknown") return SourceKind::kUnknown;
  throw DataError("unknown source kind: " + s);
}

std::string to_string(SentenceLabel label) {
  return label == SentenceLabel::kSensitive ? "sensitive" : "non_sensitive";
}

SentenceLabel label_from_string(const std::string& s) {
  if (s == "sensitive") return SentenceLabel::kSensitive;
  if (s == "non_sensitive") return SentenceLabel::kNonSensitive;
  throw DataError("unknown sentence label: " + s);
}

LoadResult load_corpus(const std::filesystem::path& path) {
  LoadResult result;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw DataError("corpus path does not exist: " + path.string());
  }

  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest_dir;
  if (std::filesystem::is_directory(path, ec)) {
    manifest_dir = path;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end(),
              [](const std::filesystem::path& a, const std::filesystem::path& b) {
                return a.filename().string() < b.filename().string();
              });
  } else {
    manifest_dir = path.parent_path();
    files.push_back(path);
  }

  const auto kinds = read_manifest(manifest_dir, result.issues);

  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      result.issues.push_back({file.string(), "unreadable file"});
      continue;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n\f\v") == std::string::npos) {
      result.issues.push_back({file.string(), "empty file, skipped"});
      continue;
    }
    const int replaced = sanitize_utf8(text);
    if (replaced > 0) {
      result.issues.push_back(
          {file.string(),
           "replaced " + std::to_string(replaced) + " invalid UTF-8 byte(s)"});
    }
    PolicyDocument doc;
    doc.id = file.stem().string();
    doc.title = title_from_id(doc.id);
    doc.raw_text = std::move(text);
    auto it = kinds.find(file.stem().string());
    if (it == kinds.end()) it = kinds.find(file.filename().string());
    doc.source_kind = it == kinds.end() ? SourceKind::kUnknown : it->second;
    result.documents.push_back(std::move(doc));
  }
  return result;
}

std::vector<Sentence> segment_sentences(const PolicyDocument& doc) {
  const std::string& raw = doc.raw_text;
  const std::size_t n = raw.size();
  std::vector<Sentence> out;

  auto flush = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space_byte(raw[begin])) ++begin;
    while (end > begin && is_space_byte(raw[end - 1])) --end;
    if (begin >= end) return;
    Sentence s;
    s.doc_id = doc.id;
    s.index = static_cast<int>(out.size());
    s.text = raw.substr(begin, end - begin);
    s.span_begin = begin;
    s.span_end = end;
    out.push_back(std::move(s));
  };

  std::size_t start = 0;
  std::size_t line_start = 0;
  std::size_t i = 0;
  while (i < n) {
    const char c = raw[i];
    if (c == '.' || c == '?' || c == '!' || c == ';') {
      std::size_t j = i + 1;
      std::size_t closer_len = 0;
      while (j < n && is_closer(raw, j, closer_len)) j += closer_len;
      if (j >= n || is_space_byte(raw[j])) {
        if (c != '.' || !guarded_period(raw, i)) {
          flush(start, j);
          start = j;
          i = j;
          continue;
        }
      }
      ++i;
      continue;
    }
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < n && (raw[j] == ' ' || raw[j] == '\t' || raw[j] == '\r')) ++j;
      const bool blank_after = j >= n || raw[j] == '\n';
      const bool bullet_next = j < n && starts_bullet(raw, j);
      std::size_t ls = line_start;
      while (ls < i && (raw[ls] == ' ' || raw[ls] == '\t')) ++ls;
      const bool bullet_current = starts_bullet(raw, ls);
      if (blank_after || bullet_next || bullet_current) {
        flush(start, i);
        start = i + 1;
      }
      line_start = i + 1;
      ++i;
      continue;
    }
    ++i;
  }
  flush(start, n);
  return out;
}

std::string sentence_record_to_jsonl(const SentenceRecord& rec) {
  ordered_json j;
  j["doc_id"] = rec.doc_id;
  j["index"] = rec.index;
  j["text"] = rec.text;
  if (rec.label) j["label"] = to_string(*rec.label);
  return j.dump();
}

SentenceRecord sentence_record_from_jsonl(const std::string& line) {
  SentenceRecord rec;
  try {
    const auto j = nlohmann::json::parse(line);
    rec.doc_id = j.at("doc_id").get<std::string>();
    rec.index = j.at("index").get<int>();
    rec.text = j.at("text").get<std::string>();
    if (j.contains("label")) {
      rec.label = label_from_string(j.at("label").get<std::string>());
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("bad sentence record: ") + e.what());
  }
  return rec;
}

}  // namespace policylens
