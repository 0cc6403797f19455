#include "policylens/preprocess.hpp"

#include <algorithm>

#include "json.hpp"
#include "policylens/errors.hpp"
#include "policylens/porter.hpp"

namespace policylens {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Decoded {
  std::uint32_t cp = 0;
  std::size_t len = 1;  // bytes consumed; 1 even for an invalid byte
};

Decoded decode_utf8(std::string_view s, std::size_t i) {
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xe0) == 0xc0) {
    len = 2;
    cp = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    len = 3;
    cp = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xfffd, 1};
  }
  if (i + len > s.size()) return {0xfffd, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char bk = static_cast<unsigned char>(s[i + k]);
    if ((bk & 0xc0) != 0x80) return {0xfffd, 1};
    cp = (cp << 6) | (bk & 0x3f);
  }
  return {cp, len};
}

// Letters are ASCII, Latin-1 supplement (folded to lowercase) and the Latin
// Extended-A/B blocks (kept as-is). Everything else separates tokens.
bool is_letter(std::uint32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp >= 0xc0 && cp <= 0xff && cp != 0xd7 && cp != 0xf7) return true;
  return cp >= 0x100 && cp <= 0x24f;
}

std::uint32_t fold(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 0x20;
  return cp;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

bool is_apostrophe(std::uint32_t cp) { return cp == 0x27 || cp == 0x2019; }

}  // namespace

std::uint64_t FrequencyTable::total() const {
  std::uint64_t sum = 0;
  for (const auto& [stem, count] : counts) sum += count;
  return sum;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const Decoded d = decode_utf8(text, i);
    if (is_letter(d.cp)) {
      append_utf8(current, fold(d.cp));
      i += d.len;
      continue;
    }
    if (is_apostrophe(d.cp) && !current.empty() && i + d.len < text.size()) {
      const Decoded next = decode_utf8(text, i + d.len);
      if (is_letter(next.cp)) {
        current += '\'';
        i += d.len;
        continue;
      }
    }
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
    i += d.len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stoplist) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.contains(t)) kept.push_back(t);
  }
  return kept;
}

std::string stem(std::string_view token) { return porter_stem(token); }

TokenizedSentence preprocess_sentence(const Sentence& sentence,
                                      const StopwordList& stoplist) {
  TokenizedSentence ts;
  ts.doc_id = sentence.doc_id;
  ts.sentence_index = sentence.index;
  for (const auto& token : remove_stopwords(tokenize(sentence.text), stoplist)) {
    std::string s = stem(token);
    if (s.size() < 2) continue;
    if (stoplist.contains(s)) continue;
    ts.stems.push_back(std::move(s));
  }
  return ts;
}

FrequencyTable term_frequency(std::span<const TokenizedSentence> sentences) {
  FrequencyTable table;
  for (const auto& s : sentences) {
    for (const auto& stem : s.stems) ++table.counts[stem];
  }
  return table;
}

std::string tokenized_to_jsonl(const TokenizedSentence& ts) {
  ordered_json j;
  j["doc_id"] = ts.doc_id;
  j["sentence_index"] = ts.sentence_index;
  j["stems"] = ts.stems;
  if (ts.label) j["label"] = to_string(*ts.label);
  return j.dump();
}

TokenizedSentence tokenized_from_jsonl(const std::string& line) {
  TokenizedSentence ts;
  try {
    const auto j = nlohmann::json::parse(line);
    ts.doc_id = j.at("doc_id").get<std::string>();
    ts.sentence_index = j.at("sentence_index").get<int>();
    ts.stems = j.at("stems").get<std::vector<std::string>>();
    if (j.contains("label")) {
      ts.label = label_from_string(j.at("label").get<std::string>());
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("bad tokenized sentence: ") + e.what());
  }
  return ts;
}

std::string frequency_to_csv(const FrequencyTable& table) {
  std::vector<std::pair<std::string, std::uint64_t>> rows(table.counts.begin(),
                                                          table.counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::string csv = "stem,count\n";
  for (const auto& [stem, count] : rows) {
    csv += stem;
    csv += ',';
    csv += std::to_string(count);
    csv += '\n';
  }
  return csv;
}

}  // namespace policylens
