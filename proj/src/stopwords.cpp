#include "policylens/stopwords.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <vector>

#include "policylens/errors.hpp"
#include "policylens/porter.hpp"

namespace policylens {

namespace {

// Classic English stop word list (177 entries). Two deliberate edits for
// this domain:
//   - "may" is included: modal verbs carry no signal in policy prose.
//   - the pronoun "us" is excluded: the stemmer maps use/uses/used/using to
//     "us", and because the list is closed under stemming, listing the
//     pronoun would silently erase every occurrence of "use" from the
//     pipeline.
constexpr const char* kBuiltin[] = {
    // pronouns and determiners
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
    "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "her", "hers", "herself", "it", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom", "this",
    "that", "these", "those",
    // be / have / do and modals
    "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
    "had", "having", "do", "does", "did", "doing", "can", "could", "may",
    "might", "must", "shall", "should", "will", "would",
    // articles, conjunctions, prepositions
    "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
    "while", "of", "at", "by", "for", "with", "about", "against", "between",
    "into", "through", "during", "before", "after", "above", "below", "to",
    "from", "up", "down", "in", "out", "on", "off", "over", "under", "again",
    "further", "then", "once",
    // adverbs and quantifiers
    "here", "there", "when", "where", "why", "how", "all", "any", "both",
    "each", "few", "more", "most", "other", "some", "such", "no", "nor",
    "not", "only", "own", "same", "so", "than", "too", "very", "just", "now",
    "also",
    // contractions (the tokenizer keeps internal apostrophes)
    "cannot", "can't", "couldn't", "didn't", "doesn't", "don't", "hadn't",
    "hasn't", "haven't", "isn't", "it's", "i'm", "i've", "i'll", "i'd",
    "let's", "mightn't", "mustn't", "needn't", "shan't", "she's", "he's",
    "shouldn't", "that's", "there's", "they'll", "they're", "they've",
    "wasn't", "we'll", "we're", "we've", "weren't", "what's", "who's",
    "won't", "wouldn't", "you'd", "you'll", "you're", "you've"};

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

// Closes the set under the stemmer so a post-stemming membership test
// catches surface forms that collapse onto a stop word.
std::unordered_set<std::string> close_under_stemming(
    std::unordered_set<std::string> words) {
  std::vector<std::string> stems;
  stems.reserve(words.size());
  for (const auto& w : words) stems.push_back(porter_stem(w));
  for (auto& s : stems) words.insert(std::move(s));
  return words;
}

}  // namespace

StopwordList::StopwordList(std::unordered_set<std::string> words,
                           std::string version)
    : words_(std::move(words)), version_(std::move(version)) {}

const StopwordList& StopwordList::builtin() {
  static const StopwordList instance = [] {
    std::unordered_set<std::string> words;
    for (const char* w : kBuiltin) words.insert(w);
    return StopwordList(close_under_stemming(std::move(words)), "builtin-1");
  }();
  return instance;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read stop word list: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    words.insert(lowercase(line.substr(first, last - first + 1)));
  }
  return StopwordList(close_under_stemming(std::move(words)),
                      "file:" + path.filename().string());
}

bool StopwordList::contains(std::string_view token) const {
  return words_.count(std::string(token)) > 0;
}

}  // namespace policylens
