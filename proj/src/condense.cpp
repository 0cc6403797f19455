#include "policylens/condense.hpp"

#include <sstream>

#include "json.hpp"
#include "policylens/errors.hpp"
#include "policylens/preprocess.hpp"

namespace policylens {

namespace {

using ordered_json = nlohmann::ordered_json;

int whitespace_words(const std::string& text) {
  std::istringstream in(text);
  std::string token;
  int count = 0;
  while (in >> token) ++count;
  return count;
}

}  // namespace

ShortenedPolicy apply_shortening(const PolicyDocument& doc,
                                 std::span<const Sentence> sentences,
                                 std::span<const SentenceLabel> predicted) {
  if (sentences.size() != predicted.size()) {
    throw UsageError("sentence and label lists differ in length");
  }
  ShortenedPolicy sp;
  sp.doc_id = doc.id;
  sp.original_sentences = static_cast<int>(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const int words = whitespace_words(sentences[i].text);
    sp.original_words += words;
    if (predicted[i] == SentenceLabel::kSensitive) {
      sp.kept.push_back(sentences[i]);
      sp.kept_words += words;
    } else {
      ++sp.removed_count;
    }
  }
  if (sp.original_sentences > 0) {
    sp.sentence_reduction_ratio = static_cast<double>(sp.removed_count) /
                                  static_cast<double>(sp.original_sentences);
  }
  return sp;
}

ShortenedPolicy shorten(const PolicyDocument& doc, const ModelFile& model,
                        const Vocabulary& vocab, const StopwordList& stoplist) {
  if (vocab.content_hash() != model.vocabulary.content_hash()) {
    throw DataError("vocabulary does not match the model's vocabulary hash");
  }
  const std::vector<Sentence> sentences = segment_sentences(doc);
  if (sentences.empty()) {
    throw DataError("document has no sentences: " + doc.id);
  }
  std::vector<SentenceLabel> predicted;
  predicted.reserve(sentences.size());
  for (const auto& s : sentences) {
    const TokenizedSentence ts = preprocess_sentence(s, stoplist);
    predicted.push_back(predict(model.model, vectorize(ts, vocab)).label);
  }
  return apply_shortening(doc, sentences, predicted);
}

std::string shortened_text(const ShortenedPolicy& sp,
                           const PolicyDocument& doc) {
  std::string out;
  for (std::size_t i = 0; i < sp.kept.size(); ++i) {
    if (i > 0) {
      // Preserve a paragraph break when the original gap between the two
      // kept sentences contained one.
      const auto& prev = sp.kept[i - 1];
      const auto& cur = sp.kept[i];
      const std::string gap = doc.raw_text.substr(
          prev.span_end, cur.span_begin - prev.span_end);
      const auto first_nl = gap.find('\n');
      const bool paragraph =
          first_nl != std::string::npos && gap.find('\n', first_nl + 1) != std::string::npos;
      out += paragraph ? "\n\n" : " ";
    }
    out += sp.kept[i].text;
  }
  if (!out.empty()) out += '\n';
  return out;
}

std::string shortened_stats_json(const ShortenedPolicy& sp) {
  ordered_json j;
  j["doc_id"] = sp.doc_id;
  j["original_sentences"] = sp.original_sentences;
  j["kept_sentences"] = static_cast<int>(sp.kept.size());
  j["removed_count"] = sp.removed_count;
  j["sentence_reduction_ratio"] = sp.sentence_reduction_ratio;
  j["original_words"] = sp.original_words;
  j["kept_words"] = sp.kept_words;
  return j.dump(2) + "\n";
}

}  // namespace policylens
