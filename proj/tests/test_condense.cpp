#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "policylens/condense.hpp"
#include "policylens/errors.hpp"
#include "policylens/evaluate.hpp"
#include "policylens/preprocess.hpp"
#include "support/helpers.hpp"

using namespace policylens;
using testing_support::make_doc;

namespace {

constexpr auto kSens = SentenceLabel::kSensitive;
constexpr auto kNon = SentenceLabel::kNonSensitive;

int whitespace_tokens(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  int count = 0;
  while (in >> tok) ++count;
  return count;
}

struct FixtureModel {
  LoadResult corpus;
  ModelFile mf;
  StopwordList stoplist = StopwordList::builtin();
};

FixtureModel train_on_fixtures() {
  FixtureModel fm;
  fm.corpus = load_corpus(FIXTURE_DIR);
  std::map<std::pair<std::string, int>, SentenceLabel> gold;
  {
    std::ifstream in(std::string(FIXTURE_DIR) + "/labels.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto rec = sentence_record_from_jsonl(line);
      if (rec.label) gold[{rec.doc_id, rec.index}] = *rec.label;
    }
  }
  std::vector<TokenizedSentence> all;
  for (const auto& doc : fm.corpus.documents) {
    for (const auto& s : segment_sentences(doc)) {
      auto ts = preprocess_sentence(s, fm.stoplist);
      ts.label = gold.at({s.doc_id, s.index});
      all.push_back(std::move(ts));
    }
  }
  const auto vocab = build_vocabulary(term_frequency(all), 500);
  fm.mf.vocabulary = vocab;
  fm.mf.model = train(ClassifierSpec::naive_bayes(), build_dataset(all, vocab));
  return fm;
}

}  // namespace

TEST_CASE("keeping everything and dropping everything are exact") {
  const auto doc = make_doc("p", "We collect data. We store data. Contact us.");
  const auto sentences = segment_sentences(doc);
  REQUIRE(sentences.size() == 3);

  const auto kept_all = apply_shortening(
      doc, sentences, std::vector<SentenceLabel>{kSens, kSens, kSens});
  CHECK(kept_all.kept.size() == 3);
  CHECK(kept_all.removed_count == 0);
  CHECK(kept_all.sentence_reduction_ratio == 0.0);
  CHECK(kept_all.kept_words == kept_all.original_words);

  const auto kept_none = apply_shortening(
      doc, sentences, std::vector<SentenceLabel>{kNon, kNon, kNon});
  CHECK(kept_none.kept.empty());
  CHECK(kept_none.removed_count == 3);
  CHECK(kept_none.sentence_reduction_ratio == 1.0);
  CHECK(kept_none.kept_words == 0);
}

TEST_CASE("shortening keeps the predicted-sensitive subset in order") {
  const auto doc = make_doc(
      "p", "Intro words here. We collect names. Legal boilerplate. We share "
           "data with partners. Goodbye.");
  const auto sentences = segment_sentences(doc);
  REQUIRE(sentences.size() == 5);
  const std::vector<SentenceLabel> predicted = {kNon, kSens, kNon, kSens, kNon};
  const auto sp = apply_shortening(doc, sentences, predicted);

  REQUIRE(sp.kept.size() == 2);
  CHECK(sp.kept[0].text == "We collect names.");
  CHECK(sp.kept[1].text == "We share data with partners.");
  CHECK(sp.kept[0].index < sp.kept[1].index);
  CHECK(sp.removed_count == 3);
  CHECK(sp.original_sentences == 5);
  CHECK(sp.removed_count + static_cast<int>(sp.kept.size()) ==
        sp.original_sentences);
  CHECK(sp.sentence_reduction_ratio == doctest::Approx(3.0 / 5.0));

  // independent word recount over raw sentence text
  int original_words = 0, kept_words = 0;
  for (const auto& s : sentences) original_words += whitespace_tokens(s.text);
  for (const auto& s : sp.kept) kept_words += whitespace_tokens(s.text);
  CHECK(sp.original_words == original_words);
  CHECK(sp.kept_words == kept_words);

  const auto text = shortened_text(sp, doc);
  CHECK(text.find("We collect names.") != std::string::npos);
  CHECK(text.find("Legal boilerplate.") == std::string::npos);

  const auto stats = nlohmann::json::parse(shortened_stats_json(sp));
  CHECK(stats.at("doc_id") == "p");
  CHECK(stats.at("original_sentences") == 5);
  CHECK(stats.at("removed_count") == 3);
  CHECK(stats.at("original_words") == original_words);
  CHECK(stats.at("kept_words") == kept_words);
  CHECK(stats.at("sentence_reduction_ratio").get<double>() ==
        doctest::Approx(0.6));
}

TEST_CASE("label list must match the sentence list") {
  const auto doc = make_doc("p", "One. Two.");
  const auto sentences = segment_sentences(doc);
  CHECK_THROWS_AS(
      apply_shortening(doc, sentences, std::vector<SentenceLabel>{kSens}),
      UsageError);
}

TEST_CASE("shorten equals a manual predict-and-filter pass") {
  const auto fm = train_on_fixtures();
  const auto& doc = fm.corpus.documents.front();
  const auto sp = shorten(doc, fm.mf, fm.mf.vocabulary, fm.stoplist);

  std::vector<int> kept_indexes;
  for (const auto& s : sp.kept) kept_indexes.push_back(s.index);

  std::vector<int> expected;
  for (const auto& s : segment_sentences(doc)) {
    const auto ts = preprocess_sentence(s, fm.stoplist);
    const auto pred = predict(fm.mf.model, vectorize(ts, fm.mf.vocabulary));
    if (pred.label == kSens) expected.push_back(s.index);
  }
  CHECK(kept_indexes == expected);
  CHECK_FALSE(expected.empty());
}

TEST_CASE("shorten rejects empty documents and mismatched vocabularies") {
  const auto fm = train_on_fixtures();
  CHECK_THROWS_AS(shorten(make_doc("p", ""), fm.mf, fm.mf.vocabulary,
                          fm.stoplist),
                  DataError);

  Vocabulary other;
  other.stems = {"completely", "different"};
  other.index = {{"completely", 0}, {"different", 1}};
  other.top_k = 2;
  CHECK_THROWS_AS(shorten(make_doc("p", "Some text."), fm.mf, other,
                          fm.stoplist),
                  DataError);
}
