#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "policylens/corpus.hpp"
#include "support/helpers.hpp"

using namespace policylens;
using testing_support::TempDir;
using testing_support::make_doc;
using testing_support::write_file;

TEST_CASE("three explicit terminators give three sentences") {
  const auto sentences = segment_sentences(make_doc("p", "A. B? C."));
  REQUIRE(sentences.size() == 3);
  CHECK(sentences[0].text == "A.");
  CHECK(sentences[1].text == "B?");
  CHECK(sentences[2].text == "C.");
  for (int i = 0; i < 3; ++i) CHECK(sentences[i].index == i);
}

TEST_CASE("empty document yields no sentences") {
  CHECK(segment_sentences(make_doc("p", "")).empty());
}

TEST_CASE("document without terminator is one sentence") {
  const auto sentences = segment_sentences(make_doc("p", "no terminator"));
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].text == "no terminator");
}

TEST_CASE("abbreviations and dotted continuations do not split") {
  const auto eg = segment_sentences(
      make_doc("p", "We collect data, e.g. your name, for service reasons."));
  CHECK(eg.size() == 1);
  const auto inc = segment_sentences(
      make_doc("p", "Contoso Labs Inc. collects data. More here."));
  REQUIRE(inc.size() == 2);
  CHECK(inc[0].text == "Contoso Labs Inc. collects data.");
}

TEST_CASE("semicolons, blank lines and bullets are boundaries") {
  CHECK(segment_sentences(
            make_doc("p", "We collect names; we store them safely."))
            .size() == 2);
  CHECK(segment_sentences(make_doc("p", "First line\n\nSecond line")).size() ==
        2);
  const auto bullets = segment_sentences(
      make_doc("p", "We collect:\n- your name\n- your email\nThat is all."));
  REQUIRE(bullets.size() == 4);
  CHECK(bullets[1].text == "- your name");
  CHECK(bullets[2].text == "- your email");
}

TEST_CASE("spans slice the raw text and indexes are gap-free") {
  const auto corpus = load_corpus(FIXTURE_DIR);
  REQUIRE(corpus.documents.size() == 10);
  for (const auto& doc : corpus.documents) {
    const auto sentences = segment_sentences(doc);
    int expected_index = 0;
    for (const auto& s : sentences) {
      CHECK(s.index == expected_index++);
      REQUIRE(s.span_end <= doc.raw_text.size());
      REQUIRE(s.span_begin <= s.span_end);
      CHECK(doc.raw_text.substr(s.span_begin, s.span_end - s.span_begin) ==
            s.text);
      CHECK_FALSE(s.text.empty());
      CHECK(s.text.find_first_not_of(" \t\r\n") != std::string::npos);
    }
  }
}

TEST_CASE("segmentation is deterministic") {
  const auto corpus = load_corpus(FIXTURE_DIR);
  for (const auto& doc : corpus.documents) {
    const auto a = segment_sentences(doc);
    const auto b = segment_sentences(doc);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].text == b[i].text);
      CHECK(a[i].span_begin == b[i].span_begin);
      CHECK(a[i].span_end == b[i].span_end);
    }
  }
}

TEST_CASE("kinect fixture matches its hand-counted sentence total") {
  std::ifstream golden(std::string(TEST_DATA_DIR) +
                       "/kinect_sentence_count.txt");
  REQUIRE(golden.good());
  int expected = 0;
  golden >> expected;
  const auto corpus = load_corpus(std::string(FIXTURE_DIR) +
                                  "/fixture_kinect.txt");
  REQUIRE(corpus.documents.size() == 1);
  CHECK(segment_sentences(corpus.documents[0]).size() ==
        static_cast<std::size_t>(expected));
}

TEST_CASE("corpus loads in filename order with manifest kinds") {
  TempDir dir("corpus");
  write_file(dir.path() / "b.txt", "Second policy text.");
  write_file(dir.path() / "a.txt", "First policy text.");
  write_file(dir.path() / "manifest.json",
             "{\"a\": \"iot\", \"b\": \"mobile\"}");
  const auto corpus = load_corpus(dir.path());
  REQUIRE(corpus.documents.size() == 2);
  CHECK(corpus.documents[0].id == "a");
  CHECK(corpus.documents[1].id == "b");
  CHECK(corpus.documents[0].source_kind == SourceKind::kIot);
  CHECK(corpus.documents[1].source_kind == SourceKind::kMobile);
  CHECK(corpus.issues.empty());
}

TEST_CASE("empty directory and empty files are non-fatal") {
  TempDir dir("empty");
  CHECK(load_corpus(dir.path()).documents.empty());
  write_file(dir.path() / "empty.txt", "");
  write_file(dir.path() / "real.txt", "Some text.");
  const auto corpus = load_corpus(dir.path());
  REQUIRE(corpus.documents.size() == 1);
  CHECK(corpus.documents[0].id == "real");
  REQUIRE(corpus.issues.size() == 1);
  CHECK(corpus.issues[0].path.find("empty.txt") != std::string::npos);
}

TEST_CASE("invalid utf-8 is replaced and reported") {
  TempDir dir("utf8");
  write_file(dir.path() / "bad.txt", std::string("We collect \xff data."));
  const auto corpus = load_corpus(dir.path());
  REQUIRE(corpus.documents.size() == 1);
  CHECK(corpus.documents[0].raw_text.find("\xEF\xBF\xBD") !=
        std::string::npos);
  CHECK(corpus.issues.size() == 1);
}

TEST_CASE("sentence records round-trip through jsonl") {
  SentenceRecord rec{"doc", 3, "We may collect \"quoted\" data.",
                     SentenceLabel::kSensitive};
  const auto line = sentence_record_to_jsonl(rec);
  const auto back = sentence_record_from_jsonl(line);
  CHECK(back.doc_id == rec.doc_id);
  CHECK(back.index == rec.index);
  CHECK(back.text == rec.text);
  REQUIRE(back.label.has_value());
  CHECK(*back.label == SentenceLabel::kSensitive);

  SentenceRecord unlabeled{"doc", 0, "Plain.", std::nullopt};
  CHECK_FALSE(sentence_record_from_jsonl(sentence_record_to_jsonl(unlabeled))
                  .label.has_value());
}

TEST_CASE("label and source kind strings round-trip") {
  CHECK(to_string(SentenceLabel::kSensitive) == "sensitive");
  CHECK(to_string(SentenceLabel::kNonSensitive) == "non_sensitive");
  CHECK(label_from_string("sensitive") == SentenceLabel::kSensitive);
  CHECK(label_from_string("non_sensitive") == SentenceLabel::kNonSensitive);
  CHECK(source_kind_from_string("iot") == SourceKind::kIot);
  CHECK(source_kind_from_string("mobile") == SourceKind::kMobile);
  CHECK(to_string(SourceKind::kUnknown) == "unknown");
}
