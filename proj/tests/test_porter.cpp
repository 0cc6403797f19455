#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "policylens/porter.hpp"

using policylens::porter_stem;

TEST_CASE("stemmer matches the published reference vectors") {
  // word<TAB>stem pairs covering the reference implementation's complete
  // test vocabulary (23,531 words).
  std::ifstream in(std::string(TEST_DATA_DIR) + "/porter_vectors.tsv");
  REQUIRE(in.good());
  std::string line;
  std::size_t checked = 0;
  std::vector<std::string> failures;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const std::string word = line.substr(0, tab);
    const std::string expected = line.substr(tab + 1);
    const std::string actual = porter_stem(word);
    if (actual != expected) {
      failures.push_back(word + " -> " + actual + " (want " + expected + ")");
    }
    ++checked;
  }
  CHECK(checked > 23000);
  if (!failures.empty()) {
    for (std::size_t i = 0; i < failures.size() && i < 25; ++i) {
      MESSAGE(failures[i]);
    }
  }
  CHECK(failures.empty());
}

TEST_CASE("stemming is deterministic") {
  // The algorithm is not idempotent (agre -> agr, abus -> abu); it is
  // applied to surface forms exactly once. What must hold is that repeated
  // calls on the same input give the same answer.
  std::ifstream in(std::string(TEST_DATA_DIR) + "/porter_vectors.tsv");
  REQUIRE(in.good());
  std::string line;
  std::size_t mismatches = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const std::string word = line.substr(0, tab);
    if (porter_stem(word) != porter_stem(word)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("short words pass through untouched") {
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("is") == "is");
  CHECK(porter_stem("") == "");
}

TEST_CASE("derivations of collect share one stem") {
  CHECK(porter_stem("collect") == "collect");
  CHECK(porter_stem("collected") == "collect");
  CHECK(porter_stem("collects") == "collect");
  CHECK(porter_stem("collecting") == "collect");
  CHECK(porter_stem("collection") == "collect");
}
