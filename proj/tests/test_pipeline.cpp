#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "policylens/errors.hpp"
#include "policylens/pipeline.hpp"
#include "support/helpers.hpp"

using namespace policylens;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

// Every regular file under root, keyed by its path relative to root.
std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files[fs::relative(entry.path(), root).generic_string()] =
        testing_support::read_file(entry.path().string());
  }
  return files;
}

// Blanks the value of the "timestamp" field so manifests from different
// moments can be compared byte for byte.
std::string null_timestamp(std::string text) {
  const auto key = text.find("\"timestamp\"");
  REQUIRE(key != std::string::npos);
  const auto open = text.find('"', text.find(':', key));
  const auto close = text.find('"', open + 1);
  REQUIRE(close != std::string::npos);
  text.replace(open, close - open + 1, "\"\"");
  return text;
}

}  // namespace

TEST_CASE("load_config parses a JSON file") {
  TempDir tmp("cfg_json");
  const std::string path = (tmp.path() / "config.json").string();
  testing_support::write_file(path, R"({
    "input_dir": "corpus",
    "classifier": "svm",
    "top_k": 120,
    "seed": 9,
    "assign_threshold": 0.4,
    "emit_cv": false
  })");

  const PipelineConfig config = load_config(path);
  CHECK(config.input_dir == "corpus");
  CHECK(config.classifier == "svm");
  CHECK(config.top_k == 120);
  CHECK(config.seed == 9);
  CHECK(config.assign_threshold == doctest::Approx(0.4));
  CHECK_FALSE(config.emit_cv);
  // untouched keys keep their defaults
  CHECK(config.out_dir.empty());
  CHECK(config.folds == 5);
  CHECK(config.lda_iterations == 500);
  CHECK(config.min_policy_df == 4);
}

TEST_CASE("load_config parses the flat TOML subset") {
  TempDir tmp("cfg_toml");
  const std::string path = (tmp.path() / "config.toml").string();
  testing_support::write_file(path,
                              "# pipeline settings\n"
                              "input_dir = \"my corpus\"\n"
                              "out_dir = \"run # one\"\n"
                              "classifier = \"knn\"  # inline comment\n"
                              "stopword_path = \"a\\tb\\\"c\\\"\"\n"
                              "top_k = 42   # trailing comment\n"
                              "assign_threshold = 0.5\n"
                              "lda_iterations = 25\n"
                              "emit_cv = false\n"
                              "\n"
                              "seed = 7\n");

  const PipelineConfig config = load_config(path);
  CHECK(config.input_dir == "my corpus");
  CHECK(config.out_dir == "run # one");
  CHECK(config.classifier == "knn");
  CHECK(config.stopword_path == "a\tb\"c\"");
  CHECK(config.top_k == 42);
  CHECK(config.assign_threshold == doctest::Approx(0.5));
  CHECK(config.lda_iterations == 25);
  CHECK_FALSE(config.emit_cv);
  CHECK(config.seed == 7);
}

TEST_CASE("load_config rejects malformed or unknown input") {
  TempDir tmp("cfg_bad");
  const auto write_config = [&](const std::string& text) {
    const std::string path = (tmp.path() / "c.toml").string();
    testing_support::write_file(path, text);
    return path;
  };

  CHECK_THROWS_AS(load_config((tmp.path() / "absent.toml").string()),
                  DataError);
  CHECK_THROWS_AS(load_config(write_config("[pipeline]\ntop_k = 3\n")),
                  UsageError);
  CHECK_THROWS_AS(load_config(write_config("mystery_key = 3\n")), UsageError);
  CHECK_THROWS_AS(load_config(write_config("top_k\n")), UsageError);
  CHECK_THROWS_AS(load_config(write_config("top_k = banana\n")), UsageError);
  CHECK_THROWS_AS(load_config(write_config("classifier = \"a\\qb\"\n")),
                  UsageError);
  CHECK_THROWS_AS(load_config(write_config("{\"top_k\": \"many\"}")),
                  UsageError);
  CHECK_THROWS_AS(load_config(write_config("{\"nope\": 1}")), UsageError);
  CHECK_THROWS_AS(load_config(write_config("{\"top_k\": 3")), DataError);
}

TEST_CASE("run_pipeline writes the full artifact tree") {
  TempDir tmp("pipe_tree");
  PipelineConfig config;
  config.input_dir = FIXTURE_DIR;
  config.out_dir = (tmp.path() / "out").string();
  REQUIRE(run_pipeline(config) == 0);

  const fs::path out = config.out_dir;
  for (const char* name :
       {"sentences.jsonl", "stems.jsonl", "freq.csv", "vocab.txt",
        "dataset.csv", "model.json", "cv_report.json", "predictions.jsonl",
        "topic_model.json", "assignments.jsonl", "distribution.csv",
        "distribution_by_policy.csv", "run.json"}) {
    CAPTURE(name);
    CHECK(fs::is_regular_file(out / name));
  }
  for (const char* dir : {"shortened", "reports", "graphs"}) {
    CAPTURE(dir);
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(out / dir)) {
      CHECK(entry.is_regular_file());
      ++count;
    }
    CHECK(count == 10);
  }

  const nlohmann::json manifest = read_json(out / "run.json");
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["failure_stage"].is_null());
  CHECK(manifest["error"].is_null());
  CHECK(manifest["documents"] == 10);
  CHECK(manifest["sentences"] == 295);
  CHECK(manifest["shortened"].size() == 10);
  const std::vector<std::string> stages = manifest["stages"];
  CHECK(stages == std::vector<std::string>{"ingest", "preprocess", "vectorize",
                                           "train", "predict", "shorten",
                                           "topics", "report"});
  // every shortened entry balances its own counts
  for (const auto& entry : manifest["shortened"]) {
    const int original = entry["original_sentences"];
    CHECK(entry["kept_sentences"].get<int>() +
              entry["removed_count"].get<int>() ==
          original);
  }

  // defaults reproduce the frozen report and graph for the pinned policy
  const std::string golden_html = testing_support::read_file(
      std::string(TEST_DATA_DIR) + "/smarthome_report_golden.html");
  const std::string golden_dot = testing_support::read_file(
      std::string(TEST_DATA_DIR) + "/smarthome_graph_golden.dot");
  CHECK(testing_support::read_file(
            (out / "reports" / "fixture_smarthome.html").string()) ==
        golden_html);
  CHECK(testing_support::read_file(
            (out / "graphs" / "fixture_smarthome.dot").string()) ==
        golden_dot);
}

TEST_CASE("run_pipeline reports the failing stage in the manifest") {
  TempDir tmp("pipe_fail");
  PipelineConfig config;
  config.input_dir = FIXTURE_DIR;
  config.out_dir = (tmp.path() / "out").string();
  config.model_path = (tmp.path() / "missing_model.json").string();
  CHECK(run_pipeline(config) == 4);

  const nlohmann::json manifest = read_json(fs::path(config.out_dir) / "run.json");
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["failure_stage"] == "predict");
  CHECK_FALSE(manifest["error"].is_null());
}

TEST_CASE("run_pipeline is deterministic across repeat runs") {
  TempDir tmp("pipe_det");
  PipelineConfig config;
  config.input_dir = FIXTURE_DIR;
  config.out_dir = (tmp.path() / "out").string();

  REQUIRE(run_pipeline(config) == 0);
  const fs::path copy = tmp.path() / "first";
  fs::copy(config.out_dir, copy, fs::copy_options::recursive);
  REQUIRE(run_pipeline(config) == 0);

  const auto first = read_tree(copy);
  const auto second = read_tree(config.out_dir);
  REQUIRE(first.size() == second.size());
  for (const auto& [name, content] : first) {
    CAPTURE(name);
    REQUIRE(second.count(name) == 1);
    if (name == "run.json") {
      CHECK(null_timestamp(content) == null_timestamp(second.at(name)));
    } else {
      CHECK(content == second.at(name));
    }
  }
}
