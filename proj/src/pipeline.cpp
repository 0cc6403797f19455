#include "policylens/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "policylens/classify.hpp"
#include "policylens/condense.hpp"
#include "policylens/errors.hpp"
#include "policylens/evaluate.hpp"
#include "policylens/hash.hpp"
#include "policylens/report.hpp"
#include "policylens/topics.hpp"
#include "policylens/version.hpp"

namespace policylens {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void apply_config_value(PipelineConfig& config, const std::string& key,
                        const nlohmann::json& value) {
  try {
    if (key == "input_dir") {
      config.input_dir = value.get<std::string>();
    } else if (key == "out_dir") {
      config.out_dir = value.get<std::string>();
    } else if (key == "model_path") {
      config.model_path = value.get<std::string>();
    } else if (key == "classifier") {
      config.classifier = value.get<std::string>();
    } else if (key == "stopword_path") {
      config.stopword_path = value.get<std::string>();
    } else if (key == "top_k") {
      config.top_k = value.get<int>();
    } else if (key == "folds") {
      config.folds = value.get<int>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else if (key == "assign_threshold") {
      config.assign_threshold = value.get<double>();
    } else if (key == "lda_iterations") {
      config.lda_iterations = value.get<int>();
    } else if (key == "min_policy_df") {
      config.min_policy_df = value.get<int>();
    } else if (key == "emit_cv") {
      config.emit_cv = value.get<bool>();
    } else {
      throw UsageError("unknown config key: " + key);
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("bad value for config key: " + key);
  }
}

nlohmann::json parse_toml_value(const std::string& raw, const std::string& key) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    std::string value;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) {
        ++i;
        switch (raw[i]) {
          case 'n':
            value += '\n';
            break;
          case 't':
            value += '\t';
            break;
          case '"':
            value += '"';
            break;
          case '\\':
            value += '\\';
            break;
          default:
            throw UsageError("unsupported escape in config value for " + key);
        }
      } else {
        value += raw[i];
      }
    }
    return value;
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  try {
    if (raw.find_first_of(".eE") != std::string::npos) {
      std::size_t used = 0;
      const double d = std::stod(raw, &used);
      if (used != raw.size()) throw UsageError("");
      return d;
    }
    std::size_t used = 0;
    const long long v = std::stoll(raw, &used);
    if (used != raw.size()) throw UsageError("");
    return v;
  } catch (const std::exception&) {
    throw UsageError("unparsable config value for " + key + ": " + raw);
  }
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct PipelineState {
  LoadResult corpus;
  std::map<std::string, std::vector<Sentence>> sentences;       // by doc
  std::map<std::string, std::vector<TokenizedSentence>> stems;  // by doc
  std::map<std::pair<std::string, int>, SentenceLabel> gold;
  Vocabulary vocabulary;
  Dataset dataset;
  bool labeled = false;
  ModelFile model;
  bool model_ready = false;
  std::map<std::pair<std::string, int>, Prediction> predictions;
  std::vector<ShortenedPolicy> shortened;
  TopicModel topic_model;
  std::map<std::pair<std::string, int>, TopicAssignment> assignments;
};

}  // namespace

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  PipelineConfig config;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
      throw DataError(std::string("bad JSON config: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      apply_config_value(config, key, value);
    }
    return config;
  }

  // Flat TOML subset: `key = value` lines, # comments, quoted strings,
  // integers, floats and booleans.
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      // keep # inside quoted strings
      const auto quote_open = line.find('"');
      if (quote_open == std::string::npos || hash < quote_open) {
        line.erase(hash);
      } else {
        const auto quote_close = line.find('"', quote_open + 1);
        if (quote_close != std::string::npos && hash > quote_close) {
          line.erase(hash);
        }
      }
    }
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    if (stripped.front() == '[') {
      throw UsageError("config sections are not supported (line " +
                       std::to_string(line_no) + ")");
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError("expected key = value at config line " +
                       std::to_string(line_no));
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string raw = trim(stripped.substr(eq + 1));
    if (key.empty() || raw.empty()) {
      throw UsageError("expected key = value at config line " +
                       std::to_string(line_no));
    }
    apply_config_value(config, key, parse_toml_value(raw, key));
  }
  return config;
}

int run_pipeline(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  const fs::path out_dir = config.out_dir.empty() ? "out" : config.out_dir;
  fs::create_directories(out_dir);

  std::map<std::string, std::string> artifacts;  // relative path -> hash
  const auto write_artifact = [&](const fs::path& rel, const std::string& bytes) {
    const fs::path full = out_dir / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    if (!out) throw DataError("cannot write " + full.string());
    out << bytes;
    artifacts[rel.generic_string()] = to_hex(fnv1a64(bytes));
  };

  PipelineState st;
  std::vector<std::string> completed;
  const StopwordList* stoplist = &StopwordList::builtin();
  StopwordList file_stoplist = StopwordList::builtin();
  if (!config.stopword_path.empty()) {
    file_stoplist = StopwordList::load(config.stopword_path);
    stoplist = &file_stoplist;
  }

  const auto write_manifest = [&](const std::string& status,
                                  const std::string& failure_stage,
                                  const std::string& error) {
    ordered_json j;
    j["format"] = "policylens-run";
    j["version"] = kVersion;
    j["status"] = status;
    j["failure_stage"] = failure_stage.empty() ? ordered_json(nullptr)
                                               : ordered_json(failure_stage);
    j["error"] = error.empty() ? ordered_json(nullptr) : ordered_json(error);
    j["timestamp"] = iso_timestamp();  // the only nondeterministic field
    j["seed"] = config.seed;
    ordered_json cfg;
    cfg["input_dir"] = config.input_dir;
    cfg["out_dir"] = config.out_dir;
    cfg["model_path"] = config.model_path;
    cfg["classifier"] = config.classifier;
    cfg["top_k"] = config.top_k;
    cfg["folds"] = config.folds;
    cfg["assign_threshold"] = config.assign_threshold;
    cfg["lda_iterations"] = config.lda_iterations;
    cfg["min_policy_df"] = config.min_policy_df;
    cfg["emit_cv"] = config.emit_cv;
    j["config"] = std::move(cfg);
    j["stopwords"] = stoplist->version();
    j["vocab_hash"] = st.vocabulary.empty() && st.model_ready
                          ? st.model.vocabulary.content_hash()
                          : st.vocabulary.content_hash();
    j["documents"] = st.corpus.documents.size();
    std::size_t sentence_count = 0;
    for (const auto& [doc, list] : st.sentences) sentence_count += list.size();
    j["sentences"] = sentence_count;
    ordered_json issues = ordered_json::array();
    for (const auto& issue : st.corpus.issues) {
      ordered_json ij;
      ij["path"] = issue.path;
      ij["message"] = issue.message;
      issues.push_back(std::move(ij));
    }
    j["issues"] = std::move(issues);
    j["stages"] = completed;
    ordered_json shortened = ordered_json::array();
    for (const auto& sp : st.shortened) {
      ordered_json sj;
      sj["doc_id"] = sp.doc_id;
      sj["original_sentences"] = sp.original_sentences;
      sj["kept_sentences"] = static_cast<int>(sp.kept.size());
      sj["removed_count"] = sp.removed_count;
      sj["sentence_reduction_ratio"] = sp.sentence_reduction_ratio;
      sj["original_words"] = sp.original_words;
      sj["kept_words"] = sp.kept_words;
      shortened.push_back(std::move(sj));
    }
    j["shortened"] = std::move(shortened);
    ordered_json files;
    for (const auto& [rel, hash] : artifacts) files[rel] = hash;
    j["artifacts"] = std::move(files);

    const fs::path manifest = out_dir / "run.json";
    std::ofstream out(manifest, std::ios::binary);
    out << j.dump(2) << "\n";
  };

  const auto stage_ingest = [&] {
    st.corpus = load_corpus(config.input_dir);
    // gold labels sidecar, one sentence record per line
    const fs::path labels = fs::path(config.input_dir) / "labels.jsonl";
    if (fs::exists(labels)) {
      std::ifstream in(labels);
      std::string line;
      while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const SentenceRecord rec = sentence_record_from_jsonl(line);
        if (rec.label) st.gold[{rec.doc_id, rec.index}] = *rec.label;
      }
    }
    std::string jsonl;
    for (const auto& doc : st.corpus.documents) {
      auto sentences = segment_sentences(doc);
      for (const auto& s : sentences) {
        SentenceRecord rec{s.doc_id, s.index, s.text, std::nullopt};
        const auto it = st.gold.find({s.doc_id, s.index});
        if (it != st.gold.end()) rec.label = it->second;
        jsonl += sentence_record_to_jsonl(rec);
        jsonl += '\n';
      }
      st.sentences[doc.id] = std::move(sentences);
    }
    write_artifact("sentences.jsonl", jsonl);
  };

  const auto stage_preprocess = [&] {
    std::string jsonl;
    std::vector<TokenizedSentence> all;
    for (const auto& doc : st.corpus.documents) {
      std::vector<TokenizedSentence> doc_stems;
      for (const auto& s : st.sentences[doc.id]) {
        TokenizedSentence ts = preprocess_sentence(s, *stoplist);
        const auto it = st.gold.find({s.doc_id, s.index});
        if (it != st.gold.end()) ts.label = it->second;
        jsonl += tokenized_to_jsonl(ts);
        jsonl += '\n';
        all.push_back(ts);
        doc_stems.push_back(std::move(ts));
      }
      st.stems[doc.id] = std::move(doc_stems);
    }
    write_artifact("stems.jsonl", jsonl);
    write_artifact("freq.csv", frequency_to_csv(term_frequency(all)));
  };

  const auto stage_vectorize = [&] {
    std::vector<TokenizedSentence> all;
    for (const auto& doc : st.corpus.documents) {
      const auto& list = st.stems[doc.id];
      all.insert(all.end(), list.begin(), list.end());
    }
    st.vocabulary = build_vocabulary(term_frequency(all), config.top_k);
    std::string vocab_text;
    for (const auto& stem : st.vocabulary.stems) {
      vocab_text += stem;
      vocab_text += '\n';
    }
    write_artifact("vocab.txt", vocab_text);

    st.labeled = !all.empty();
    for (const auto& ts : all) {
      if (!ts.label) {
        st.labeled = false;
        break;
      }
    }
    if (st.labeled) {
      st.dataset = build_dataset(all, st.vocabulary);
      std::ostringstream csv;
      csv << "doc_id,sentence_index,label,features\n";
      for (const auto& row : st.dataset.rows) {
        csv << row.doc_id << ',' << row.sentence_index << ','
            << to_string(row.label) << ',';
        bool first = true;
        for (const auto& [pos, count] : row.x.entries) {
          if (!first) csv << ';';
          csv << pos << ':' << count;
          first = false;
        }
        csv << '\n';
      }
      write_artifact("dataset.csv", csv.str());
    }
  };

  const auto stage_train = [&] {
    if (!config.model_path.empty()) return;  // model supplied, nothing to fit
    if (!st.labeled) {
      throw DataError("training requires a fully labeled corpus");
    }
    ClassifierSpec spec;
    const auto kind = classifier_kind_from_string(config.classifier);
    if (kind == ClassifierKind::kNaiveBayes) {
      spec = ClassifierSpec::naive_bayes();
    } else if (kind == ClassifierKind::kKnn) {
      spec = ClassifierSpec::knn();
    } else {
      spec = ClassifierSpec::svm(1e-4, 20, config.seed);
    }
    st.model.vocabulary = st.vocabulary;
    st.model.model = train(spec, st.dataset);
    st.model_ready = true;
    write_artifact("model.json", model_file_to_json(st.model));
    if (config.emit_cv) {
      const CVReport report =
          cross_validate(spec, st.dataset, config.folds, config.seed);
      write_artifact("cv_report.json", cv_report_to_json(report));
    }
  };

  const auto stage_predict = [&] {
    if (!config.model_path.empty()) {
      st.model = load_model(config.model_path);
      st.model_ready = true;
    }
    if (!st.model_ready) throw DataError("no model available");
    std::string jsonl;
    for (const auto& doc : st.corpus.documents) {
      for (const auto& ts : st.stems[doc.id]) {
        const FeatureVector x = vectorize(ts, st.model.vocabulary);
        const Prediction pred = predict(st.model.model, x);
        st.predictions[{ts.doc_id, ts.sentence_index}] = pred;
        ordered_json j;
        j["doc_id"] = ts.doc_id;
        j["sentence_index"] = ts.sentence_index;
        j["label"] = to_string(pred.label);
        j["score"] = pred.score;
        jsonl += j.dump();
        jsonl += '\n';
      }
    }
    write_artifact("predictions.jsonl", jsonl);
  };

  const auto stage_shorten = [&] {
    for (const auto& doc : st.corpus.documents) {
      const auto& sentences = st.sentences[doc.id];
      std::vector<SentenceLabel> predicted;
      predicted.reserve(sentences.size());
      for (const auto& s : sentences) {
        predicted.push_back(st.predictions.at({s.doc_id, s.index}).label);
      }
      ShortenedPolicy sp = apply_shortening(doc, sentences, predicted);
      write_artifact(fs::path("shortened") / (doc.id + ".txt"),
                     shortened_text(sp, doc));
      st.shortened.push_back(std::move(sp));
    }
  };

  const auto stage_topics = [&] {
    std::vector<TokenizedSentence> sensitive;
    for (const auto& doc : st.corpus.documents) {
      for (const auto& ts : st.stems[doc.id]) {
        if (st.predictions.at({ts.doc_id, ts.sentence_index}).label ==
            SentenceLabel::kSensitive) {
          sensitive.push_back(ts);
        }
      }
    }
    const auto& topics = default_topics();
    const auto filtered =
        filter_rare_terms(sensitive, topics, config.min_policy_df);
    TopicModelParams params;
    params.iterations = config.lda_iterations;
    params.min_policy_df = config.min_policy_df;
    params.seed = config.seed;
    st.topic_model = fit_labeled_lda(filtered, topics, params);
    write_artifact("topic_model.json", topic_model_to_json(st.topic_model));

    std::string jsonl;
    std::vector<TopicAssignment> all;
    for (const auto& ts : filtered) {
      TopicAssignment a =
          assign_topics(st.topic_model, ts, config.assign_threshold);
      jsonl += assignment_to_jsonl(a, topics);
      jsonl += '\n';
      st.assignments[{a.doc_id, a.sentence_index}] = a;
      all.push_back(std::move(a));
    }
    write_artifact("assignments.jsonl", jsonl);
    write_artifact("distribution.csv",
                   distribution_to_csv(topic_distribution(all, topics)));
    write_artifact(
        "distribution_by_policy.csv",
        distribution_to_csv(topic_distribution_by_policy(all, topics)));
  };

  const auto stage_report = [&] {
    const auto& topics = default_topics();
    for (const auto& doc : st.corpus.documents) {
      AnnotatedPolicy ap;
      ap.doc = doc;
      const auto& sentences = st.sentences[doc.id];
      const auto& stems = st.stems[doc.id];
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        AnnotatedSentence as;
        as.sentence = sentences[i];
        as.stems = stems[i].stems;
        as.prediction = st.predictions.at({doc.id, sentences[i].index}).label;
        if (as.prediction == SentenceLabel::kSensitive) {
          const auto it = st.assignments.find({doc.id, sentences[i].index});
          if (it != st.assignments.end()) {
            as.topics = it->second;
          } else {
            // stems all filtered away: fall back through assign_topics
            TokenizedSentence empty;
            empty.doc_id = doc.id;
            empty.sentence_index = sentences[i].index;
            as.topics = assign_topics(st.topic_model, empty,
                                      config.assign_threshold);
          }
        }
        ap.sentences.push_back(std::move(as));
      }
      write_artifact(fs::path("reports") / (doc.id + ".html"),
                     emit_highlight_html(ap, topics));
      write_artifact(fs::path("graphs") / (doc.id + ".dot"),
                     emit_graph_dot(ap, st.topic_model));
    }
  };

  const std::vector<std::pair<std::string, std::function<void()>>> stages = {
      {"ingest", stage_ingest},       {"preprocess", stage_preprocess},
      {"vectorize", stage_vectorize}, {"train", stage_train},
      {"predict", stage_predict},     {"shorten", stage_shorten},
      {"topics", stage_topics},       {"report", stage_report}};

  for (const auto& [name, stage] : stages) {
    try {
      stage();
      completed.push_back(name);
    } catch (const std::exception& e) {
      write_manifest("failed", name, e.what());
      return 4;
    }
  }
  write_manifest("ok", "", "");
  return 0;
}

}  // namespace policylens
