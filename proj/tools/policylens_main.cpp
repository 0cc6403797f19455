// policylens: privacy policy sentence classification, shortening and
// data-practice topic tagging.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "policylens/classify.hpp"
#include "policylens/condense.hpp"
#include "policylens/corpus.hpp"
#include "policylens/errors.hpp"
#include "policylens/evaluate.hpp"
#include "policylens/features.hpp"
#include "policylens/pipeline.hpp"
#include "policylens/preprocess.hpp"
#include "policylens/report.hpp"
#include "policylens/stopwords.hpp"
#include "policylens/topics.hpp"
#include "policylens/version.hpp"

namespace fs = std::filesystem;
using namespace policylens;

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << bytes;
}

std::vector<SentenceRecord> load_sentence_records(const fs::path& path) {
  std::vector<SentenceRecord> records;
  for (const auto& line : read_lines(path)) {
    records.push_back(sentence_record_from_jsonl(line));
  }
  return records;
}

std::vector<TokenizedSentence> load_stems(const fs::path& path) {
  std::vector<TokenizedSentence> sentences;
  for (const auto& line : read_lines(path)) {
    sentences.push_back(tokenized_from_jsonl(line));
  }
  return sentences;
}

StopwordList resolve_stoplist(const std::string& path) {
  return path.empty() ? StopwordList::builtin() : StopwordList::load(path);
}

// Gold labels sidecar: labels.jsonl next to the policy files.
std::map<std::pair<std::string, int>, SentenceLabel> load_gold(
    const fs::path& corpus_path) {
  std::map<std::pair<std::string, int>, SentenceLabel> gold;
  const fs::path sidecar =
      fs::is_directory(corpus_path) ? corpus_path / "labels.jsonl" : fs::path();
  if (sidecar.empty() || !fs::exists(sidecar)) return gold;
  for (const auto& line : read_lines(sidecar)) {
    const SentenceRecord rec = sentence_record_from_jsonl(line);
    if (rec.label) gold[{rec.doc_id, rec.index}] = *rec.label;
  }
  return gold;
}

ClassifierSpec make_spec(const std::string& name, std::uint64_t seed) {
  const ClassifierKind kind = classifier_kind_from_string(name);
  if (kind == ClassifierKind::kNaiveBayes) return ClassifierSpec::naive_bayes();
  if (kind == ClassifierKind::kKnn) return ClassifierSpec::knn();
  return ClassifierSpec::svm(1e-4, 20, seed);
}

Dataset dataset_from_stems(const std::vector<TokenizedSentence>& stems,
                           int top_k) {
  const Vocabulary vocab = build_vocabulary(term_frequency(stems), top_k);
  return build_dataset(stems, vocab);
}

std::string metrics_line(const Metrics& m) {
  const auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  return "precision " + fmt(m.precision) + "  recall " + fmt(m.recall) +
         "  tnr " + fmt(m.true_negative_rate) + "  accuracy " +
         fmt(m.accuracy) + "  f1 " + fmt(m.f1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy policy analyzer: classify, shorten, tag data practices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string config_path;
  auto* seed_opt = app.add_option("--seed", seed, "rng seed");
  auto* out_opt = app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--config", config_path, "pipeline config file (json or toml)");

  // ingest
  std::string ingest_in;
  auto* ingest = app.add_subcommand("ingest", "load policies, split sentences");
  ingest->add_option("--in", ingest_in, "corpus directory or policy file")
      ->required();

  // preprocess
  std::string pre_in, pre_stopwords;
  auto* preprocess =
      app.add_subcommand("preprocess", "tokenize, drop stop words, stem");
  preprocess->add_option("--in", pre_in, "sentences.jsonl")->required();
  preprocess->add_option("--stopwords", pre_stopwords, "stop word file");

  // train
  std::string train_in, train_classifier = "nb";
  int train_top_k = 500;
  auto* train_cmd = app.add_subcommand("train", "fit a sentence classifier");
  train_cmd->add_option("--in", train_in, "labeled stems.jsonl")->required();
  train_cmd->add_option("--classifier", train_classifier, "nb | knn | svm");
  train_cmd->add_option("--top-k", train_top_k, "vocabulary size");

  // eval
  std::string eval_in, eval_classifier = "nb";
  int eval_top_k = 500, eval_folds = 5;
  auto* eval_cmd = app.add_subcommand("eval", "stratified cross-validation");
  eval_cmd->add_option("--in", eval_in, "labeled stems.jsonl")->required();
  eval_cmd->add_option("--classifier", eval_classifier, "nb | knn | svm");
  eval_cmd->add_option("--top-k", eval_top_k, "vocabulary size");
  eval_cmd->add_option("--folds", eval_folds, "fold count");

  // predict
  std::string predict_model, predict_in;
  auto* predict_cmd = app.add_subcommand("predict", "label sentences");
  predict_cmd->add_option("--model", predict_model, "model.json")->required();
  predict_cmd->add_option("--in", predict_in, "stems.jsonl")->required();

  // shorten
  std::string shorten_model, shorten_vocab, shorten_in, shorten_out,
      shorten_stats, shorten_stopwords;
  auto* shorten_cmd =
      app.add_subcommand("shorten", "drop sentences predicted non-sensitive");
  shorten_cmd->add_option("--model", shorten_model, "model.json")->required();
  shorten_cmd->add_option("--vocab", shorten_vocab,
                          "vocab.txt (defaults to the model's)");
  shorten_cmd->add_option("--in", shorten_in, "policy text file")->required();
  shorten_cmd->add_option("--out", shorten_out, "shortened policy path")
      ->required();
  shorten_cmd->add_option("--stats", shorten_stats, "stats json path");
  shorten_cmd->add_option("--stopwords", shorten_stopwords, "stop word file");

  // topics fit | assign | dist
  auto* topics_cmd = app.add_subcommand("topics", "data practice topic model");
  topics_cmd->require_subcommand(1);

  std::string tfit_in, tfit_out;
  TopicModelParams tfit_params;
  auto* tfit = topics_cmd->add_subcommand("fit", "fit the seeded topic model");
  tfit->add_option("--in", tfit_in, "stems.jsonl")->required();
  tfit->add_option("--out", tfit_out, "model path (default topic_model.json)");
  tfit->add_option("--iterations", tfit_params.iterations, "gibbs sweeps");
  tfit->add_option("--min-policy-df", tfit_params.min_policy_df,
                   "per-policy document frequency floor");
  tfit->add_option("--alpha", tfit_params.alpha, "document-topic prior");
  tfit->add_option("--beta", tfit_params.beta, "topic-word prior");
  tfit->add_option("--boost", tfit_params.seed_boost, "seed stem prior boost");

  std::string tassign_model, tassign_in, tassign_out;
  double tassign_threshold = 0.25;
  auto* tassign = topics_cmd->add_subcommand("assign", "tag sentences");
  tassign->add_option("--model", tassign_model, "topic_model.json")->required();
  tassign->add_option("--in", tassign_in, "stems.jsonl")->required();
  tassign->add_option("--out", tassign_out,
                      "assignments path (default assignments.jsonl)");
  tassign->add_option("--threshold", tassign_threshold, "multi-topic cutoff");

  std::string tdist_in, tdist_out, tdist_by = "sentence";
  auto* tdist = topics_cmd->add_subcommand("dist", "topic distribution");
  tdist->add_option("--in", tdist_in, "assignments.jsonl")->required();
  tdist->add_option("--out", tdist_out,
                    "csv path (default distribution.csv)");
  tdist->add_option("--by", tdist_by, "sentence | policy")
      ->check(CLI::IsMember({"sentence", "policy"}));

  // report
  std::string report_corpus, report_artifacts;
  auto* report_cmd =
      app.add_subcommand("report", "emit highlight html and practice graphs");
  report_cmd->add_option("--corpus", report_corpus, "corpus directory")
      ->required();
  report_cmd
      ->add_option("--artifacts", report_artifacts,
                   "directory with stems/predictions/assignments/topic model")
      ->required();

  // run
  std::string run_input, run_classifier, run_model;
  auto* run_cmd = app.add_subcommand("run", "full pipeline");
  run_cmd->add_option("--input-dir", run_input, "corpus directory");
  run_cmd->add_option("--classifier", run_classifier, "nb | knn | svm");
  run_cmd->add_option("--model", run_model, "reuse an existing model.json");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  topics_cmd->require_subcommand(1);
  for (auto* sub : topics_cmd->get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const fs::path out(out_dir);
  try {
    if (*ingest) {
      const LoadResult corpus = load_corpus(ingest_in);
      const auto gold = load_gold(ingest_in);
      std::string jsonl;
      std::size_t count = 0;
      for (const auto& doc : corpus.documents) {
        for (const auto& s : segment_sentences(doc)) {
          SentenceRecord rec{s.doc_id, s.index, s.text, std::nullopt};
          const auto it = gold.find({s.doc_id, s.index});
          if (it != gold.end()) rec.label = it->second;
          jsonl += sentence_record_to_jsonl(rec);
          jsonl += '\n';
          ++count;
        }
      }
      write_file(out / "sentences.jsonl", jsonl);
      for (const auto& issue : corpus.issues) {
        std::cerr << "warning: " << issue.path << ": " << issue.message << "\n";
      }
      std::cout << corpus.documents.size() << " documents, " << count
                << " sentences -> " << (out / "sentences.jsonl").string()
                << "\n";
    } else if (*preprocess) {
      const StopwordList stoplist = resolve_stoplist(pre_stopwords);
      std::vector<TokenizedSentence> all;
      std::string jsonl;
      for (const auto& rec : load_sentence_records(pre_in)) {
        Sentence s;
        s.doc_id = rec.doc_id;
        s.index = rec.index;
        s.text = rec.text;
        TokenizedSentence ts = preprocess_sentence(s, stoplist);
        ts.label = rec.label;
        jsonl += tokenized_to_jsonl(ts);
        jsonl += '\n';
        all.push_back(std::move(ts));
      }
      write_file(out / "stems.jsonl", jsonl);
      write_file(out / "freq.csv", frequency_to_csv(term_frequency(all)));
      std::cout << all.size() << " sentences -> " << (out / "stems.jsonl").string()
                << ", " << (out / "freq.csv").string() << "\n";
    } else if (*train_cmd) {
      const auto stems = load_stems(train_in);
      const Dataset data = dataset_from_stems(stems, train_top_k);
      ModelFile mf;
      mf.vocabulary = data.vocabulary;
      mf.model = train(make_spec(train_classifier, seed), data);
      save_model(mf, out / "model.json");
      save_vocabulary(data.vocabulary, out / "vocab.txt");
      std::cout << to_string(model_kind(mf.model)) << " model on "
                << data.rows.size() << " sentences -> "
                << (out / "model.json").string() << "\n";
    } else if (*eval_cmd) {
      const auto stems = load_stems(eval_in);
      const Dataset data = dataset_from_stems(stems, eval_top_k);
      const CVReport report = cross_validate(make_spec(eval_classifier, seed),
                                             data, eval_folds, seed);
      write_file(out / "cv_report.json", cv_report_to_json(report));
      std::cout << eval_folds << "-fold cv (" << eval_classifier
                << "): " << metrics_line(report.aggregate) << "\n"
                << "report -> " << (out / "cv_report.json").string() << "\n";
    } else if (*predict_cmd) {
      const ModelFile mf = load_model(predict_model);
      std::string jsonl;
      for (const auto& ts : load_stems(predict_in)) {
        const Prediction pred = predict(mf.model, vectorize(ts, mf.vocabulary));
        nlohmann::ordered_json j;
        j["doc_id"] = ts.doc_id;
        j["sentence_index"] = ts.sentence_index;
        j["label"] = to_string(pred.label);
        j["score"] = pred.score;
        jsonl += j.dump();
        jsonl += '\n';
      }
      write_file(out / "predictions.jsonl", jsonl);
      std::cout << "predictions -> " << (out / "predictions.jsonl").string()
                << "\n";
    } else if (*shorten_cmd) {
      const ModelFile mf = load_model(shorten_model);
      const Vocabulary vocab = shorten_vocab.empty()
                                   ? mf.vocabulary
                                   : load_vocabulary(shorten_vocab);
      const StopwordList stoplist = resolve_stoplist(shorten_stopwords);
      const LoadResult corpus = load_corpus(shorten_in);
      if (corpus.documents.empty()) {
        throw DataError("no readable policy at " + shorten_in);
      }
      const ShortenedPolicy sp =
          shorten(corpus.documents.front(), mf, vocab, stoplist);
      write_file(shorten_out, shortened_text(sp, corpus.documents.front()));
      if (!shorten_stats.empty()) {
        write_file(shorten_stats, shortened_stats_json(sp));
      }
      std::cout << sp.doc_id << ": kept " << sp.kept.size() << "/"
                << sp.original_sentences << " sentences, words "
                << sp.original_words << " -> " << sp.kept_words << "\n";
    } else if (*tfit) {
      auto stems = load_stems(tfit_in);
      // Fit on the sensitive part when labels are present.
      bool any_label = false;
      for (const auto& ts : stems) any_label = any_label || ts.label.has_value();
      if (any_label) {
        std::vector<TokenizedSentence> sensitive;
        for (auto& ts : stems) {
          if (ts.label && *ts.label == SentenceLabel::kSensitive) {
            sensitive.push_back(std::move(ts));
          }
        }
        stems = std::move(sensitive);
      }
      tfit_params.seed = seed;
      const auto& topics = default_topics();
      const auto filtered =
          filter_rare_terms(stems, topics, tfit_params.min_policy_df);
      const TopicModel model = fit_labeled_lda(filtered, topics, tfit_params);
      const fs::path path =
          tfit_out.empty() ? out / "topic_model.json" : fs::path(tfit_out);
      save_topic_model(model, path);
      std::cout << "topic model on " << filtered.size() << " sentences, "
                << model.terms.size() << " terms -> " << path.string() << "\n";
    } else if (*tassign) {
      const TopicModel model = load_topic_model(tassign_model);
      std::string jsonl;
      std::size_t count = 0;
      for (const auto& ts : load_stems(tassign_in)) {
        jsonl += assignment_to_jsonl(
            assign_topics(model, ts, tassign_threshold), model.topics);
        jsonl += '\n';
        ++count;
      }
      const fs::path path =
          tassign_out.empty() ? out / "assignments.jsonl" : fs::path(tassign_out);
      write_file(path, jsonl);
      std::cout << count << " assignments -> " << path.string() << "\n";
    } else if (*tdist) {
      const auto& topics = default_topics();
      std::vector<TopicAssignment> assignments;
      for (const auto& line : read_lines(tdist_in)) {
        assignments.push_back(assignment_from_jsonl(line, topics));
      }
      const TopicDistribution dist =
          tdist_by == "policy" ? topic_distribution_by_policy(assignments, topics)
                               : topic_distribution(assignments, topics);
      const std::string csv = distribution_to_csv(dist);
      const fs::path path =
          tdist_out.empty() ? out / "distribution.csv" : fs::path(tdist_out);
      write_file(path, csv);
      std::cout << csv;
    } else if (*report_cmd) {
      const fs::path art(report_artifacts);
      const LoadResult corpus = load_corpus(report_corpus);
      const TopicModel model = load_topic_model(art / "topic_model.json");
      std::map<std::pair<std::string, int>, TokenizedSentence> stems;
      for (const auto& ts : load_stems(art / "stems.jsonl")) {
        stems[{ts.doc_id, ts.sentence_index}] = ts;
      }
      std::map<std::pair<std::string, int>, SentenceLabel> predictions;
      for (const auto& line : read_lines(art / "predictions.jsonl")) {
        const auto j = nlohmann::json::parse(line);
        predictions[{j.at("doc_id").get<std::string>(),
                     j.at("sentence_index").get<int>()}] =
            label_from_string(j.at("label").get<std::string>());
      }
      std::map<std::pair<std::string, int>, TopicAssignment> assignments;
      if (fs::exists(art / "assignments.jsonl")) {
        for (const auto& line : read_lines(art / "assignments.jsonl")) {
          TopicAssignment a = assignment_from_jsonl(line, model.topics);
          assignments[{a.doc_id, a.sentence_index}] = std::move(a);
        }
      }
      for (const auto& doc : corpus.documents) {
        AnnotatedPolicy ap;
        ap.doc = doc;
        for (const auto& s : segment_sentences(doc)) {
          AnnotatedSentence as;
          as.sentence = s;
          const auto st = stems.find({s.doc_id, s.index});
          if (st != stems.end()) as.stems = st->second.stems;
          const auto pred = predictions.find({s.doc_id, s.index});
          if (pred == predictions.end()) {
            throw DataError("no prediction for " + s.doc_id + "#" +
                            std::to_string(s.index));
          }
          as.prediction = pred->second;
          if (as.prediction == SentenceLabel::kSensitive) {
            const auto it = assignments.find({s.doc_id, s.index});
            if (it != assignments.end()) {
              as.topics = it->second;
            } else {
              TokenizedSentence empty;
              empty.doc_id = s.doc_id;
              empty.sentence_index = s.index;
              as.topics = assign_topics(model, empty);
            }
          }
          ap.sentences.push_back(std::move(as));
        }
        write_file(out / "reports" / (doc.id + ".html"),
                   emit_highlight_html(ap, model.topics));
        write_file(out / "graphs" / (doc.id + ".dot"),
                   emit_graph_dot(ap, model));
      }
      std::cout << corpus.documents.size() << " reports -> "
                << (out / "reports").string() << ", " << (out / "graphs").string()
                << "\n";
    } else if (*run_cmd) {
      PipelineConfig config;
      if (!config_path.empty()) config = load_config(config_path);
      if (!run_input.empty()) config.input_dir = run_input;
      if (out_opt->count() > 0 || config.out_dir.empty()) config.out_dir = out_dir;
      if (seed_opt->count() > 0) config.seed = seed;
      if (!run_classifier.empty()) config.classifier = run_classifier;
      if (!run_model.empty()) config.model_path = run_model;
      if (config.input_dir.empty()) {
        throw UsageError("run needs --input-dir or a config with input_dir");
      }
      const int code = run_pipeline(config);
      std::cout << "run " << (code == 0 ? "ok" : "failed") << ", manifest "
                << (fs::path(config.out_dir) / "run.json").string() << "\n";
      return code;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
