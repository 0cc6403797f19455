#include "policylens/topics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "policylens/errors.hpp"

namespace policylens {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kTopicsFormatVersion = 1;

void validate_params(const TopicModelParams& p) {
  if (p.alpha <= 0.0) throw UsageError("alpha must be positive");
  if (p.beta <= 0.0) throw UsageError("beta must be positive");
  if (p.seed_boost < 1.0) throw UsageError("seed_boost must be at least 1");
  if (p.iterations < 1) throw UsageError("iterations must be at least 1");
  if (p.min_policy_df < 1) throw UsageError("min_policy_df must be at least 1");
}

std::string format_fraction(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace

const std::vector<TopicSpec>& default_topics() {
  static const std::vector<TopicSpec> kTopics = {
      {"Information", {"person", "data", "email", "audio", "mail", "address"}},
      {"Collection", {"collect", "access", "us", "store"}},
      {"Sharing", {"disclos", "share", "reveal", "parti"}},
      {"Permission", {"agre", "consent", "allow", "permit"}},
      {"Purpose", {"purpos", "provid", "help", "offer"}},
      {"Technology", {"cooki", "devic", "session", "servic"}}};
  return kTopics;
}

std::vector<TokenizedSentence> filter_rare_terms(
    std::span<const TokenizedSentence> sentences,
    const std::vector<TopicSpec>& topics, int min_policy_df) {
  if (min_policy_df < 1) throw UsageError("min_policy_df must be at least 1");
  std::unordered_set<std::string> seeds;
  for (const auto& t : topics) {
    seeds.insert(t.seed_stems.begin(), t.seed_stems.end());
  }
  std::unordered_map<std::string, std::set<std::string>> policies_with;
  for (const auto& s : sentences) {
    for (const auto& stem : s.stems) policies_with[stem].insert(s.doc_id);
  }
  std::vector<TokenizedSentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    TokenizedSentence filtered = s;
    filtered.stems.clear();
    for (const auto& stem : s.stems) {
      if (seeds.count(stem) > 0 ||
          policies_with[stem].size() >= static_cast<std::size_t>(min_policy_df)) {
        filtered.stems.push_back(stem);
      }
    }
    out.push_back(std::move(filtered));
  }
  return out;
}

TopicModel fit_labeled_lda(std::span<const TokenizedSentence> sentences,
                           const std::vector<TopicSpec>& topics,
                           const TopicModelParams& params) {
  validate_params(params);
  if (topics.empty()) throw UsageError("no topics given");
  const std::size_t K = topics.size();

  TopicModel model;
  model.topics = topics;
  model.params = params;

  std::set<std::string> term_set;
  for (const auto& s : sentences) {
    term_set.insert(s.stems.begin(), s.stems.end());
  }
  model.terms.assign(term_set.begin(), term_set.end());
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    model.term_index[model.terms[i]] = static_cast<std::uint32_t>(i);
  }
  const std::size_t V = model.terms.size();
  if (V == 0) throw DataError("no terms to model after filtering");

  // seed_topic[w] = home topic index when w is a seed stem, else -1.
  std::vector<int> seed_topic(V, -1);
  for (std::size_t t = 0; t < K; ++t) {
    for (const auto& seed : topics[t].seed_stems) {
      const auto it = model.term_index.find(seed);
      if (it != model.term_index.end()) seed_topic[it->second] = static_cast<int>(t);
    }
  }
  const auto beta_wt = [&](std::size_t term, std::size_t topic) {
    return seed_topic[term] == static_cast<int>(topic)
               ? params.beta * params.seed_boost
               : params.beta;
  };
  std::vector<double> beta_sum(K, 0.0);
  for (std::size_t t = 0; t < K; ++t) {
    for (std::size_t w = 0; w < V; ++w) beta_sum[t] += beta_wt(w, t);
  }

  // Documents are sentences; tokens carry their term index.
  std::vector<std::vector<std::uint32_t>> docs;
  for (const auto& s : sentences) {
    std::vector<std::uint32_t> doc;
    doc.reserve(s.stems.size());
    for (const auto& stem : s.stems) doc.push_back(model.term_index.at(stem));
    if (!doc.empty()) docs.push_back(std::move(doc));
  }

  const std::size_t D = docs.size();
  std::vector<std::vector<std::uint32_t>> n_dk(D, std::vector<std::uint32_t>(K, 0));
  std::vector<std::vector<std::uint32_t>> n_kw(K, std::vector<std::uint32_t>(V, 0));
  std::vector<std::uint32_t> n_k(K, 0);
  std::vector<std::vector<std::uint8_t>> z(D);

  Rng rng(params.seed);
  // Seed tokens start in their home topic. Other tokens start in the
  // majority home topic among the document's seed tokens, which biases the
  // sampler toward the seeded interpretation of each topic slot; documents
  // without seed tokens start uniformly.
  for (std::size_t d = 0; d < D; ++d) {
    z[d].resize(docs[d].size());
    std::vector<std::uint32_t> home_count(K, 0);
    for (const std::uint32_t w : docs[d]) {
      if (seed_topic[w] >= 0) ++home_count[static_cast<std::size_t>(seed_topic[w])];
    }
    const std::uint32_t best = *std::max_element(home_count.begin(), home_count.end());
    int majority = -1;
    if (best > 0) {
      std::vector<std::size_t> tied;
      for (std::size_t t = 0; t < K; ++t) {
        if (home_count[t] == best) tied.push_back(t);
      }
      majority = static_cast<int>(
          tied.size() == 1 ? tied[0]
                           : tied[rng.next_below(static_cast<std::uint64_t>(tied.size()))]);
    }
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      const std::uint32_t w = docs[d][i];
      const int home = seed_topic[w];
      std::size_t topic;
      if (home >= 0) {
        topic = static_cast<std::size_t>(home);
      } else if (majority >= 0) {
        topic = static_cast<std::size_t>(majority);
      } else {
        topic = static_cast<std::size_t>(rng.next_below(K));
      }
      z[d][i] = static_cast<std::uint8_t>(topic);
      ++n_dk[d][topic];
      ++n_kw[topic][w];
      ++n_k[topic];
    }
  }

  std::vector<double> p(K);
  for (int iter = 0; iter < params.iterations; ++iter) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const std::uint32_t w = docs[d][i];
        const std::size_t old_t = z[d][i];
        --n_dk[d][old_t];
        --n_kw[old_t][w];
        --n_k[old_t];

        double total = 0.0;
        for (std::size_t t = 0; t < K; ++t) {
          const double left = static_cast<double>(n_dk[d][t]) + params.alpha;
          const double right =
              (static_cast<double>(n_kw[t][w]) + beta_wt(w, t)) /
              (static_cast<double>(n_k[t]) + beta_sum[t]);
          p[t] = left * right;
          total += p[t];
        }
        const double target = rng.next_double() * total;
        double cumulative = 0.0;
        std::size_t new_t = K - 1;
        for (std::size_t t = 0; t < K; ++t) {
          cumulative += p[t];
          if (target < cumulative) {
            new_t = t;
            break;
          }
        }
        z[d][i] = static_cast<std::uint8_t>(new_t);
        ++n_dk[d][new_t];
        ++n_kw[new_t][w];
        ++n_k[new_t];
      }
    }
  }

  model.phi.assign(K, std::vector<double>(V, 0.0));
  for (std::size_t t = 0; t < K; ++t) {
    const double denom = static_cast<double>(n_k[t]) + beta_sum[t];
    for (std::size_t w = 0; w < V; ++w) {
      model.phi[t][w] = (static_cast<double>(n_kw[t][w]) + beta_wt(w, t)) / denom;
    }
  }
  return model;
}

TopicAssignment assign_topics(const TopicModel& model,
                              const TokenizedSentence& sentence,
                              double threshold) {
  const std::size_t K = model.topics.size();
  TopicAssignment a;
  a.doc_id = sentence.doc_id;
  a.sentence_index = sentence.sentence_index;

  std::unordered_map<std::uint32_t, std::uint32_t> counts;
  for (const auto& stem : sentence.stems) {
    const auto it = model.term_index.find(stem);
    if (it != model.term_index.end()) ++counts[it->second];
  }
  if (counts.empty()) {
    a.scores.assign(K, 1.0 / static_cast<double>(K));
    a.assigned.push_back(model.topics.front().name);
    a.fallback = true;
    return a;
  }

  a.scores.assign(K, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < K; ++t) {
    for (const auto& [w, c] : counts) {
      a.scores[t] += model.phi[t][w] * static_cast<double>(c);
    }
    total += a.scores[t];
  }
  for (auto& s : a.scores) s /= total;

  for (std::size_t t = 0; t < K; ++t) {
    if (a.scores[t] >= threshold) a.assigned.push_back(model.topics[t].name);
  }
  if (a.assigned.empty()) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < K; ++t) {
      if (a.scores[t] > a.scores[best]) best = t;
    }
    a.assigned.push_back(model.topics[best].name);
  }
  return a;
}

TopicDistribution topic_distribution(std::span<const TopicAssignment> assignments,
                                     const std::vector<TopicSpec>& topics) {
  TopicDistribution dist;
  for (const auto& topic : topics) {
    std::size_t carrying = 0;
    for (const auto& a : assignments) {
      if (std::find(a.assigned.begin(), a.assigned.end(), topic.name) !=
          a.assigned.end()) {
        ++carrying;
      }
    }
    const double fraction =
        assignments.empty() ? 0.0
                            : static_cast<double>(carrying) /
                                  static_cast<double>(assignments.size());
    dist.fractions.emplace_back(topic.name, fraction);
  }
  return dist;
}

TopicDistribution topic_distribution_by_policy(
    std::span<const TopicAssignment> assignments,
    const std::vector<TopicSpec>& topics) {
  std::set<std::string> policies;
  std::unordered_map<std::string, std::set<std::string>> policies_with;
  for (const auto& a : assignments) {
    policies.insert(a.doc_id);
    for (const auto& name : a.assigned) policies_with[name].insert(a.doc_id);
  }
  TopicDistribution dist;
  for (const auto& topic : topics) {
    const double fraction =
        policies.empty()
            ? 0.0
            : static_cast<double>(policies_with[topic.name].size()) /
                  static_cast<double>(policies.size());
    dist.fractions.emplace_back(topic.name, fraction);
  }
  return dist;
}

std::vector<std::string> top_terms(const TopicModel& model, int topic, int n) {
  if (topic < 0 || static_cast<std::size_t>(topic) >= model.topics.size()) {
    throw UsageError("topic index out of range");
  }
  std::vector<std::size_t> order(model.terms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto& row = model.phi[static_cast<std::size_t>(topic)];
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return model.terms[a] < model.terms[b];
  });
  std::vector<std::string> out;
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(n), order.size());
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(model.terms[order[i]]);
  return out;
}

std::string topic_model_to_json(const TopicModel& model) {
  ordered_json j;
  j["format"] = "policylens-topics";
  j["version"] = kTopicsFormatVersion;
  ordered_json params;
  params["alpha"] = model.params.alpha;
  params["beta"] = model.params.beta;
  params["seed_boost"] = model.params.seed_boost;
  params["iterations"] = model.params.iterations;
  params["min_policy_df"] = model.params.min_policy_df;
  params["seed"] = model.params.seed;
  j["params"] = std::move(params);
  ordered_json topics = ordered_json::array();
  for (const auto& t : model.topics) {
    ordered_json tj;
    tj["name"] = t.name;
    tj["seed_stems"] = t.seed_stems;
    topics.push_back(std::move(tj));
  }
  j["topics"] = std::move(topics);
  ordered_json phi = ordered_json::array();
  for (std::size_t t = 0; t < model.topics.size(); ++t) {
    ordered_json row;  // terms are sorted, so keys come out sorted
    for (std::size_t w = 0; w < model.terms.size(); ++w) {
      row[model.terms[w]] = model.phi[t][w];
    }
    phi.push_back(std::move(row));
  }
  j["phi"] = std::move(phi);
  return j.dump(2) + "\n";
}

TopicModel topic_model_from_json(const std::string& text) {
  TopicModel model;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "policylens-topics") {
      throw DataError("not a topic model file");
    }
    if (j.at("version").get<int>() != kTopicsFormatVersion) {
      throw DataError("unsupported topic model version");
    }
    const auto& params = j.at("params");
    model.params.alpha = params.at("alpha").get<double>();
    model.params.beta = params.at("beta").get<double>();
    model.params.seed_boost = params.at("seed_boost").get<double>();
    model.params.iterations = params.at("iterations").get<int>();
    model.params.min_policy_df = params.at("min_policy_df").get<int>();
    model.params.seed = params.at("seed").get<std::uint64_t>();
    for (const auto& tj : j.at("topics")) {
      TopicSpec spec;
      spec.name = tj.at("name").get<std::string>();
      spec.seed_stems = tj.at("seed_stems").get<std::vector<std::string>>();
      model.topics.push_back(std::move(spec));
    }
    const auto& phi = j.at("phi");
    if (phi.size() != model.topics.size()) {
      throw DataError("phi row count does not match topic count");
    }
    std::set<std::string> term_set;
    for (const auto& row : phi) {
      for (const auto& [stem, prob] : row.items()) term_set.insert(stem);
    }
    model.terms.assign(term_set.begin(), term_set.end());
    for (std::size_t i = 0; i < model.terms.size(); ++i) {
      model.term_index[model.terms[i]] = static_cast<std::uint32_t>(i);
    }
    model.phi.assign(model.topics.size(),
                     std::vector<double>(model.terms.size(), 0.0));
    for (std::size_t t = 0; t < model.topics.size(); ++t) {
      for (const auto& [stem, prob] : phi[t].items()) {
        model.phi[t][model.term_index.at(stem)] = prob.get<double>();
      }
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("bad topic model file: ") + e.what());
  }
  return model;
}

void save_topic_model(const TopicModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write topic model: " + path);
  out << topic_model_to_json(model);
}

TopicModel load_topic_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read topic model: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return topic_model_from_json(buf.str());
}

std::string assignment_to_jsonl(const TopicAssignment& a,
                                const std::vector<TopicSpec>& topics) {
  ordered_json j;
  j["doc_id"] = a.doc_id;
  j["sentence_index"] = a.sentence_index;
  ordered_json scores;
  for (std::size_t t = 0; t < topics.size(); ++t) {
    scores[topics[t].name] = a.scores[t];
  }
  j["scores"] = std::move(scores);
  j["assigned"] = a.assigned;
  if (a.fallback) j["fallback"] = true;
  return j.dump();
}

TopicAssignment assignment_from_jsonl(const std::string& line,
                                      const std::vector<TopicSpec>& topics) {
  TopicAssignment a;
  try {
    const auto j = nlohmann::json::parse(line);
    a.doc_id = j.at("doc_id").get<std::string>();
    a.sentence_index = j.at("sentence_index").get<int>();
    const auto& scores = j.at("scores");
    a.scores.reserve(topics.size());
    for (const auto& t : topics) {
      a.scores.push_back(scores.at(t.name).get<double>());
    }
    a.assigned = j.at("assigned").get<std::vector<std::string>>();
    if (j.contains("fallback")) a.fallback = j.at("fallback").get<bool>();
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("bad assignment record: ") + e.what());
  }
  return a;
}

std::string distribution_to_csv(const TopicDistribution& dist) {
  std::string csv = "topic,fraction\n";
  for (const auto& [name, fraction] : dist.fractions) {
    csv += name;
    csv += ',';
    csv += format_fraction(fraction);
    csv += '\n';
  }
  return csv;
}

}  // namespace policylens
