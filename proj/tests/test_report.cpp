#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "policylens/report.hpp"
#include "support/helpers.hpp"

using namespace policylens;
using testing_support::make_doc;
using testing_support::make_sentence;

namespace {

constexpr auto kSens = SentenceLabel::kSensitive;
constexpr auto kNon = SentenceLabel::kNonSensitive;

// Minimal well-formedness check: every opened tag is closed in order.
// Void elements and the doctype are skipped.
bool html_balanced(const std::string& html) {
  static const std::set<std::string> kVoid = {"meta",  "br",   "hr",
                                              "img",   "link", "input"};
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = html.find('<', i)) != std::string::npos) {
    const std::size_t end = html.find('>', i);
    if (end == std::string::npos) return false;
    std::string inside = html.substr(i + 1, end - i - 1);
    i = end + 1;
    if (inside.empty() || inside[0] == '!') continue;  // doctype or comment
    const bool closing = inside[0] == '/';
    if (closing) inside.erase(0, 1);
    std::string name;
    for (const char c : inside) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        name += static_cast<char>(std::tolower(c));
      } else {
        break;
      }
    }
    if (name.empty() || kVoid.count(name) > 0) continue;
    if (!closing) {
      stack.push_back(name);
    } else {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

// Lenient DOT structure check: one digraph block, balanced braces, every
// statement is a comment, an attribute line, a node declaration or an edge
// whose endpoints were declared.
bool dot_well_formed(const std::string& dot) {
  std::istringstream lines(dot);
  std::string line;
  int depth = 0;
  bool saw_digraph = false;
  std::set<std::string> declared;
  std::vector<std::pair<std::string, std::string>> edges;
  while (std::getline(lines, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const std::string body = line.substr(first);
    if (body.rfind("//", 0) == 0) continue;
    if (body.rfind("digraph", 0) == 0) {
      saw_digraph = true;
      if (body.find('{') != std::string::npos) ++depth;
      continue;
    }
    if (body == "}") {
      --depth;
      continue;
    }
    if (depth != 1) return false;
    if (body.back() != ';') return false;
    const auto arrow = body.find("->");
    if (arrow != std::string::npos) {
      std::string from = body.substr(0, arrow);
      std::string to = body.substr(arrow + 2);
      from.erase(from.find_last_not_of(" \t") + 1);
      to.erase(0, to.find_first_not_of(" \t"));
      to.erase(to.find_first_of(" ;["));
      edges.push_back({from, to});
    } else {
      const auto name_end = body.find_first_of(" ;[");
      declared.insert(body.substr(0, name_end));
    }
  }
  if (!saw_digraph || depth != 0) return false;
  for (const auto& [from, to] : edges) {
    if (from.find('=') != std::string::npos) continue;  // attribute line
    if (declared.count(from) == 0 || declared.count(to) == 0) return false;
  }
  return true;
}

TopicModel toy_model() {
  TopicModel model;
  model.topics = default_topics();
  model.terms = {"collect", "data", "share"};
  model.term_index = {{"collect", 0}, {"data", 1}, {"share", 2}};
  model.phi = {{0.2, 0.6, 0.2}, {0.6, 0.2, 0.2}, {0.2, 0.2, 0.6},
               {0.4, 0.3, 0.3}, {0.3, 0.4, 0.3}, {0.3, 0.3, 0.4}};
  return model;
}

AnnotatedSentence annotated(const std::string& doc_id, int index,
                            const std::string& text,
                            std::vector<std::string> stems,
                            SentenceLabel prediction,
                            std::vector<std::string> assigned) {
  AnnotatedSentence as;
  as.sentence = make_sentence(doc_id, index, text);
  as.stems = std::move(stems);
  as.prediction = prediction;
  if (prediction == kSens) {
    TopicAssignment ta;
    ta.doc_id = doc_id;
    ta.sentence_index = index;
    ta.scores.assign(6, 1.0 / 6.0);
    ta.assigned = std::move(assigned);
    as.topics = ta;
  }
  return as;
}

}  // namespace

TEST_CASE("an all-non-sensitive policy renders an empty highlight section") {
  AnnotatedPolicy ap;
  ap.doc = make_doc("plain", "Nothing here. Nothing there.");
  ap.sentences.push_back(
      annotated("plain", 0, "Nothing here.", {"noth"}, kNon, {}));
  ap.sentences.push_back(
      annotated("plain", 1, "Nothing there.", {"noth"}, kNon, {}));
  const auto html = emit_highlight_html(ap, default_topics());
  CHECK(html_balanced(html));
  CHECK(html.find("class=\"sentence") == std::string::npos);
  CHECK(html.find("<s>") != std::string::npos);  // struck-through section
  CHECK(html.find("Nothing here.") != std::string::npos);
}

TEST_CASE("a multi-topic sentence carries one css class per topic") {
  AnnotatedPolicy ap;
  ap.doc = make_doc("multi", "We collect data.");
  ap.sentences.push_back(annotated("multi", 0, "We collect data.",
                                   {"collect", "data"}, kSens,
                                   {"Information", "Collection"}));
  const auto html = emit_highlight_html(ap, default_topics());
  CHECK(html_balanced(html));
  CHECK(html.find("topic-information topic-collection") != std::string::npos);
  // emission is byte-stable
  CHECK(html == emit_highlight_html(ap, default_topics()));
}

TEST_CASE("html escapes markup in sentence text") {
  AnnotatedPolicy ap;
  ap.doc = make_doc("esc", "literal");
  ap.sentences.push_back(annotated(
      "esc", 0, "Data <b>never</b> & \"always\" safe.", {"data"}, kSens,
      {"Information"}));
  const auto html = emit_highlight_html(ap, default_topics());
  CHECK(html.find("<b>never</b>") == std::string::npos);
  CHECK(html.find("&lt;b&gt;never&lt;/b&gt;") != std::string::npos);
  CHECK(html_balanced(html));
}

TEST_CASE("an empty annotation yields a bare digraph") {
  AnnotatedPolicy ap;
  ap.doc = make_doc("empty", "text");
  const auto dot = emit_graph_dot(ap, toy_model());
  CHECK(dot_well_formed(dot));
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("->") == std::string::npos);
}

TEST_CASE("a three-topic sentence has three topic edges") {
  AnnotatedPolicy ap;
  ap.doc = make_doc("alexa", "We collect data to share.");
  ap.sentences.push_back(annotated("alexa", 0, "We collect data to share.",
                                   {"collect", "data", "share"}, kSens,
                                   {"Collection", "Information", "Purpose"}));
  const auto model = toy_model();
  const auto dot = emit_graph_dot(ap, model);
  CHECK(dot_well_formed(dot));
  int topic_edges = 0;
  std::istringstream lines(dot);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find("s_alexa_0 -> t_") != std::string::npos) ++topic_edges;
  }
  CHECK(topic_edges == 3);
  CHECK(dot == emit_graph_dot(ap, model));

  const auto graph = build_practice_graph(ap, model);
  CHECK(graph.topic_nodes.size() == 3);
  CHECK(graph.sentence_nodes.size() == 1);
  for (const auto& edge : graph.sentence_topic) {
    CHECK(edge.from == "s_alexa_0");
    CHECK(edge.to.rfind("t_", 0) == 0);
  }
  // stem -> topic edges only for seed stems of assigned topics
  for (const auto& edge : graph.stem_topic) {
    CHECK(edge.from.rfind("w_", 0) == 0);
    CHECK(edge.to.rfind("t_", 0) == 0);
  }
}

TEST_CASE("a sentence filter narrows the graph to one sentence") {
  AnnotatedPolicy ap;
  ap.doc = make_doc("two", "A data note. A share note.");
  ap.sentences.push_back(annotated("two", 0, "A data note.", {"data"}, kSens,
                                   {"Information"}));
  ap.sentences.push_back(annotated("two", 1, "A share note.", {"share"},
                                   kSens, {"Sharing"}));
  const auto dot = emit_graph_dot(ap, toy_model(), 1);
  CHECK(dot_well_formed(dot));
  CHECK(dot.find("s_two_1") != std::string::npos);
  CHECK(dot.find("s_two_0") == std::string::npos);
}

TEST_CASE("non-sensitive sentences never enter the graph") {
  AnnotatedPolicy ap;
  ap.doc = make_doc("mixed", "Keep. Skip.");
  ap.sentences.push_back(
      annotated("mixed", 0, "Keep.", {"data"}, kSens, {"Information"}));
  ap.sentences.push_back(annotated("mixed", 1, "Skip.", {"share"}, kNon, {}));
  const auto dot = emit_graph_dot(ap, toy_model());
  CHECK(dot.find("s_mixed_0") != std::string::npos);
  CHECK(dot.find("s_mixed_1") == std::string::npos);
}
