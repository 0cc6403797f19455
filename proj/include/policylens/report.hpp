#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "policylens/corpus.hpp"
#include "policylens/topics.hpp"

namespace policylens {

struct AnnotatedSentence {
  Sentence sentence;
  std::vector<std::string> stems;
  SentenceLabel prediction = SentenceLabel::kNonSensitive;
  std::optional<TopicAssignment> topics;  // present iff prediction sensitive
};

struct AnnotatedPolicy {
  PolicyDocument doc;
  std::vector<AnnotatedSentence> sentences;
};

struct PracticeGraph {
  struct Edge {
    std::string from;
    std::string to;
  };
  // Node ids: t_<topic>, s_<doc>_<index>, w_<stem>. Labels map id -> display
  // text. All vectors sorted for stable emission.
  std::vector<std::string> topic_nodes;
  std::vector<std::string> sentence_nodes;
  std::vector<std::string> stem_nodes;
  std::map<std::string, std::string> labels;
  std::vector<Edge> sentence_topic;  // assignment
  std::vector<Edge> sentence_stem;   // occurrence
  std::vector<Edge> stem_topic;      // seed membership
};

// Sensitive sentences wrapped in spans with a CSS class per assigned topic;
// non-sensitive ones struck through inside a collapsible section. Stable bytes.
std::string emit_highlight_html(const AnnotatedPolicy& ap,
                                const std::vector<TopicSpec>& topics);

PracticeGraph build_practice_graph(const AnnotatedPolicy& ap,
                                   const TopicModel& model,
                                   std::optional<int> sentence_filter = {});

std::string emit_graph_dot(const AnnotatedPolicy& ap, const TopicModel& model,
                           std::optional<int> sentence_filter = {});

}  // namespace policylens
