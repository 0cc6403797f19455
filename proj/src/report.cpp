#include "policylens/report.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "policylens/errors.hpp"

namespace policylens {

namespace {

std::string html_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string css_class(const std::string& topic_name) {
  std::string cls = "topic-";
  for (char c : topic_name) {
    cls += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return cls;
}

// DOT identifiers: letters, digits and underscores only.
std::string dot_id(const std::string& raw) {
  std::string id;
  id.reserve(raw.size());
  for (char c : raw) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_';
    id += ok ? c : '_';
  }
  return id;
}

std::string dot_quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

// Truncates to at most n bytes without splitting a UTF-8 sequence.
std::string clip(const std::string& text, std::size_t n) {
  if (text.size() <= n) return text;
  std::size_t end = n;
  while (end > 0 && (static_cast<unsigned char>(text[end]) & 0xc0) == 0x80) {
    --end;
  }
  return text.substr(0, end) + "...";
}

constexpr const char* kPalette[] = {"#cfe8ff", "#d3f2cf", "#ffe1c9",
                                    "#ecd9f7", "#fff3bf", "#d7f0ef"};

}  // namespace

std::string emit_highlight_html(const AnnotatedPolicy& ap,
                                const std::vector<TopicSpec>& topics) {
  std::string html;
  html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  html += "<title>" + html_escape(ap.doc.title) + "</title>\n";
  html += "<style>\n";
  html += "body { font-family: Georgia, serif; max-width: 52rem; margin: 2rem auto; "
          "line-height: 1.6; padding: 0 1rem; }\n";
  html += ".legend span { padding: 0.1rem 0.5rem; border-radius: 0.3rem; "
          "margin-right: 0.4rem; }\n";
  html += ".sentence { padding: 0.05rem 0.15rem; border-radius: 0.2rem; }\n";
  html += ".removed { margin-top: 2rem; color: #666; }\n";
  html += ".removed s { display: block; margin: 0.3rem 0; }\n";
  for (std::size_t t = 0; t < topics.size(); ++t) {
    html += "." + css_class(topics[t].name) + " { background-color: ";
    html += kPalette[t % (sizeof(kPalette) / sizeof(kPalette[0]))];
    html += "; }\n";
  }
  html += "</style>\n</head>\n<body>\n";
  html += "<h1>" + html_escape(ap.doc.title) + "</h1>\n";

  html += "<p class=\"legend\">";
  for (const auto& topic : topics) {
    html += "<span class=\"" + css_class(topic.name) + "\">" +
            html_escape(topic.name) + "</span>";
  }
  html += "</p>\n";

  html += "<div class=\"highlighted\">\n";
  for (const auto& s : ap.sentences) {
    if (s.prediction != SentenceLabel::kSensitive) continue;
    std::string classes = "sentence";
    std::string names;
    if (s.topics) {
      for (const auto& name : s.topics->assigned) {
        classes += " " + css_class(name);
        if (!names.empty()) names += ", ";
        names += name;
      }
    }
    html += "<span class=\"" + classes + "\" title=\"" + html_escape(names) +
            "\">" + html_escape(s.sentence.text) + "</span>\n";
  }
  html += "</div>\n";

  std::size_t removed = 0;
  for (const auto& s : ap.sentences) {
    if (s.prediction == SentenceLabel::kNonSensitive) ++removed;
  }
  html += "<details class=\"removed\">\n<summary>" + std::to_string(removed) +
          " non-sensitive sentence(s) removed</summary>\n";
  for (const auto& s : ap.sentences) {
    if (s.prediction != SentenceLabel::kNonSensitive) continue;
    html += "<s>" + html_escape(s.sentence.text) + "</s>\n";
  }
  html += "</details>\n</body>\n</html>\n";
  return html;
}

PracticeGraph build_practice_graph(const AnnotatedPolicy& ap,
                                   const TopicModel& model,
                                   std::optional<int> sentence_filter) {
  PracticeGraph g;

  std::set<std::string> topic_ids;
  std::set<std::string> sentence_ids;
  std::set<std::string> stem_ids;
  std::set<std::pair<std::string, std::string>> st_edges;
  std::set<std::pair<std::string, std::string>> sw_edges;
  std::set<std::pair<std::string, std::string>> wt_edges;

  std::unordered_map<std::string, std::size_t> topic_pos;
  for (std::size_t t = 0; t < model.topics.size(); ++t) {
    topic_pos[model.topics[t].name] = t;
  }

  for (const auto& s : ap.sentences) {
    if (s.prediction != SentenceLabel::kSensitive || !s.topics) continue;
    if (sentence_filter && s.sentence.index != *sentence_filter) continue;

    const std::string sid =
        "s_" + dot_id(s.sentence.doc_id) + "_" + std::to_string(s.sentence.index);
    sentence_ids.insert(sid);
    g.labels[sid] = "s" + std::to_string(s.sentence.index) + ": " +
                    clip(s.sentence.text, 48);

    // Stems worth drawing: in-model stems that are a seed of an assigned
    // topic or rank in an assigned topic's top terms.
    std::unordered_set<std::string> interesting;
    for (const auto& name : s.topics->assigned) {
      const auto it = topic_pos.find(name);
      if (it == topic_pos.end()) continue;
      const auto& spec = model.topics[it->second];
      interesting.insert(spec.seed_stems.begin(), spec.seed_stems.end());
      for (const auto& term :
           top_terms(model, static_cast<int>(it->second), 10)) {
        interesting.insert(term);
      }
    }

    for (const auto& name : s.topics->assigned) {
      const std::string tid = "t_" + dot_id(name);
      topic_ids.insert(tid);
      g.labels[tid] = name;
      st_edges.insert({sid, tid});
    }

    std::set<std::string> seen;
    for (const auto& stem : s.stems) {
      if (seen.count(stem) > 0) continue;
      seen.insert(stem);
      if (model.term_index.count(stem) == 0 || interesting.count(stem) == 0) {
        continue;
      }
      const std::string wid = "w_" + dot_id(stem);
      stem_ids.insert(wid);
      g.labels[wid] = stem;
      sw_edges.insert({sid, wid});
      for (const auto& name : s.topics->assigned) {
        const auto it = topic_pos.find(name);
        if (it == topic_pos.end()) continue;
        const auto& seeds = model.topics[it->second].seed_stems;
        if (std::find(seeds.begin(), seeds.end(), stem) != seeds.end()) {
          wt_edges.insert({wid, "t_" + dot_id(name)});
        }
      }
    }
  }

  g.topic_nodes.assign(topic_ids.begin(), topic_ids.end());
  g.sentence_nodes.assign(sentence_ids.begin(), sentence_ids.end());
  g.stem_nodes.assign(stem_ids.begin(), stem_ids.end());
  for (const auto& [from, to] : st_edges) g.sentence_topic.push_back({from, to});
  for (const auto& [from, to] : sw_edges) g.sentence_stem.push_back({from, to});
  for (const auto& [from, to] : wt_edges) g.stem_topic.push_back({from, to});
  return g;
}

std::string emit_graph_dot(const AnnotatedPolicy& ap, const TopicModel& model,
                           std::optional<int> sentence_filter) {
  const PracticeGraph g = build_practice_graph(ap, model, sentence_filter);
  std::string dot;
  dot += "// practice graph: " + ap.doc.id + "\n";
  dot += "digraph {\n";
  if (!g.topic_nodes.empty() || !g.sentence_nodes.empty() ||
      !g.stem_nodes.empty()) {
    dot += "  rankdir=LR;\n";
    for (const auto& id : g.sentence_nodes) {
      dot += "  " + id + " [label=" + dot_quote(g.labels.at(id)) +
             ", shape=box];\n";
    }
    for (const auto& id : g.stem_nodes) {
      dot += "  " + id + " [label=" + dot_quote(g.labels.at(id)) +
             ", shape=plaintext];\n";
    }
    for (const auto& id : g.topic_nodes) {
      dot += "  " + id + " [label=" + dot_quote(g.labels.at(id)) +
             ", shape=ellipse, style=filled];\n";
    }
    for (const auto& e : g.sentence_stem) {
      dot += "  " + e.from + " -> " + e.to + ";\n";
    }
    for (const auto& e : g.sentence_topic) {
      dot += "  " + e.from + " -> " + e.to + ";\n";
    }
    for (const auto& e : g.stem_topic) {
      dot += "  " + e.from + " -> " + e.to + ";\n";
    }
  }
  dot += "}\n";
  return dot;
}

}  // namespace policylens
