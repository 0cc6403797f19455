#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>

namespace policylens {

// A fixed, versioned stop word list. All entries are lowercase and the set
// is closed under the stemmer: for every entry w, porter_stem(w) is also an
// entry, so a post-stemming membership check catches surface forms whose
// stem collides with a stop word.
class StopwordList {
 public:
  // The embedded English list shipped with the artifact.
  static const StopwordList& builtin();

  // Reads one entry per line (blank lines and #-comments skipped),
  // lowercases, and closes the set under the stemmer. The version is
  // "file:<filename>".
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  const std::string& version() const { return version_; }
  std::size_t size() const { return words_.size(); }

 private:
  StopwordList(std::unordered_set<std::string> words, std::string version);

  std::unordered_set<std::string> words_;
  std::string version_;
};

}  // namespace policylens
