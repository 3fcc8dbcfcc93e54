#pragma once
// NRC-style VAD lexicon: word -> (valence, arousal, dominance) stored in [0, 1].

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ddes/core.hpp"

namespace ddes {

struct VadEntry {
  double valence;
  double arousal;
  double dominance;  // kept for fidelity to the file, never used for anchors
};

class Lexicon {
 public:
  Lexicon() = default;

  /// Errors: DuplicateWord, ValueOutOfRange.
  void add(std::string_view word, VadEntry entry);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Lookup after trimming and lowercasing.
  std::optional<VadEntry> find(std::string_view word) const;

  const std::map<std::string, VadEntry, std::less<>>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, VadEntry, std::less<>> entries_;
};

/// Lowercase and strip surrounding whitespace.
std::string normalize_word(std::string_view word);

/// Parses tab-separated rows `word valence arousal dominance`. A first row
/// whose second column is not numeric is treated as a header. Blank lines
/// are skipped. Errors: MalformedRow (with line number), DuplicateWord,
/// ValueOutOfRange.
Lexicon parse_lexicon(std::istream& in);

/// Errors: FileNotFound plus everything parse_lexicon throws.
Lexicon load_lexicon(const std::filesystem::path& path);

/// Stored [0,1] values mapped to [-1,1] by 2x - 1; dominance dropped.
/// Errors: WordNotFound.
VAPoint lookup_va(const Lexicon& lexicon, std::string_view word);

}  // namespace ddes
