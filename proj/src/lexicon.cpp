#include "ddes/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <vector>

namespace ddes {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::string normalize_word(std::string_view word) {
  std::string out(trim(word));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void Lexicon::add(std::string_view word, VadEntry entry) {
  const std::string key = normalize_word(word);
  if (!in_unit_interval(entry.valence) || !in_unit_interval(entry.arousal) || !in_unit_interval(entry.dominance)) {
    throw Error(ErrorCode::ValueOutOfRange, "values for '" + key + "' outside [0,1]");
  }
  if (!entries_.emplace(key, entry).second) {
    throw Error(ErrorCode::DuplicateWord, "word '" + key + "' appears more than once");
  }
}

std::optional<VadEntry> Lexicon::find(std::string_view word) const {
  const auto it = entries_.find(normalize_word(word));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Lexicon parse_lexicon(std::istream& in) {
  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    const auto fields = split_tabs(line);
    const bool header_candidate = first_content_row;
    first_content_row = false;
    if (header_candidate && fields.size() >= 2 && !parse_real(fields[1])) continue;

    const auto where = "line " + std::to_string(line_no);
    if (fields.size() != 4) {
      throw Error(ErrorCode::MalformedRow, where + ": expected 4 tab-separated columns, got " +
                                               std::to_string(fields.size()));
    }
    if (trim(fields[0]).empty()) throw Error(ErrorCode::MalformedRow, where + ": empty word");
    const auto v = parse_real(fields[1]);
    const auto a = parse_real(fields[2]);
    const auto d = parse_real(fields[3]);
    if (!v || !a || !d) throw Error(ErrorCode::MalformedRow, where + ": non-numeric value");
    try {
      lexicon.add(fields[0], VadEntry{*v, *a, *d});
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open lexicon '" + path.string() + "'");
  return parse_lexicon(in);
}

VAPoint lookup_va(const Lexicon& lexicon, std::string_view word) {
  const auto entry = lexicon.find(word);
  if (!entry) throw Error(ErrorCode::WordNotFound, "'" + normalize_word(word) + "' not in lexicon");
  return VAPoint(2.0 * entry->valence - 1.0, 2.0 * entry->arousal - 1.0);
}

}  // namespace ddes
