#include "salt/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "salt/errors.hpp"

namespace salt {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// "word" or "rank<TAB>word"; returns the word field.
std::string parse_list_line(const std::string& line) {
  const auto tab = line.find('\t');
  if (tab != std::string::npos) {
    const std::string first = trim(line.substr(0, tab));
    const std::string rest = trim(line.substr(tab + 1));
    if (is_integer(first) && !rest.empty()) {
      // Tolerate further tab-separated columns (counts etc.); keep the word.
      const auto next_tab = rest.find('\t');
      return next_tab == std::string::npos ? rest : trim(rest.substr(0, next_tab));
    }
  }
  return trim(line);
}

std::string ascii_title(const std::string& s) {
  std::string out = s;
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') {
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  }
  return out;
}

std::string ascii_upper(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

}  // namespace

bool VocabularySet::contains(int token_id) const {
  return std::binary_search(token_ids.begin(), token_ids.end(), token_id);
}

WordList load_frequency_list(const std::string& path, std::size_t limit) {
  if (limit == 0) throw InputError("frequency list limit must be positive");
  std::ifstream in(path);
  if (!in.is_open()) throw InputError("cannot open frequency list '" + path + "'");

  WordList list;
  list.source_path = path;
  std::unordered_set<std::string> seen;
  std::string line;
  while (list.words.size() < limit && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string word = ascii_fold(parse_list_line(line));
    if (word.empty()) continue;
    if (seen.insert(word).second) list.words.push_back(word);
  }
  if (list.words.empty()) throw InputError("frequency list '" + path + "' is empty");
  return list;
}

VocabularySet build_token_set(const WordList& word_list, const Tokenizer& tokenizer) {
  if (word_list.words.empty()) throw InputError("word list is empty");

  std::set<int> ids;
  std::size_t retained = 0;
  for (const auto& word : word_list.words) {
    bool word_in = false;
    for (const auto& form : {word, ascii_title(word), ascii_upper(word)}) {
      const auto pieces = tokenizer.encode_word(form);
      if (pieces.size() != 1) continue;
      if (tokenizer.is_special(pieces[0])) continue;
      ids.insert(pieces[0]);
      word_in = true;
    }
    if (word_in) ++retained;
  }

  if (ids.empty()) {
    throw ConfigError("vocabulary for language '" + word_list.language +
                      "' is empty: no word in the list maps to a single token "
                      "under this tokenizer");
  }

  VocabularySet set;
  set.language = word_list.language;
  set.token_ids.assign(ids.begin(), ids.end());
  set.word_count_in = retained;
  set.word_count_total = word_list.words.size();
  return set;
}

double coverage_ratio(const WordList& word_list, const Tokenizer& tokenizer) {
  if (word_list.words.empty()) throw InputError("word list is empty");
  std::size_t retained = 0;
  for (const auto& word : word_list.words) {
    for (const auto& form : {word, ascii_title(word), ascii_upper(word)}) {
      const auto pieces = tokenizer.encode_word(form);
      if (pieces.size() == 1 && !tokenizer.is_special(pieces[0])) {
        ++retained;
        break;
      }
    }
  }
  return static_cast<double>(retained) / static_cast<double>(word_list.words.size());
}

std::string vocabulary_set_to_json(const VocabularySet& set) {
  nlohmann::json j;
  j["language"] = set.language;
  j["token_ids"] = set.token_ids;
  j["word_count_in"] = set.word_count_in;
  j["word_count_total"] = set.word_count_total;
  return j.dump(2);
}

VocabularySet vocabulary_set_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  VocabularySet set;
  set.language = j.at("language").get<std::string>();
  set.token_ids = j.at("token_ids").get<std::vector<int>>();
  set.word_count_in = j.at("word_count_in").get<std::size_t>();
  set.word_count_total = j.at("word_count_total").get<std::size_t>();
  if (!std::is_sorted(set.token_ids.begin(), set.token_ids.end())) {
    throw DataError("vocabulary set token_ids are not sorted");
  }
  return set;
}

void save_vocabulary_set(const VocabularySet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out.is_open()) throw InputError("cannot write vocabulary set to '" + path + "'");
  out << vocabulary_set_to_json(set) << '\n';
}

VocabularySet load_vocabulary_set(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw InputError("cannot open vocabulary set '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return vocabulary_set_from_json(text);
}

}  // namespace salt
