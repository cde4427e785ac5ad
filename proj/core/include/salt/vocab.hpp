#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "salt/tokenizer.hpp"

namespace salt {

// A per-language frequency word list, most frequent first. Words are stored
// case-folded and deduplicated (first occurrence kept).
struct WordList {
  std::string language;
  std::vector<std::string> words;
  std::string source_path;
};

// The token ids a target language is allowed to contribute to substitutions.
// Only words that tokenize to exactly one non-special token are retained, so
// substitution can never change sequence length.
struct VocabularySet {
  std::string language;
  std::vector<int> token_ids;  // sorted ascending, unique
  std::size_t word_count_in = 0;
  std::size_t word_count_total = 0;

  bool contains(int token_id) const;
  bool empty() const { return token_ids.empty(); }
};

// Reads a frequency list: one word per line, or "rank<TAB>word". Case-folds,
// deduplicates, keeps at most `limit` words in rank order.
WordList load_frequency_list(const std::string& path, std::size_t limit = 10000);

// Compiles a word list into a VocabularySet under the given tokenizer.
// A word contributes the ids of every case variant (folded, Title, UPPER)
// that maps to a single non-special token; it counts as retained when at
// least one variant does. An empty result signals a tokenizer/language
// mismatch and raises a ConfigError naming the language.
VocabularySet build_token_set(const WordList& word_list, const Tokenizer& tokenizer);

// word_count_in / word_count_total for the would-be token set. Ranks
// candidate target languages: the better a language's words survive the
// tokenizer as single tokens, the better a substitution target it is.
double coverage_ratio(const WordList& word_list, const Tokenizer& tokenizer);

std::string vocabulary_set_to_json(const VocabularySet& set);
VocabularySet vocabulary_set_from_json(const std::string& json_text);
void save_vocabulary_set(const VocabularySet& set, const std::string& path);
VocabularySet load_vocabulary_set(const std::string& path);

}  // namespace salt
