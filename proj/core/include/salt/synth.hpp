#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "salt/codeswitch.hpp"
#include "salt/data.hpp"
#include "salt/model.hpp"
#include "salt/tokenizer.hpp"
#include "salt/vocab.hpp"

namespace salt {

// Deterministic desk-scale testbed. Languages are token-level ciphers of a
// base language over a shared template grammar: content words (nouns and
// attributes) get distinct surface forms per language, function words are
// shared. Every content concept has a noun-specific set of compatible
// attributes; sentences only ever realize compatible pairs, which gives each
// concept a distributional signature the masked LM can align across
// languages.
struct SyntheticLanguageSpec {
  std::size_t noun_count = 20;
  std::size_t attribute_count = 12;
  std::size_t attributes_per_noun = 5;
  std::size_t n_languages = 4;  // first one is the source
  // Fraction of noun concepts whose surface form is shared by all languages.
  // These play the role of loanwords/shared subwords in real multilingual
  // vocabularies: concept-specific anchors that let the masked LM bootstrap
  // alignment of the remaining content words.
  double cognate_noun_fraction = 0.4;
  std::size_t mlm_sentences_per_language = 1500;
  std::size_t train_examples = 300;
  std::size_t dev_examples = 120;
  std::size_t test_examples = 300;
  std::uint64_t seed = 7;

  void validate() const;
  std::size_t base_vocab_size() const { return noun_count + attribute_count; }
};

// Exact word-level translation oracle, one map per target language. Content
// words map through the cipher; shared function words map to themselves.
struct GoldLexicon {
  std::string source_language;
  std::map<std::string, std::map<std::string, std::string>> word_maps;

  const std::map<std::string, std::string>& map_for(const std::string& language) const;
};

struct SynthCorpus {
  SyntheticLanguageSpec spec;
  std::vector<std::string> languages;  // [0] is the source
  Tokenizer tokenizer;
  std::map<std::string, std::vector<std::string>> mlm_sentences;  // parallel
  std::vector<TaskExample> train;  // source language
  std::vector<TaskExample> dev;    // source language
  std::map<std::string, std::vector<TaskExample>> test;  // aligned translations
  GoldLexicon lexicon;
  std::map<std::string, std::vector<std::string>> frequency_words;

  const std::string& source_language() const { return languages.front(); }
};

// Task semantics (three classes, labels identical across languages):
//   premise    "the <noun> is <x> and <y> ."
//   entailment "the <noun> is <x|y> ."
//   neutral    "the <noun> is <z> ."  z compatible with the noun, unstated
//   contradict "the <noun> is <w> ."  w incompatible with the noun
SynthCorpus generate_corpus(const SyntheticLanguageSpec& spec);

void save_corpus(const SynthCorpus& corpus, const std::string& dir);
SynthCorpus load_corpus(const std::string& dir);

std::string lexicon_to_json(const GoldLexicon& lexicon);
GoldLexicon lexicon_from_json(const std::string& json_text);

struct PretrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  double mask_probability = 0.15;
  // Of the selected positions: mask_fraction become [MASK], random_fraction
  // a random token, the rest keep the original. The keep-original slice
  // trains the identity channel that unmasked scoring depends on.
  double mask_fraction = 0.8;
  double random_fraction = 0.1;
  std::uint64_t seed = 11;
  ToyTransformer::Config model;
};

struct PretrainOutput {
  std::unique_ptr<ToyTransformer> model;
  std::vector<double> epoch_losses;
};

// Standard masked-LM pretraining (80/10/10 mask/random/keep) over the pooled
// multilingual corpus. The keep-original slice is what makes unmasked
// scoring meaningful downstream.
PretrainOutput pretrain_toy(const SynthCorpus& corpus, const PretrainConfig& config);

// Fraction of source-language content positions whose gold counterpart in
// `target_language` ranks within the top k of the scorer's distribution
// restricted to `target_set`. Measures how much cross-lingual alignment
// pretraining produced.
double gold_top_k_accuracy(const Scorer& scorer, const SynthCorpus& corpus,
                           const std::string& target_language,
                           const VocabularySet& target_set, std::size_t k,
                           std::size_t max_sentences = 200);

struct PrecisionStats {
  std::size_t matches = 0;
  std::size_t total = 0;
  std::size_t out_of_lexicon = 0;
};

// Fraction of proposed substitutions agreeing with the gold lexicon.
// Tokens without a lexicon entry count as non-matches and are flagged in the
// stats.
double substitution_precision(std::span<const TokenSubstitution> proposals,
                              const GoldLexicon& lexicon, const Tokenizer& tokenizer,
                              PrecisionStats* stats = nullptr);

}  // namespace salt
