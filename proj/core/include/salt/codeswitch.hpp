#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "salt/data.hpp"
#include "salt/scorer.hpp"
#include "salt/vocab.hpp"

namespace salt {

// One accepted substitution: the restricted-argmax token for a position,
// with its raw full-vocabulary probability.
struct TokenSubstitution {
  std::size_t position = 0;
  int original_id = 0;
  int substituted_id = 0;
  double probability = 0.0;
  std::string language;
};

// A code-switched copy of one TaskExample. Substitution is strictly 1:1, so
// both token sequences keep the source tokenization's length, and the label
// is carried over unchanged.
struct AugmentedExample {
  int source_index = 0;
  std::string language;
  std::vector<int> tokens_a;
  std::vector<int> tokens_b;
  std::vector<TokenSubstitution> substitutions_a;
  std::vector<TokenSubstitution> substitutions_b;
  int label = 0;
};

struct AugmentationConfig {
  // Source language first by convention; augmenting into the example's own
  // language performs synonym replacement under synonym_threshold, every
  // other language uses crosslingual_threshold.
  std::vector<std::string> target_languages = {"en", "fr", "es", "de"};
  double synonym_threshold = 1e-3;
  double crosslingual_threshold = 1e-7;
  std::uint64_t seed = 0;

  void validate() const;
};

// Positions eligible for substitution: special tokens, punctuation-only
// tokens and word-internal continuation pieces are excluded.
std::vector<bool> substitutable_positions(const TokenizedText& text,
                                          const Tokenizer& tokenizer);

// For each substitutable position, the argmax of the distribution restricted
// to vocab_set minus the original token; emitted iff its raw probability
// clears the threshold.
std::vector<TokenSubstitution> propose_substitutions(
    std::span<const int> token_ids, const VocabularySet& vocab_set, double threshold,
    std::span<const PositionDistribution> distributions,
    const std::vector<bool>& substitutable);

// output[i] = substitution at i when present, else token_ids[i].
std::vector<int> apply_substitutions(std::span<const int> token_ids,
                                     std::span<const TokenSubstitution> subs);

// One AugmentedExample per configured language; each sentence of the pair is
// scored and substituted independently, all above-threshold substitutions
// applied.
std::vector<AugmentedExample> augment_example(
    const TaskExample& example, const AugmentationConfig& config, const Scorer& scorer,
    const std::map<std::string, VocabularySet>& vocab_sets);

struct LanguageAugmentationStats {
  std::size_t examples = 0;
  std::size_t substitutions = 0;
  std::size_t substitutable_positions = 0;
  double substitution_rate = 0.0;
};

struct AugmentationManifest {
  std::map<std::string, LanguageAugmentationStats> per_language;
  std::size_t source_examples = 0;
  std::size_t augmented_examples = 0;
  double synonym_threshold = 0.0;
  double crosslingual_threshold = 0.0;
  std::uint64_t seed = 0;
};

// Writes <out_dir>/augmented.jsonl and <out_dir>/manifest.json. Output is a
// pure function of inputs; rerunning with the same data and seed produces
// byte-identical files. Partial output is removed on failure.
AugmentationManifest augment_dataset(std::span<const TaskExample> dataset,
                                     const AugmentationConfig& config,
                                     const Scorer& scorer,
                                     const std::map<std::string, VocabularySet>& vocab_sets,
                                     const std::string& out_dir);

std::string augmented_example_to_json(const AugmentedExample& ex);
AugmentedExample augmented_example_from_json(const std::string& line);
std::vector<AugmentedExample> load_augmented_examples(const std::string& path);
std::string manifest_to_json(const AugmentationManifest& manifest);

}  // namespace salt
