#include "salt/codeswitch.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "salt/errors.hpp"

namespace salt {

namespace fs = std::filesystem;

void AugmentationConfig::validate() const {
  if (target_languages.empty()) {
    throw ConfigError("augmentation requires at least one target language");
  }
  for (const double t : {synonym_threshold, crosslingual_threshold}) {
    if (!(t > 0.0) || t > 1.0) {
      throw ConfigError("substitution thresholds must lie in (0, 1]");
    }
  }
}

std::vector<bool> substitutable_positions(const TokenizedText& text,
                                          const Tokenizer& tokenizer) {
  std::vector<bool> ok(text.size(), false);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const int id = text.ids[i];
    if (tokenizer.is_special(id)) continue;
    if (text.continuation[i]) continue;
    // A word whose pieces continue past this position is multi-piece; its
    // head piece is not substitutable either.
    if (i + 1 < text.size() && text.continuation[i + 1]) continue;
    if (is_punctuation_token(tokenizer.id_to_token(id))) continue;
    ok[i] = true;
  }
  return ok;
}

std::vector<TokenSubstitution> propose_substitutions(
    std::span<const int> token_ids, const VocabularySet& vocab_set, double threshold,
    std::span<const PositionDistribution> distributions,
    const std::vector<bool>& substitutable) {
  if (vocab_set.empty()) throw InternalError("vocabulary set is empty");
  if (substitutable.size() != token_ids.size()) {
    throw InternalError("substitutable flags misaligned with token sequence");
  }

  std::vector<TokenSubstitution> subs;
  for (const auto& dist : distributions) {
    if (dist.position >= token_ids.size()) {
      throw InternalError("distribution position out of range");
    }
    if (dist.probs.size() == 0) throw InternalError("empty distribution");
    if (!substitutable[dist.position]) continue;

    const int original = token_ids[dist.position];
    int best_id = -1;
    double best_prob = -1.0;
    for (const int candidate : vocab_set.token_ids) {
      if (candidate == original) continue;
      if (candidate < 0 || candidate >= dist.probs.size()) {
        throw InternalError("vocabulary id outside the scored distribution");
      }
      const double p = dist.probs(candidate);
      if (p > best_prob) {
        best_prob = p;
        best_id = candidate;
      }
    }
    if (best_id >= 0 && best_prob >= threshold) {
      TokenSubstitution sub;
      sub.position = dist.position;
      sub.original_id = original;
      sub.substituted_id = best_id;
      sub.probability = best_prob;
      sub.language = vocab_set.language;
      subs.push_back(std::move(sub));
    }
  }
  return subs;
}

std::vector<int> apply_substitutions(std::span<const int> token_ids,
                                     std::span<const TokenSubstitution> subs) {
  std::vector<int> out(token_ids.begin(), token_ids.end());
  std::vector<bool> seen(token_ids.size(), false);
  for (const auto& sub : subs) {
    if (sub.position >= out.size()) {
      throw InputError("substitution position " + std::to_string(sub.position) +
                       " out of range");
    }
    if (seen[sub.position]) {
      throw InputError("duplicate substitution position " + std::to_string(sub.position));
    }
    seen[sub.position] = true;
    out[sub.position] = sub.substituted_id;
  }
  return out;
}

namespace {

struct ScoredSentence {
  TokenizedText text;
  std::vector<bool> substitutable;
  std::vector<PositionDistribution> distributions;
};

ScoredSentence score_sentence(const std::string& sentence, const Scorer& scorer) {
  ScoredSentence s;
  s.text = scorer.tokenizer().encode(sentence);
  if (s.text.size() == 0) {
    throw DataError("sentence tokenizes to an empty sequence: '" + sentence + "'");
  }
  s.substitutable = substitutable_positions(s.text, scorer.tokenizer());
  s.distributions = scorer.score_positions(s.text.ids);
  return s;
}

}  // namespace

std::vector<AugmentedExample> augment_example(
    const TaskExample& example, const AugmentationConfig& config, const Scorer& scorer,
    const std::map<std::string, VocabularySet>& vocab_sets) {
  config.validate();

  // Both sentences are scored once; every language reuses the distributions.
  const ScoredSentence sent_a = score_sentence(example.sentence_a, scorer);
  const ScoredSentence sent_b = score_sentence(example.sentence_b, scorer);

  std::vector<AugmentedExample> out;
  out.reserve(config.target_languages.size());
  for (const auto& language : config.target_languages) {
    const auto it = vocab_sets.find(language);
    if (it == vocab_sets.end()) {
      throw ConfigError("no vocabulary set for target language '" + language + "'");
    }
    const VocabularySet& vocab = it->second;
    if (vocab.empty()) {
      throw ConfigError("vocabulary set for language '" + language + "' is empty");
    }
    const bool synonym_mode = language == example.language;
    const double threshold =
        synonym_mode ? config.synonym_threshold : config.crosslingual_threshold;

    AugmentedExample aug;
    aug.source_index = example.index;
    aug.language = language;
    aug.label = example.label;
    aug.substitutions_a = propose_substitutions(sent_a.text.ids, vocab, threshold,
                                                sent_a.distributions, sent_a.substitutable);
    aug.substitutions_b = propose_substitutions(sent_b.text.ids, vocab, threshold,
                                                sent_b.distributions, sent_b.substitutable);
    aug.tokens_a = apply_substitutions(sent_a.text.ids, aug.substitutions_a);
    aug.tokens_b = apply_substitutions(sent_b.text.ids, aug.substitutions_b);
    out.push_back(std::move(aug));
  }
  return out;
}

namespace {

nlohmann::json substitutions_to_json(const std::vector<TokenSubstitution>& subs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& sub : subs) {
    arr.push_back({{"pos", sub.position},
                   {"orig", sub.original_id},
                   {"sub", sub.substituted_id},
                   {"prob", sub.probability}});
  }
  return arr;
}

std::vector<TokenSubstitution> substitutions_from_json(const nlohmann::json& arr,
                                                       const std::string& language) {
  std::vector<TokenSubstitution> subs;
  for (const auto& e : arr) {
    TokenSubstitution sub;
    sub.position = e.at("pos").get<std::size_t>();
    sub.original_id = e.at("orig").get<int>();
    sub.substituted_id = e.at("sub").get<int>();
    sub.probability = e.at("prob").get<double>();
    sub.language = language;
    subs.push_back(std::move(sub));
  }
  return subs;
}

}  // namespace

std::string augmented_example_to_json(const AugmentedExample& ex) {
  nlohmann::json j;
  j["source_index"] = ex.source_index;
  j["language"] = ex.language;
  j["tokens_a"] = ex.tokens_a;
  j["tokens_b"] = ex.tokens_b;
  j["substitutions"] = {{"a", substitutions_to_json(ex.substitutions_a)},
                        {"b", substitutions_to_json(ex.substitutions_b)}};
  j["label"] = ex.label;
  return j.dump();
}

AugmentedExample augmented_example_from_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed augmented record: ") + e.what());
  }
  AugmentedExample ex;
  ex.source_index = j.at("source_index").get<int>();
  ex.language = j.at("language").get<std::string>();
  ex.tokens_a = j.at("tokens_a").get<std::vector<int>>();
  ex.tokens_b = j.at("tokens_b").get<std::vector<int>>();
  ex.substitutions_a = substitutions_from_json(j.at("substitutions").at("a"), ex.language);
  ex.substitutions_b = substitutions_from_json(j.at("substitutions").at("b"), ex.language);
  ex.label = j.at("label").get<int>();
  return ex;
}

std::vector<AugmentedExample> load_augmented_examples(const std::string& path) {
  std::vector<AugmentedExample> out;
  for (const auto& line : read_lines(path)) {
    out.push_back(augmented_example_from_json(line));
  }
  return out;
}

std::string manifest_to_json(const AugmentationManifest& manifest) {
  nlohmann::json j;
  j["source_examples"] = manifest.source_examples;
  j["augmented_examples"] = manifest.augmented_examples;
  j["synonym_threshold"] = manifest.synonym_threshold;
  j["crosslingual_threshold"] = manifest.crosslingual_threshold;
  j["seed"] = manifest.seed;
  nlohmann::json langs = nlohmann::json::object();
  for (const auto& [lang, stats] : manifest.per_language) {
    langs[lang] = {{"examples", stats.examples},
                   {"substitutions", stats.substitutions},
                   {"substitutable_positions", stats.substitutable_positions},
                   {"substitution_rate", stats.substitution_rate}};
  }
  j["languages"] = langs;
  return j.dump(2);
}

AugmentationManifest augment_dataset(std::span<const TaskExample> dataset,
                                     const AugmentationConfig& config,
                                     const Scorer& scorer,
                                     const std::map<std::string, VocabularySet>& vocab_sets,
                                     const std::string& out_dir) {
  if (dataset.empty()) throw InputError("dataset is empty");
  config.validate();
  fs::create_directories(out_dir);

  const fs::path data_tmp = fs::path(out_dir) / "augmented.jsonl.tmp";
  const fs::path data_path = fs::path(out_dir) / "augmented.jsonl";
  const fs::path manifest_tmp = fs::path(out_dir) / "manifest.json.tmp";
  const fs::path manifest_path = fs::path(out_dir) / "manifest.json";

  AugmentationManifest manifest;
  manifest.source_examples = dataset.size();
  manifest.synonym_threshold = config.synonym_threshold;
  manifest.crosslingual_threshold = config.crosslingual_threshold;
  manifest.seed = config.seed;

  try {
    std::ofstream out(data_tmp);
    if (!out.is_open()) throw InputError("cannot write '" + data_tmp.string() + "'");

    for (const auto& example : dataset) {
      const auto augmented = augment_example(example, config, scorer, vocab_sets);
      std::size_t eligible = 0;
      for (const auto& sentence : {example.sentence_a, example.sentence_b}) {
        const auto text = scorer.tokenizer().encode(sentence);
        const auto flags = substitutable_positions(text, scorer.tokenizer());
        eligible += static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
      }
      for (const auto& aug : augmented) {
        auto& stats = manifest.per_language[aug.language];
        stats.examples += 1;
        stats.substitutions += aug.substitutions_a.size() + aug.substitutions_b.size();
        stats.substitutable_positions += eligible;
        out << augmented_example_to_json(aug) << '\n';
        ++manifest.augmented_examples;
      }
    }
    out.close();
    if (!out.good()) throw InputError("failed writing '" + data_tmp.string() + "'");

    for (auto& [lang, stats] : manifest.per_language) {
      stats.substitution_rate =
          stats.substitutable_positions == 0
              ? 0.0
              : static_cast<double>(stats.substitutions) /
                    static_cast<double>(stats.substitutable_positions);
    }

    std::ofstream mout(manifest_tmp);
    if (!mout.is_open()) throw InputError("cannot write '" + manifest_tmp.string() + "'");
    mout << manifest_to_json(manifest) << '\n';
    mout.close();
    if (!mout.good()) throw InputError("failed writing '" + manifest_tmp.string() + "'");

    fs::rename(data_tmp, data_path);
    fs::rename(manifest_tmp, manifest_path);
  } catch (...) {
    std::error_code ec;
    fs::remove(data_tmp, ec);
    fs::remove(manifest_tmp, ec);
    throw;
  }
  return manifest;
}

}  // namespace salt
