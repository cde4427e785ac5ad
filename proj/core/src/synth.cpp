#include "salt/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "salt/errors.hpp"
#include "salt/rng.hpp"

namespace salt {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kFunctionWords = {"the", "a", "is", "and"};
constexpr const char* kPeriod = ".";

std::string language_code(std::size_t i) {
  // aa, bb, cc, ... then az, bz, ... keeps codes two lowercase letters.
  const char first = static_cast<char>('a' + i % 26);
  const char second = static_cast<char>('a' + (i / 26) % 26);
  return std::string{first, static_cast<char>(second == 'a' && i < 26 ? first : second)};
}

// Pronounceable pseudo-words, unique across all languages.
std::string make_word(Rng& rng, std::set<std::string>& used) {
  static const std::string consonants = "bdfgklmnprstvz";
  static const std::string vowels = "aeiou";
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const std::size_t syllables = 2 + (rng.uniform() < 0.3 ? 1 : 0);
    std::string word;
    for (std::size_t s = 0; s < syllables; ++s) {
      word += consonants[rng.uniform_index(consonants.size())];
      word += vowels[rng.uniform_index(vowels.size())];
    }
    if (used.insert(word).second) return word;
  }
  throw ConfigError("vocabulary too large: cannot generate enough distinct surface forms");
}

struct LanguageInventory {
  // surface forms per concept, for each language
  std::vector<std::vector<std::string>> nouns;       // [language][concept]
  std::vector<std::vector<std::string>> attributes;  // [language][concept]
};

std::string join_words(std::span<const std::string> words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// Sampled at the concept level so one draw realizes consistently in every
// language.
struct SentencePlan {
  int template_id = 0;
  std::size_t noun = 0;
  std::vector<std::size_t> attrs;
};

std::string realize(const SentencePlan& plan, const LanguageInventory& inventory,
                    std::size_t language) {
  const auto& noun = inventory.nouns[language][plan.noun];
  const auto& attrs = inventory.attributes[language];
  std::vector<std::string> words;
  switch (plan.template_id) {
    case 0:
      words = {"the", noun, "is", attrs[plan.attrs[0]], kPeriod};
      break;
    case 1:
      words = {"the", noun, "is", attrs[plan.attrs[0]], "and", attrs[plan.attrs[1]], kPeriod};
      break;
    default:
      words = {"a", noun, "is", attrs[plan.attrs[0]], kPeriod};
      break;
  }
  return join_words(words);
}

std::vector<std::size_t> sample_attr_subset(Rng& rng, std::span<const std::size_t> pool,
                                            std::size_t count) {
  std::vector<std::size_t> shuffled(pool.begin(), pool.end());
  rng.shuffle(shuffled);
  shuffled.resize(count);
  return shuffled;
}

}  // namespace

void SyntheticLanguageSpec::validate() const {
  if (n_languages < 2) throw ConfigError("testbed needs at least two languages");
  if (noun_count == 0 || attribute_count == 0) {
    throw ConfigError("testbed needs nonempty content vocabulary");
  }
  if (attributes_per_noun < 3) {
    throw ConfigError("attributes_per_noun must be >= 3 (premise states two, "
                      "neutral needs an unstated compatible attribute)");
  }
  if (attributes_per_noun >= attribute_count) {
    throw ConfigError("attributes_per_noun must leave at least one incompatible "
                      "attribute per noun");
  }
  if (cognate_noun_fraction < 0.0 || cognate_noun_fraction >= 1.0) {
    throw ConfigError("cognate_noun_fraction must lie in [0, 1)");
  }
  if (mlm_sentences_per_language == 0) throw ConfigError("empty pretraining corpus");
  if (train_examples == 0 || dev_examples == 0 || test_examples == 0) {
    throw ConfigError("task splits must be nonempty");
  }
  // make_word capacity: 14 consonants x 5 vowels, 2-3 syllables.
  const std::size_t demand = n_languages * (noun_count + attribute_count);
  if (demand > 4000) {
    throw ConfigError("content vocabulary too large for distinct surface forms");
  }
}

const std::map<std::string, std::string>& GoldLexicon::map_for(
    const std::string& language) const {
  const auto it = word_maps.find(language);
  if (it == word_maps.end()) {
    throw InputError("gold lexicon has no entry for language '" + language + "'");
  }
  return it->second;
}

SynthCorpus generate_corpus(const SyntheticLanguageSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, 0x5EED));

  SynthCorpus corpus;
  corpus.spec = spec;
  for (std::size_t i = 0; i < spec.n_languages; ++i) {
    corpus.languages.push_back(language_code(i));
  }

  // Surface forms. A cognate noun concept keeps one surface form everywhere,
  // the rest get a distinct word per language.
  LanguageInventory inventory;
  std::set<std::string> used(kFunctionWords.begin(), kFunctionWords.end());
  used.insert(kPeriod);
  inventory.nouns.assign(spec.n_languages, std::vector<std::string>(spec.noun_count));
  inventory.attributes.assign(spec.n_languages,
                              std::vector<std::string>(spec.attribute_count));
  for (std::size_t c = 0; c < spec.noun_count; ++c) {
    if (rng.uniform() < spec.cognate_noun_fraction) {
      const std::string word = make_word(rng, used);
      for (std::size_t lang = 0; lang < spec.n_languages; ++lang) {
        inventory.nouns[lang][c] = word;
      }
    } else {
      for (std::size_t lang = 0; lang < spec.n_languages; ++lang) {
        inventory.nouns[lang][c] = make_word(rng, used);
      }
    }
  }
  for (std::size_t c = 0; c < spec.attribute_count; ++c) {
    for (std::size_t lang = 0; lang < spec.n_languages; ++lang) {
      inventory.attributes[lang][c] = make_word(rng, used);
    }
  }

  // Tokenizer over every distinct surface form; all corpus words are single
  // tokens.
  std::vector<std::string> vocab(kFunctionWords.begin(), kFunctionWords.end());
  vocab.push_back(kPeriod);
  std::set<std::string> in_vocab(vocab.begin(), vocab.end());
  for (std::size_t lang = 0; lang < spec.n_languages; ++lang) {
    for (const auto& w : inventory.nouns[lang]) {
      if (in_vocab.insert(w).second) vocab.push_back(w);
    }
    for (const auto& w : inventory.attributes[lang]) {
      if (in_vocab.insert(w).second) vocab.push_back(w);
    }
  }
  corpus.tokenizer = Tokenizer::from_vocabulary(vocab);

  // Gold lexicon: ciphered content words plus identity on shared words.
  corpus.lexicon.source_language = corpus.languages.front();
  for (std::size_t lang = 1; lang < spec.n_languages; ++lang) {
    auto& map = corpus.lexicon.word_maps[corpus.languages[lang]];
    for (std::size_t c = 0; c < spec.noun_count; ++c) {
      map[inventory.nouns[0][c]] = inventory.nouns[lang][c];
    }
    for (std::size_t c = 0; c < spec.attribute_count; ++c) {
      map[inventory.attributes[0][c]] = inventory.attributes[lang][c];
    }
    for (const auto& w : kFunctionWords) map[w] = w;
    map[kPeriod] = kPeriod;
  }

  // Noun -> compatible attribute subset. Compatibility sets are the
  // distributional signature that identifies a concept across languages, so
  // they must be pairwise distinct.
  std::vector<std::size_t> all_attrs(spec.attribute_count);
  std::iota(all_attrs.begin(), all_attrs.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> compatible(spec.noun_count);
  std::vector<std::vector<std::size_t>> incompatible(spec.noun_count);
  std::set<std::vector<std::size_t>> signatures;
  for (std::size_t n = 0; n < spec.noun_count; ++n) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1000) {
        throw ConfigError("cannot assign distinct attribute signatures; "
                          "increase attribute_count");
      }
      std::vector<std::size_t> shuffled = all_attrs;
      rng.shuffle(shuffled);
      std::vector<std::size_t> signature(
          shuffled.begin(), shuffled.begin() + static_cast<long>(spec.attributes_per_noun));
      std::vector<std::size_t> sorted = signature;
      std::sort(sorted.begin(), sorted.end());
      if (!signatures.insert(sorted).second) continue;
      compatible[n] = std::move(signature);
      incompatible[n].assign(shuffled.begin() + static_cast<long>(spec.attributes_per_noun),
                             shuffled.end());
      break;
    }
  }

  // Parallel pretraining corpora.
  for (std::size_t s = 0; s < spec.mlm_sentences_per_language; ++s) {
    SentencePlan plan;
    const double roll = rng.uniform();
    plan.template_id = roll < 0.4 ? 0 : (roll < 0.8 ? 1 : 2);
    plan.noun = rng.uniform_index(spec.noun_count);
    plan.attrs = sample_attr_subset(rng, compatible[plan.noun],
                                    plan.template_id == 1 ? 2 : 1);
    for (std::size_t lang = 0; lang < spec.n_languages; ++lang) {
      corpus.mlm_sentences[corpus.languages[lang]].push_back(
          realize(plan, inventory, lang));
    }
  }

  // Task data. Premise states two compatible attributes; the hypothesis
  // restates one (entailment), names an unstated compatible one (neutral),
  // or names an incompatible one (contradiction).
  auto make_examples = [&](std::size_t count, int index_base,
                           auto&& emit) {
    for (std::size_t i = 0; i < count; ++i) {
      const int label = static_cast<int>(i % 3);
      const std::size_t noun = rng.uniform_index(spec.noun_count);
      const auto premise_attrs = sample_attr_subset(rng, compatible[noun], 2);
      std::size_t hyp_attr = 0;
      if (label == 0) {
        hyp_attr = premise_attrs[rng.uniform_index(2)];
      } else if (label == 1) {
        std::vector<std::size_t> unstated;
        for (const std::size_t a : compatible[noun]) {
          if (a != premise_attrs[0] && a != premise_attrs[1]) unstated.push_back(a);
        }
        hyp_attr = unstated[rng.uniform_index(unstated.size())];
      } else {
        hyp_attr = incompatible[noun][rng.uniform_index(incompatible[noun].size())];
      }
      SentencePlan premise{1, noun, {premise_attrs[0], premise_attrs[1]}};
      SentencePlan hypothesis{0, noun, {hyp_attr}};
      emit(static_cast<int>(i) + index_base, label, premise, hypothesis);
    }
  };

  const auto& source = corpus.languages.front();
  make_examples(spec.train_examples, 0, [&](int index, int label, const SentencePlan& p,
                                            const SentencePlan& h) {
    corpus.train.push_back({index, source, realize(p, inventory, 0),
                            realize(h, inventory, 0), label});
  });
  make_examples(spec.dev_examples, 0, [&](int index, int label, const SentencePlan& p,
                                          const SentencePlan& h) {
    corpus.dev.push_back({index, source, realize(p, inventory, 0),
                          realize(h, inventory, 0), label});
  });
  make_examples(spec.test_examples, 0, [&](int index, int label, const SentencePlan& p,
                                           const SentencePlan& h) {
    for (std::size_t lang = 0; lang < spec.n_languages; ++lang) {
      corpus.test[corpus.languages[lang]].push_back(
          {index, corpus.languages[lang], realize(p, inventory, lang),
           realize(h, inventory, lang), label});
    }
  });

  // Frequency lists: the language's own content words by corpus frequency.
  // Function words and punctuation are shared by every language, hence
  // distinctive of none, and stay out of the per-language lists.
  for (std::size_t lang = 0; lang < spec.n_languages; ++lang) {
    std::set<std::string> own_words(inventory.nouns[lang].begin(),
                                    inventory.nouns[lang].end());
    own_words.insert(inventory.attributes[lang].begin(), inventory.attributes[lang].end());
    const auto& language = corpus.languages[lang];
    std::map<std::string, std::size_t> counts;
    for (const auto& sentence : corpus.mlm_sentences.at(language)) {
      const auto text = corpus.tokenizer.encode(sentence);
      for (const int id : text.ids) {
        const std::string& word = corpus.tokenizer.id_to_token(id);
        if (own_words.count(word)) ++counts[word];
      }
    }
    std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& lhs, const auto& rhs) {
      return lhs.second != rhs.second ? lhs.second > rhs.second : lhs.first < rhs.first;
    });
    auto& words = corpus.frequency_words[language];
    for (const auto& [word, count] : sorted) words.push_back(word);
  }

  return corpus;
}

std::string lexicon_to_json(const GoldLexicon& lexicon) {
  nlohmann::json j;
  j["source_language"] = lexicon.source_language;
  j["word_maps"] = lexicon.word_maps;
  return j.dump(2);
}

GoldLexicon lexicon_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  GoldLexicon lexicon;
  lexicon.source_language = j.at("source_language").get<std::string>();
  lexicon.word_maps =
      j.at("word_maps")
          .get<std::map<std::string, std::map<std::string, std::string>>>();
  return lexicon;
}

void save_corpus(const SynthCorpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);

  {
    nlohmann::json j;
    j["noun_count"] = corpus.spec.noun_count;
    j["attribute_count"] = corpus.spec.attribute_count;
    j["attributes_per_noun"] = corpus.spec.attributes_per_noun;
    j["n_languages"] = corpus.spec.n_languages;
    j["cognate_noun_fraction"] = corpus.spec.cognate_noun_fraction;
    j["mlm_sentences_per_language"] = corpus.spec.mlm_sentences_per_language;
    j["train_examples"] = corpus.spec.train_examples;
    j["dev_examples"] = corpus.spec.dev_examples;
    j["test_examples"] = corpus.spec.test_examples;
    j["seed"] = corpus.spec.seed;
    j["languages"] = corpus.languages;
    std::ofstream out(base / "spec.json");
    out << j.dump(2) << '\n';
  }
  {
    std::ofstream out(base / "tokenizer.json");
    out << corpus.tokenizer.to_json() << '\n';
  }
  {
    std::ofstream out(base / "lexicon.json");
    out << lexicon_to_json(corpus.lexicon) << '\n';
  }
  for (const auto& [language, sentences] : corpus.mlm_sentences) {
    std::ofstream out(base / ("corpus_" + language + ".jsonl"));
    for (const auto& sentence : sentences) {
      out << nlohmann::json{{"text", sentence}}.dump() << '\n';
    }
  }
  save_task_examples(corpus.train, (base / ("train_" + corpus.source_language() + ".jsonl")).string());
  save_task_examples(corpus.dev, (base / ("dev_" + corpus.source_language() + ".jsonl")).string());
  for (const auto& [language, examples] : corpus.test) {
    save_task_examples(examples, (base / ("test_" + language + ".jsonl")).string());
  }
  for (const auto& [language, words] : corpus.frequency_words) {
    std::ofstream out(base / ("freq_" + language + ".txt"));
    for (const auto& word : words) out << word << '\n';
  }
}

SynthCorpus load_corpus(const std::string& dir) {
  const fs::path base(dir);
  if (!fs::is_directory(base)) throw InputError("'" + dir + "' is not a directory");

  SynthCorpus corpus;
  {
    std::ifstream in(base / "spec.json");
    if (!in.is_open()) throw InputError("missing spec.json in '" + dir + "'");
    nlohmann::json j = nlohmann::json::parse(in);
    corpus.spec.noun_count = j.at("noun_count").get<std::size_t>();
    corpus.spec.attribute_count = j.at("attribute_count").get<std::size_t>();
    corpus.spec.attributes_per_noun = j.at("attributes_per_noun").get<std::size_t>();
    corpus.spec.n_languages = j.at("n_languages").get<std::size_t>();
    corpus.spec.cognate_noun_fraction = j.at("cognate_noun_fraction").get<double>();
    corpus.spec.mlm_sentences_per_language =
        j.at("mlm_sentences_per_language").get<std::size_t>();
    corpus.spec.train_examples = j.at("train_examples").get<std::size_t>();
    corpus.spec.dev_examples = j.at("dev_examples").get<std::size_t>();
    corpus.spec.test_examples = j.at("test_examples").get<std::size_t>();
    corpus.spec.seed = j.at("seed").get<std::uint64_t>();
    corpus.languages = j.at("languages").get<std::vector<std::string>>();
  }
  {
    std::ifstream in(base / "tokenizer.json");
    if (!in.is_open()) throw InputError("missing tokenizer.json in '" + dir + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    corpus.tokenizer = Tokenizer::from_json(text);
  }
  {
    std::ifstream in(base / "lexicon.json");
    if (!in.is_open()) throw InputError("missing lexicon.json in '" + dir + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    corpus.lexicon = lexicon_from_json(text);
  }
  for (const auto& language : corpus.languages) {
    const fs::path path = base / ("corpus_" + language + ".jsonl");
    for (const auto& line : read_lines(path.string())) {
      corpus.mlm_sentences[language].push_back(
          nlohmann::json::parse(line).at("text").get<std::string>());
    }
  }
  corpus.train = load_task_examples(
      (base / ("train_" + corpus.source_language() + ".jsonl")).string());
  corpus.dev = load_task_examples(
      (base / ("dev_" + corpus.source_language() + ".jsonl")).string());
  for (const auto& language : corpus.languages) {
    corpus.test[language] =
        load_task_examples((base / ("test_" + language + ".jsonl")).string());
  }
  for (const auto& language : corpus.languages) {
    const fs::path path = base / ("freq_" + language + ".txt");
    std::ifstream in(path);
    if (!in.is_open()) throw InputError("missing " + path.string());
    std::string word;
    while (std::getline(in, word)) {
      if (!word.empty()) corpus.frequency_words[language].push_back(word);
    }
  }
  return corpus;
}

PretrainOutput pretrain_toy(const SynthCorpus& corpus, const PretrainConfig& config) {
  if (config.epochs == 0 || config.batch_size == 0) {
    throw ConfigError("pretraining epochs and batch size must be positive");
  }
  if (!(config.mask_probability > 0.0) || config.mask_probability >= 1.0) {
    throw ConfigError("mask probability must lie in (0, 1)");
  }
  if (config.mask_fraction < 0.0 || config.random_fraction < 0.0 ||
      config.mask_fraction + config.random_fraction > 1.0) {
    throw ConfigError("mask/random fractions must be nonnegative and sum to at most 1");
  }

  ToyTransformer::Config model_config = config.model;
  model_config.init_seed = config.seed;
  PretrainOutput output;
  output.model = std::make_unique<ToyTransformer>(corpus.tokenizer, model_config);
  ToyTransformer& model = *output.model;

  // Tokenize the pooled corpus once.
  std::vector<std::vector<int>> sentences;
  for (const auto& language : corpus.languages) {
    for (const auto& sentence : corpus.mlm_sentences.at(language)) {
      auto text = corpus.tokenizer.encode(sentence);
      if (text.size() == 0 || text.size() > model.max_sequence_length()) {
        throw DataError("pretraining sentence length unsupported: '" + sentence + "'");
      }
      sentences.push_back(std::move(text.ids));
    }
  }

  const int mask_id = corpus.tokenizer.mask_id();
  const auto vocab = static_cast<int>(corpus.tokenizer.vocab_size());
  const int first_regular = corpus.tokenizer.mask_id() + 1;

  nn::AdamOptimizer optimizer(model.parameters(), config.learning_rate);
  Rng rng(derive_seed(config.seed, 0x3A5C));

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order(sentences.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t loss_terms = 0;
    optimizer.zero_grad();
    std::size_t in_batch = 0;
    const double inv_batch = 1.0 / static_cast<double>(config.batch_size);

    for (const std::size_t idx : order) {
      const std::vector<int>& original = sentences[idx];
      std::vector<int> corrupted = original;
      std::vector<int> loss_positions;
      for (std::size_t i = 0; i < original.size(); ++i) {
        if (rng.uniform() >= config.mask_probability) continue;
        loss_positions.push_back(static_cast<int>(i));
        const double roll = rng.uniform();
        if (roll < config.mask_fraction) {
          corrupted[i] = mask_id;
        } else if (roll < config.mask_fraction + config.random_fraction) {
          corrupted[i] = first_regular +
                         static_cast<int>(rng.uniform_index(
                             static_cast<std::size_t>(vocab - first_regular)));
        }  // else keep the original token
      }
      if (loss_positions.empty()) {
        const std::size_t i = rng.uniform_index(original.size());
        loss_positions.push_back(static_cast<int>(i));
        corrupted[i] = mask_id;
      }

      const std::vector<int> segments(corrupted.size(), 0);
      ToyTransformer::EncoderCache cache;
      const nn::Matrix hidden = model.encode(model.lookup_rows(corrupted), segments, &cache);

      nn::Matrix hidden_sel(static_cast<Eigen::Index>(loss_positions.size()), hidden.cols());
      std::vector<int> targets;
      for (std::size_t k = 0; k < loss_positions.size(); ++k) {
        hidden_sel.row(static_cast<Eigen::Index>(k)) = hidden.row(loss_positions[k]);
        targets.push_back(original[static_cast<std::size_t>(loss_positions[k])]);
      }

      const nn::Matrix logits = model.mlm_logits(hidden_sel);
      nn::Matrix grad_logits;
      const double loss = nn::softmax_cross_entropy(logits, targets, &grad_logits);
      if (!std::isfinite(loss)) {
        throw InternalError("masked-LM pretraining diverged (non-finite loss)");
      }
      epoch_loss += loss;
      ++loss_terms;

      const nn::Matrix grad_hidden_sel =
          model.mlm_logits_backward(grad_logits * inv_batch, hidden_sel);
      nn::Matrix grad_hidden = nn::Matrix::Zero(hidden.rows(), hidden.cols());
      for (std::size_t k = 0; k < loss_positions.size(); ++k) {
        grad_hidden.row(loss_positions[k]) = grad_hidden_sel.row(static_cast<Eigen::Index>(k));
      }
      const nn::Matrix grad_rows = model.encode_backward(grad_hidden, cache);
      for (Eigen::Index i = 0; i < grad_rows.rows(); ++i) {
        model.accumulate_token_grad(corrupted[static_cast<std::size_t>(i)], grad_rows.row(i));
      }

      if (++in_batch == config.batch_size) {
        optimizer.step();
        optimizer.zero_grad();
        in_batch = 0;
      }
    }
    if (in_batch > 0) {
      optimizer.step();
      optimizer.zero_grad();
    }
    output.epoch_losses.push_back(epoch_loss / static_cast<double>(loss_terms));
  }
  return output;
}

double gold_top_k_accuracy(const Scorer& scorer, const SynthCorpus& corpus,
                           const std::string& target_language,
                           const VocabularySet& target_set, std::size_t k,
                           std::size_t max_sentences) {
  const auto& gold = corpus.lexicon.map_for(target_language);
  const auto& tokenizer = scorer.tokenizer();
  const auto& sentences = corpus.mlm_sentences.at(corpus.source_language());

  std::size_t hits = 0, total = 0;
  const std::size_t n = std::min(max_sentences, sentences.size());
  for (std::size_t s = 0; s < n; ++s) {
    const auto text = tokenizer.encode(sentences[s]);
    const auto flags = substitutable_positions(text, tokenizer);
    const auto distributions = scorer.score_positions(text.ids);
    for (const auto& dist : distributions) {
      if (!flags[dist.position]) continue;
      const std::string& word = tokenizer.id_to_token(text.ids[dist.position]);
      const auto it = gold.find(word);
      if (it == gold.end() || it->second == word) continue;  // content words only
      const int gold_id = tokenizer.token_to_id(it->second);
      if (gold_id < 0) continue;

      // Rank of the gold counterpart inside the restricted candidate set.
      const double gold_prob = dist.probs(gold_id);
      std::size_t better = 0;
      for (const int candidate : target_set.token_ids) {
        if (candidate != gold_id && dist.probs(candidate) > gold_prob) ++better;
      }
      if (better < k) ++hits;
      ++total;
    }
  }
  if (total == 0) throw InternalError("no content positions found for gold evaluation");
  return static_cast<double>(hits) / static_cast<double>(total);
}

double substitution_precision(std::span<const TokenSubstitution> proposals,
                              const GoldLexicon& lexicon, const Tokenizer& tokenizer,
                              PrecisionStats* stats) {
  PrecisionStats local;
  for (const auto& sub : proposals) {
    const auto& map = lexicon.map_for(sub.language);
    ++local.total;
    const std::string& original = tokenizer.id_to_token(sub.original_id);
    const std::string& substituted = tokenizer.id_to_token(sub.substituted_id);
    const auto it = map.find(original);
    if (it == map.end()) {
      ++local.out_of_lexicon;
      continue;
    }
    if (it->second == substituted) ++local.matches;
  }
  if (stats != nullptr) *stats = local;
  if (local.total == 0) return 0.0;
  return static_cast<double>(local.matches) / static_cast<double>(local.total);
}

}  // namespace salt
