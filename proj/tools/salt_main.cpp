#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "salt/checkpoint.hpp"
#include "salt/codeswitch.hpp"
#include "salt/config.hpp"
#include "salt/data.hpp"
#include "salt/e2e.hpp"
#include "salt/errors.hpp"
#include "salt/eval.hpp"
#include "salt/synth.hpp"
#include "salt/trainer.hpp"
#include "salt/vocab.hpp"

namespace fs = std::filesystem;

namespace {

// "1..5" (inclusive) or "1,2,3".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, range));
    const auto hi = std::stoull(text.substr(range + 2));
    if (hi < lo) throw salt::ConfigError("seed range '" + text + "' is inverted");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const auto comma = text.find(',', begin);
    const std::string item =
        text.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin);
    if (!item.empty()) seeds.push_back(std::stoull(item));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (seeds.empty()) throw salt::ConfigError("no seeds in '" + text + "'");
  return seeds;
}

salt::Tokenizer load_tokenizer_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) throw salt::InputError("cannot open tokenizer source '" + path + "'");
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  in.close();
  if (std::string(magic, 8) == "SALTCKP1") {
    return salt::load_checkpoint(path).model->tokenizer();
  }
  std::ifstream text_in(path);
  std::string text((std::istreambuf_iterator<char>(text_in)),
                   std::istreambuf_iterator<char>());
  return salt::Tokenizer::from_json(text);
}

// Finds the single <prefix><lang>.jsonl file in a directory.
std::string find_single_split(const std::string& dir, const std::string& prefix) {
  std::string found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && entry.path().extension() == ".jsonl") {
      if (!found.empty()) {
        throw salt::InputError("multiple " + prefix + "*.jsonl files in '" + dir + "'");
      }
      found = entry.path().string();
    }
  }
  if (found.empty()) {
    throw salt::InputError("no " + prefix + "<lang>.jsonl file in '" + dir + "'");
  }
  return found;
}

salt::RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return salt::RunConfig{};
  return salt::RunConfig::from_yaml_file(path);
}

int run_build_vocab(const std::string& lang, const std::string& list_path,
                    std::size_t limit, const std::string& tokenizer_path,
                    const std::string& out_path) {
  const salt::Tokenizer tokenizer = load_tokenizer_file(tokenizer_path);
  salt::WordList list = salt::load_frequency_list(list_path, limit);
  list.language = lang;
  const salt::VocabularySet set = salt::build_token_set(list, tokenizer);
  salt::save_vocabulary_set(set, out_path);
  std::cout << "language " << set.language << ": " << set.token_ids.size()
            << " token ids from " << set.word_count_in << "/" << set.word_count_total
            << " words (coverage "
            << static_cast<double>(set.word_count_in) /
                   static_cast<double>(set.word_count_total)
            << ")\n";
  return 0;
}

int run_augment(const std::string& data_path, const std::string& config_path,
                const std::string& vocab_dir, const std::string& out_dir) {
  const salt::RunConfig config = salt::RunConfig::from_yaml_file(config_path);
  const auto scorer = salt::load_scorer(config.scorer);

  std::map<std::string, salt::VocabularySet> vocab_sets;
  for (const auto& language : config.augment.target_languages) {
    const fs::path path = fs::path(vocab_dir) / ("vocab_" + language + ".json");
    vocab_sets[language] = salt::load_vocabulary_set(path.string());
  }

  const auto dataset = salt::load_task_examples(data_path);
  const auto manifest = salt::augment_dataset(dataset, config.augmentation_config(),
                                              *scorer, vocab_sets, out_dir);
  config.write_snapshot(out_dir);
  std::cout << salt::manifest_to_json(manifest) << '\n';
  return 0;
}

int run_train(const std::string& config_path, const std::string& data_dir,
              const std::string& augmented_dir, const std::string& out_path) {
  const salt::RunConfig config = salt::RunConfig::from_yaml_file(config_path);
  if (config.scorer.checkpoint_path.empty()) {
    throw salt::ConfigError("train requires scorer.checkpoint (the encoder to fine-tune)");
  }
  auto loaded = salt::load_checkpoint(config.scorer.checkpoint_path);
  salt::ToyTransformer& model = *loaded.model;
  if (static_cast<int>(model.config().num_classes) != config.train.num_classes) {
    throw salt::ConfigError("checkpoint classifier head has " +
                            std::to_string(model.config().num_classes) +
                            " classes, config expects " +
                            std::to_string(config.train.num_classes));
  }

  const auto originals = salt::load_task_examples(find_single_split(data_dir, "train_"));
  const auto dev = salt::load_task_examples(find_single_split(data_dir, "dev_"));

  std::vector<salt::AugmentedExample> augmented;
  if (config.train.augmentation) {
    if (augmented_dir.empty()) {
      throw salt::ConfigError(
          "augmentation is enabled but no --augmented directory was given");
    }
    augmented = salt::load_augmented_examples(
        (fs::path(augmented_dir) / "augmented.jsonl").string());
  }

  const salt::TrainConfig tc = config.train_config(config.seed);
  const salt::TrainResult result = salt::train(model, tc, originals, dev, augmented);

  salt::CheckpointMeta meta;
  meta.kind = "classifier";
  meta.seed = config.seed;
  meta.config_hash = config.hash();
  meta.source_language = result.source_language;
  salt::save_checkpoint(model, meta, out_path);
  salt::write_training_log(result.log, out_path + ".log.jsonl");
  config.write_snapshot(fs::path(out_path).parent_path().string().empty()
                            ? "."
                            : fs::path(out_path).parent_path().string());
  std::cout << "best dev accuracy " << result.best_dev_accuracy << " at epoch "
            << result.best_epoch << "; checkpoint written to " << out_path << '\n';
  return 0;
}

int run_evaluate(const std::string& ckpt_path, const std::string& data_dir,
                 bool generalized, const std::string& out_path) {
  auto loaded = salt::load_checkpoint(ckpt_path);
  const auto test_sets = salt::load_test_sets(data_dir);

  if (generalized) {
    const auto report = salt::evaluate_generalized(*loaded.model, test_sets);
    std::cout << salt::render_generalized_table(report);
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      out << salt::generalized_report_to_json(report) << '\n';
    }
  } else {
    const auto report =
        salt::evaluate(*loaded.model, test_sets, loaded.meta.source_language);
    std::cout << salt::render_evaluation_table(report);
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      out << salt::evaluation_report_to_json(report) << '\n';
    }
  }
  return 0;
}

int run_synth_gen(const std::string& spec_path, const std::string& out_dir) {
  const salt::RunConfig config = load_config_or_default(spec_path);
  const salt::SynthCorpus corpus = salt::generate_corpus(config.synth.spec);
  salt::save_corpus(corpus, out_dir);
  config.write_snapshot(out_dir);
  std::cout << "wrote corpus for " << corpus.languages.size() << " languages to "
            << out_dir << '\n';
  return 0;
}

int run_synth_pretrain(const std::string& corpus_dir, const std::string& config_path,
                       const std::string& out_path) {
  const salt::RunConfig config = load_config_or_default(config_path);
  const salt::SynthCorpus corpus = salt::load_corpus(corpus_dir);

  salt::PretrainConfig pc = config.synth.pretrain;
  pc.model.num_classes = static_cast<std::size_t>(config.train.num_classes);
  salt::PretrainOutput output = salt::pretrain_toy(corpus, pc);

  salt::CheckpointMeta meta;
  meta.kind = "encoder";
  meta.seed = pc.seed;
  meta.config_hash = config.hash();
  meta.source_language = corpus.source_language();
  salt::save_checkpoint(*output.model, meta, out_path);
  std::cout << "final masked-LM loss " << output.epoch_losses.back()
            << "; checkpoint written to " << out_path << '\n';
  return 0;
}

int run_synth_e2e_cmd(const std::string& config_path, const std::string& seeds_text,
                      std::string out_dir) {
  salt::RunConfig config = load_config_or_default(config_path);
  if (!seeds_text.empty()) config.e2e.seeds = parse_seeds(seeds_text);
  if (out_dir.empty()) {
    const char* cache = std::getenv("SALT_CACHE_DIR");
    out_dir = (fs::path(cache != nullptr ? cache : "salt_runs") / "synth-e2e").string();
  }
  const salt::E2eReport report = salt::run_synth_e2e(config, out_dir, &std::cout);
  std::cout << '\n' << salt::render_e2e_table(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-augmented zero-shot cross-lingual transfer toolkit"};
  app.require_subcommand(1);

  std::string lang, list_path, tokenizer_path, out_path, data_path, config_path;
  std::string vocab_dir, data_dir, augmented_dir, ckpt_path, corpus_dir, seeds_text;
  std::size_t limit = 10000;
  bool generalized = false;

  auto* build_vocab = app.add_subcommand(
      "build-vocab", "Compile a frequency word list into a token-id vocabulary set");
  build_vocab->add_option("--lang", lang, "ISO language code")->required();
  build_vocab->add_option("--list", list_path, "frequency list file")->required();
  build_vocab->add_option("--limit", limit, "maximum words to ingest");
  build_vocab->add_option("--tokenizer", tokenizer_path,
                          "tokenizer.json or model checkpoint")->required();
  build_vocab->add_option("--out", out_path, "output vocabulary JSON")->required();
  build_vocab->callback(
      [&] { run_build_vocab(lang, list_path, limit, tokenizer_path, out_path); });

  auto* augment = app.add_subcommand(
      "augment", "Generate code-switched copies of a dataset (offline augmentation)");
  augment->add_option("--data", data_path, "task examples JSONL")->required();
  augment->add_option("--config", config_path, "run config YAML")->required();
  augment->add_option("--vocab-dir", vocab_dir, "directory of vocab_<lang>.json files")
      ->required();
  augment->add_option("--out", out_path, "output directory")->required();
  augment->callback([&] { run_augment(data_path, config_path, vocab_dir, out_path); });

  auto* train = app.add_subcommand("train", "Fine-tune a sentence-pair classifier");
  train->add_option("--config", config_path, "run config YAML")->required();
  train->add_option("--data", data_dir, "directory with train_/dev_ JSONL files")
      ->required();
  train->add_option("--augmented", augmented_dir, "directory with augmented.jsonl");
  train->add_option("--out", out_path, "output checkpoint path")->required();
  train->callback([&] { run_train(config_path, data_dir, augmented_dir, out_path); });

  auto* evaluate = app.add_subcommand("evaluate", "Zero-shot evaluation across languages");
  evaluate->add_option("--ckpt", ckpt_path, "classifier checkpoint")->required();
  evaluate->add_option("--data-dir", data_dir, "directory with test_<lang>.jsonl files")
      ->required();
  evaluate->add_flag("--generalized", generalized,
                     "cross-language premise/hypothesis pairing");
  evaluate->add_option("--out", out_path, "write the report JSON here");
  evaluate->callback(
      [&] { run_evaluate(ckpt_path, data_dir, generalized, out_path); });

  auto* eval_gen = app.add_subcommand("eval-generalized",
                                      "Generalized cross-language evaluation");
  eval_gen->add_option("--ckpt", ckpt_path, "classifier checkpoint")->required();
  eval_gen->add_option("--data-dir", data_dir, "directory with test_<lang>.jsonl files")
      ->required();
  eval_gen->add_option("--out", out_path, "write the report JSON here");
  eval_gen->callback([&] { run_evaluate(ckpt_path, data_dir, true, out_path); });

  auto* synth = app.add_subcommand("synth", "Synthetic testbed utilities");
  synth->require_subcommand(1);
  auto* synth_gen = synth->add_subcommand("gen", "Generate a synthetic corpus");
  synth_gen->add_option("--spec", config_path, "run config YAML (synth section)");
  synth_gen->add_option("--out", out_path, "output directory")->required();
  synth_gen->callback([&] { run_synth_gen(config_path, out_path); });

  auto* synth_pretrain = synth->add_subcommand("pretrain", "Pretrain the toy encoder");
  synth_pretrain->add_option("--corpus", corpus_dir, "corpus directory")->required();
  synth_pretrain->add_option("--config", config_path, "run config YAML");
  synth_pretrain->add_option("--out", out_path, "output checkpoint path")->required();
  synth_pretrain->callback(
      [&] { run_synth_pretrain(corpus_dir, config_path, out_path); });

  auto* e2e = app.add_subcommand(
      "synth-e2e", "Full testbed pipeline: generate, pretrain, augment, train, report");
  e2e->add_option("--config", config_path, "run config YAML");
  e2e->add_option("--seed,--seeds", seeds_text, "seeds, e.g. '1..5' or '1,2,3'");
  e2e->add_option("--out", out_path,
                  "output directory (default: $SALT_CACHE_DIR/synth-e2e)");
  e2e->callback([&] { run_synth_e2e_cmd(config_path, seeds_text, out_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const salt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const salt::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
