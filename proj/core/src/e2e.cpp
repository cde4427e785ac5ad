#include "salt/e2e.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "salt/checkpoint.hpp"
#include "salt/errors.hpp"
#include "salt/synth.hpp"
#include "salt/trainer.hpp"

namespace salt {

namespace fs = std::filesystem;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& begin) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
}

void log_line(std::ostream* progress, const std::string& line) {
  if (progress != nullptr) (*progress) << line << std::endl;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

void copy_weights(ToyTransformer& dst, ToyTransformer& src) {
  auto d = dst.parameters();
  auto s = src.parameters();
  for (std::size_t i = 0; i < d.size(); ++i) d[i]->value = s[i]->value;
}

}  // namespace

const VariantSummary& E2eReport::variant(const std::string& name) const {
  for (const auto& v : variants) {
    if (v.name == name) return v;
  }
  throw InputError("no variant named '" + name + "' in the report");
}

E2eReport run_synth_e2e(const RunConfig& config, const std::string& out_dir,
                        std::ostream* progress) {
  fs::create_directories(out_dir);
  const fs::path base(out_dir);
  config.write_snapshot(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  log_line(progress, "[e2e] generating synthetic corpus (seed " +
                         std::to_string(config.synth.spec.seed) + ")");
  const SynthCorpus corpus = generate_corpus(config.synth.spec);
  save_corpus(corpus, (base / "corpus").string());

  PretrainConfig pretrain_config = config.synth.pretrain;
  pretrain_config.model.num_classes = static_cast<std::size_t>(config.train.num_classes);
  log_line(progress, "[e2e] pretraining toy encoder (" +
                         std::to_string(pretrain_config.epochs) + " epochs, " +
                         std::to_string(corpus.languages.size() *
                                        config.synth.spec.mlm_sentences_per_language) +
                         " sentences)");
  PretrainOutput pretrained = pretrain_toy(corpus, pretrain_config);
  {
    CheckpointMeta meta;
    meta.kind = "encoder";
    meta.seed = pretrain_config.seed;
    meta.config_hash = config.hash();
    meta.source_language = corpus.source_language();
    meta.extra = nlohmann::json{{"final_mlm_loss", pretrained.epoch_losses.back()}}.dump();
    save_checkpoint(*pretrained.model, meta, (base / "pretrained.ckpt").string());
  }
  log_line(progress, "[e2e] pretraining done in " +
                         std::to_string(seconds_since(t0)) + "s (final loss " +
                         std::to_string(pretrained.epoch_losses.back()) + ")");

  // Vocabulary sets through the standard pipeline, from the generated
  // frequency lists.
  fs::create_directories(base / "vocab");
  std::map<std::string, VocabularySet> vocab_sets;
  for (const auto& language : corpus.languages) {
    WordList list;
    list.language = language;
    list.words = corpus.frequency_words.at(language);
    if (list.words.size() > config.vocab.limit) list.words.resize(config.vocab.limit);
    vocab_sets[language] = build_token_set(list, corpus.tokenizer);
    save_vocabulary_set(vocab_sets[language],
                        (base / "vocab" / ("vocab_" + language + ".json")).string());
  }

  AugmentationConfig aug_config = config.augmentation_config();
  aug_config.target_languages = corpus.languages;  // testbed languages, source first
  log_line(progress, "[e2e] augmenting " + std::to_string(corpus.train.size()) +
                         " training examples into " +
                         std::to_string(corpus.languages.size()) + " languages");
  augment_dataset(corpus.train, aug_config, *pretrained.model, vocab_sets,
                  (base / "augmented").string());
  const auto augmented =
      load_augmented_examples((base / "augmented" / "augmented.jsonl").string());

  struct VariantPlan {
    std::string name;
    bool augmentation;
    bool mixup;
    bool source_only;
  };
  const std::vector<VariantPlan> plans = {
      {"baseline", false, false, false},
      {"salt", true, true, false},
      {"no_mixup", true, false, false},
      {"en_only", true, true, true},
  };

  E2eReport report;
  report.seeds = config.e2e.seeds;
  report.source_language = corpus.source_language();
  fs::create_directories(base / "runs");

  for (const auto& plan : plans) {
    VariantSummary summary;
    summary.name = plan.name;
    std::map<std::string, double> language_sums;

    for (const std::uint64_t seed : config.e2e.seeds) {
      const auto t_run = std::chrono::steady_clock::now();
      ToyTransformer model(corpus.tokenizer, pretrained.model->config());
      copy_weights(model, *pretrained.model);

      TrainConfig tc = config.train_config(seed);
      tc.augmentation_enabled = plan.augmentation;
      tc.mixup_enabled = plan.mixup;
      tc.source_language_only = plan.source_only;

      const TrainResult trained =
          train(model, tc, corpus.train, corpus.dev,
                plan.augmentation ? std::span<const AugmentedExample>(augmented)
                                  : std::span<const AugmentedExample>());

      const EvaluationReport eval_report =
          evaluate(model, corpus.test, corpus.source_language());
      const GeneralizedReport generalized = evaluate_generalized(model, corpus.test);

      summary.per_seed_target_avg.push_back(eval_report.avg_excl_source);
      summary.per_seed_generalized_avg.push_back(generalized.average);
      for (const auto& [language, acc] : eval_report.per_language_accuracy) {
        language_sums[language] += acc;
      }

      const std::string stem = plan.name + "_seed" + std::to_string(seed);
      CheckpointMeta meta;
      meta.kind = "classifier";
      meta.seed = seed;
      meta.config_hash = tc.config_hash;
      meta.source_language = corpus.source_language();
      meta.extra = nlohmann::json{{"variant", plan.name},
                                  {"best_epoch", trained.best_epoch},
                                  {"dev_accuracy", trained.best_dev_accuracy}}
                       .dump();
      save_checkpoint(model, meta, (base / "runs" / (stem + ".ckpt")).string());
      write_training_log(trained.log, (base / "runs" / (stem + ".log.jsonl")).string());
      {
        std::ofstream out(base / "runs" / (stem + ".eval.json"));
        out << evaluation_report_to_json(eval_report) << '\n';
      }
      {
        std::ofstream out(base / "runs" / (stem + ".generalized.json"));
        out << generalized_report_to_json(generalized) << '\n';
      }

      std::ostringstream line;
      line << "[e2e] " << plan.name << " seed " << seed << ": dev "
           << std::fixed << std::setprecision(4) << trained.best_dev_accuracy
           << ", zero-shot avg " << eval_report.avg_excl_source << ", generalized "
           << generalized.average << " (" << std::setprecision(1)
           << seconds_since(t_run) << "s)";
      log_line(progress, line.str());
    }

    summary.mean_target_avg = mean(summary.per_seed_target_avg);
    summary.mean_generalized_avg = mean(summary.per_seed_generalized_avg);
    for (const auto& [language, sum] : language_sums) {
      summary.mean_per_language[language] =
          sum / static_cast<double>(config.e2e.seeds.size());
    }
    report.variants.push_back(std::move(summary));
  }

  const auto& salt = report.variant("salt");
  const auto& baseline = report.variant("baseline");
  const auto& no_mixup = report.variant("no_mixup");
  const auto& en_only = report.variant("en_only");
  report.salt_vs_baseline = significance(salt.per_seed_target_avg,
                                         baseline.per_seed_target_avg, TTestKind::kPaired);
  report.salt_vs_baseline_generalized =
      significance(salt.per_seed_generalized_avg, baseline.per_seed_generalized_avg,
                   TTestKind::kPaired);
  report.ordering_mixup_ok = salt.mean_target_avg >= no_mixup.mean_target_avg &&
                             no_mixup.mean_target_avg >= baseline.mean_target_avg;
  report.ordering_en_only_ok = salt.mean_target_avg >= en_only.mean_target_avg &&
                               en_only.mean_target_avg >= baseline.mean_target_avg;

  {
    std::ofstream out(base / "report.json");
    out << e2e_report_to_json(report) << '\n';
  }
  {
    std::ofstream out(base / "report.txt");
    out << render_e2e_table(report);
  }
  log_line(progress, "[e2e] finished in " + std::to_string(seconds_since(t0)) + "s");
  return report;
}

std::string e2e_report_to_json(const E2eReport& report) {
  nlohmann::json j;
  j["seeds"] = report.seeds;
  j["source_language"] = report.source_language;
  nlohmann::json variants = nlohmann::json::object();
  for (const auto& v : report.variants) {
    variants[v.name] = {{"per_seed_target_avg", v.per_seed_target_avg},
                        {"per_seed_generalized_avg", v.per_seed_generalized_avg},
                        {"mean_target_avg", v.mean_target_avg},
                        {"mean_generalized_avg", v.mean_generalized_avg},
                        {"mean_per_language", v.mean_per_language}};
  }
  j["variants"] = variants;
  j["salt_vs_baseline"] = {{"t", report.salt_vs_baseline.t},
                           {"df", report.salt_vs_baseline.degrees_of_freedom},
                           {"p_value", report.salt_vs_baseline.p_value},
                           {"significant", report.salt_vs_baseline.significant}};
  j["salt_vs_baseline_generalized"] = {
      {"t", report.salt_vs_baseline_generalized.t},
      {"df", report.salt_vs_baseline_generalized.degrees_of_freedom},
      {"p_value", report.salt_vs_baseline_generalized.p_value},
      {"significant", report.salt_vs_baseline_generalized.significant}};
  j["ordering_mixup_ok"] = report.ordering_mixup_ok;
  j["ordering_en_only_ok"] = report.ordering_en_only_ok;
  return j.dump(2);
}

std::string render_e2e_table(const E2eReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "variant";
  for (const auto& [language, acc] : report.variants.front().mean_per_language) {
    out << std::right << std::setw(9) << language;
  }
  out << std::right << std::setw(9) << "avg" << std::setw(9) << "w/ src"
      << std::setw(9) << "gener." << '\n';
  for (const auto& v : report.variants) {
    out << std::left << std::setw(10) << v.name;
    double sum = 0.0;
    for (const auto& [language, acc] : v.mean_per_language) {
      out << std::right << std::setw(9) << std::fixed << std::setprecision(4) << acc;
      sum += acc;
    }
    out << std::right << std::setw(9) << std::fixed << std::setprecision(4)
        << v.mean_target_avg << std::setw(9)
        << sum / static_cast<double>(v.mean_per_language.size()) << std::setw(9)
        << v.mean_generalized_avg << '\n';
  }
  out << "paired t-test salt vs baseline: p = " << std::setprecision(6)
      << report.salt_vs_baseline.p_value
      << (report.salt_vs_baseline.significant ? " (significant)" : " (n.s.)") << '\n';
  return out.str();
}

}  // namespace salt
