#include "salt/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "salt/errors.hpp"

namespace salt {

namespace {

void check_keys(const YAML::Node& node, const std::string& path,
                const std::set<std::string>& allowed,
                std::vector<std::string>& offenders) {
  if (!node.IsMap()) return;
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      offenders.push_back(path.empty() ? key : path + "." + key);
    }
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (node && node[key]) out = node[key].as<T>();
}

}  // namespace

RunConfig RunConfig::from_yaml(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  if (root && !root.IsMap() && !root.IsNull()) {
    throw ConfigError("config root must be a mapping");
  }

  RunConfig config;
  std::vector<std::string> offenders;

  check_keys(root, "",
             {"seed", "output_dir", "vocab", "scorer", "augment", "mixup", "train",
              "eval", "synth", "e2e"},
             offenders);
  read(root, "seed", config.seed);
  read(root, "output_dir", config.output_dir);

  const YAML::Node vocab = root["vocab"];
  check_keys(vocab, "vocab", {"limit"}, offenders);
  read(vocab, "limit", config.vocab.limit);

  const YAML::Node scorer = root["scorer"];
  check_keys(scorer, "scorer", {"backend", "checkpoint", "max_sequence_length"}, offenders);
  read(scorer, "backend", config.scorer.backend);
  read(scorer, "checkpoint", config.scorer.checkpoint_path);
  read(scorer, "max_sequence_length", config.scorer.max_sequence_length);

  const YAML::Node augment = root["augment"];
  check_keys(augment, "augment",
             {"target_languages", "synonym_threshold", "crosslingual_threshold"},
             offenders);
  read(augment, "target_languages", config.augment.target_languages);
  read(augment, "synonym_threshold", config.augment.synonym_threshold);
  read(augment, "crosslingual_threshold", config.augment.crosslingual_threshold);

  const YAML::Node mixup = root["mixup"];
  check_keys(mixup, "mixup", {"enabled", "per_position"}, offenders);
  read(mixup, "enabled", config.mixup.enabled);
  read(mixup, "per_position", config.mixup.per_position);

  const YAML::Node train = root["train"];
  check_keys(train, "train",
             {"epochs", "batch_size", "learning_rate", "num_classes", "augmentation",
              "source_language_only"},
             offenders);
  read(train, "epochs", config.train.epochs);
  read(train, "batch_size", config.train.batch_size);
  read(train, "learning_rate", config.train.learning_rate);
  read(train, "num_classes", config.train.num_classes);
  read(train, "augmentation", config.train.augmentation);
  read(train, "source_language_only", config.train.source_language_only);

  const YAML::Node eval = root["eval"];
  check_keys(eval, "eval", {"ttest"}, offenders);
  read(eval, "ttest", config.eval.ttest);

  const YAML::Node synth = root["synth"];
  check_keys(synth, "synth",
             {"nouns", "attributes", "attributes_per_noun", "languages",
              "cognate_noun_fraction", "mlm_sentences", "train_examples",
              "dev_examples", "test_examples", "pretrain", "model"},
             offenders);
  read(synth, "nouns", config.synth.spec.noun_count);
  read(synth, "attributes", config.synth.spec.attribute_count);
  read(synth, "attributes_per_noun", config.synth.spec.attributes_per_noun);
  read(synth, "languages", config.synth.spec.n_languages);
  read(synth, "cognate_noun_fraction", config.synth.spec.cognate_noun_fraction);
  read(synth, "mlm_sentences", config.synth.spec.mlm_sentences_per_language);
  read(synth, "train_examples", config.synth.spec.train_examples);
  read(synth, "dev_examples", config.synth.spec.dev_examples);
  read(synth, "test_examples", config.synth.spec.test_examples);
  config.synth.spec.seed = config.seed;

  const YAML::Node pretrain = synth ? synth["pretrain"] : YAML::Node();
  check_keys(pretrain, "synth.pretrain",
             {"epochs", "batch_size", "learning_rate", "mask_probability"}, offenders);
  read(pretrain, "epochs", config.synth.pretrain.epochs);
  read(pretrain, "batch_size", config.synth.pretrain.batch_size);
  read(pretrain, "learning_rate", config.synth.pretrain.learning_rate);
  read(pretrain, "mask_probability", config.synth.pretrain.mask_probability);

  const YAML::Node model = synth ? synth["model"] : YAML::Node();
  check_keys(model, "synth.model",
             {"dim", "heads", "layers", "ffn_dim", "max_sequence_length"}, offenders);
  read(model, "dim", config.synth.pretrain.model.dim);
  read(model, "heads", config.synth.pretrain.model.num_heads);
  read(model, "layers", config.synth.pretrain.model.num_layers);
  read(model, "ffn_dim", config.synth.pretrain.model.ffn_dim);
  read(model, "max_sequence_length", config.synth.pretrain.model.max_sequence_length);

  const YAML::Node e2e = root["e2e"];
  check_keys(e2e, "e2e", {"seeds"}, offenders);
  read(e2e, "seeds", config.e2e.seeds);

  if (!offenders.empty()) {
    std::string message = "unknown config keys:";
    for (const auto& key : offenders) message += " " + key;
    throw ConfigError(message);
  }

  // Value constraints, collected so one failure report names everything.
  std::vector<std::string> problems;
  auto require = [&problems](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  require(config.augment.synonym_threshold > 0.0 && config.augment.synonym_threshold <= 1.0,
          "augment.synonym_threshold must lie in (0, 1]");
  require(config.augment.crosslingual_threshold > 0.0 &&
              config.augment.crosslingual_threshold <= 1.0,
          "augment.crosslingual_threshold must lie in (0, 1]");
  require(!config.augment.target_languages.empty(),
          "augment.target_languages must be nonempty");
  require(config.train.epochs > 0, "train.epochs must be positive");
  require(config.train.batch_size > 0, "train.batch_size must be positive");
  require(config.train.learning_rate > 0.0, "train.learning_rate must be positive");
  require(config.train.num_classes >= 2, "train.num_classes must be at least 2");
  require(config.eval.ttest == "student" || config.eval.ttest == "welch" ||
              config.eval.ttest == "paired",
          "eval.ttest must be one of: student, welch, paired");
  require(config.scorer.backend == "toy" || config.scorer.backend == "pretrained",
          "scorer.backend must be 'toy' or 'pretrained'");
  require(!config.e2e.seeds.empty(), "e2e.seeds must be nonempty");
  require(config.vocab.limit > 0, "vocab.limit must be positive");
  if (!problems.empty()) {
    std::string message = "invalid config values:";
    for (const auto& p : problems) message += "\n  - " + p;
    throw ConfigError(message);
  }
  return config;
}

RunConfig RunConfig::from_yaml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw ConfigError("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_yaml(text);
}

std::string RunConfig::canonical_snapshot() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["vocab"] = {{"limit", vocab.limit}};
  j["scorer"] = {{"backend", scorer.backend},
                 {"checkpoint", scorer.checkpoint_path},
                 {"max_sequence_length", scorer.max_sequence_length}};
  j["augment"] = {{"target_languages", augment.target_languages},
                  {"synonym_threshold", augment.synonym_threshold},
                  {"crosslingual_threshold", augment.crosslingual_threshold}};
  j["mixup"] = {{"enabled", mixup.enabled}, {"per_position", mixup.per_position}};
  j["train"] = {{"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"learning_rate", train.learning_rate},
                {"num_classes", train.num_classes},
                {"augmentation", train.augmentation},
                {"source_language_only", train.source_language_only}};
  j["eval"] = {{"ttest", eval.ttest}};
  j["synth"] = {{"nouns", synth.spec.noun_count},
                {"attributes", synth.spec.attribute_count},
                {"attributes_per_noun", synth.spec.attributes_per_noun},
                {"languages", synth.spec.n_languages},
                {"cognate_noun_fraction", synth.spec.cognate_noun_fraction},
                {"mlm_sentences", synth.spec.mlm_sentences_per_language},
                {"train_examples", synth.spec.train_examples},
                {"dev_examples", synth.spec.dev_examples},
                {"test_examples", synth.spec.test_examples},
                {"pretrain",
                 {{"epochs", synth.pretrain.epochs},
                  {"batch_size", synth.pretrain.batch_size},
                  {"learning_rate", synth.pretrain.learning_rate},
                  {"mask_probability", synth.pretrain.mask_probability}}},
                {"model",
                 {{"dim", synth.pretrain.model.dim},
                  {"heads", synth.pretrain.model.num_heads},
                  {"layers", synth.pretrain.model.num_layers},
                  {"ffn_dim", synth.pretrain.model.ffn_dim},
                  {"max_sequence_length", synth.pretrain.model.max_sequence_length}}}};
  j["e2e"] = {{"seeds", e2e.seeds}};
  return j.dump(2);
}

std::string RunConfig::hash() const {
  const std::string snapshot = canonical_snapshot();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : snapshot) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

TTestKind RunConfig::ttest_kind() const {
  if (eval.ttest == "welch") return TTestKind::kWelch;
  if (eval.ttest == "paired") return TTestKind::kPaired;
  return TTestKind::kStudent;
}

TrainConfig RunConfig::train_config(std::uint64_t run_seed) const {
  TrainConfig tc;
  tc.epochs = train.epochs;
  tc.batch_size = train.batch_size;
  tc.learning_rate = train.learning_rate;
  tc.seed = run_seed;
  tc.augmentation_enabled = train.augmentation;
  tc.source_language_only = train.source_language_only;
  tc.mixup_enabled = mixup.enabled;
  tc.per_position_mixup = mixup.per_position;
  tc.config_hash = hash();
  return tc;
}

AugmentationConfig RunConfig::augmentation_config() const {
  AugmentationConfig ac;
  ac.target_languages = augment.target_languages;
  ac.synonym_threshold = augment.synonym_threshold;
  ac.crosslingual_threshold = augment.crosslingual_threshold;
  ac.seed = seed;
  return ac;
}

void RunConfig::write_snapshot(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / "resolved_config.json";
  std::ofstream out(path);
  if (!out.is_open()) throw InputError("cannot write '" + path.string() + "'");
  out << canonical_snapshot() << '\n';
}

}  // namespace salt
