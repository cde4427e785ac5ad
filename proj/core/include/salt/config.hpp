#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "salt/eval.hpp"
#include "salt/model.hpp"
#include "salt/scorer.hpp"
#include "salt/synth.hpp"
#include "salt/trainer.hpp"

namespace salt {

// Validated run configuration, loaded from YAML with flag overrides on top.
// Unknown keys anywhere in the tree are rejected; the error lists every
// offending key. Numeric constraints are also collected in one pass.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "salt_runs";

  struct Vocab {
    std::size_t limit = 10000;
  } vocab;

  ScorerConfig scorer;

  struct Augment {
    std::vector<std::string> target_languages = {"en", "fr", "es", "de"};
    double synonym_threshold = 1e-3;
    double crosslingual_threshold = 1e-7;
  } augment;

  struct Mixup {
    bool enabled = true;
    bool per_position = false;
  } mixup;

  struct Train {
    int epochs = 4;
    int batch_size = 16;
    double learning_rate = 5e-4;
    int num_classes = 3;
    bool augmentation = true;
    bool source_language_only = false;
  } train;

  struct Eval {
    std::string ttest = "student";  // student | welch | paired
  } eval;

  struct Synth {
    SyntheticLanguageSpec spec;
    PretrainConfig pretrain;  // .model carries encoder dimensions
  } synth;

  struct E2e {
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  } e2e;

  static RunConfig from_yaml_file(const std::string& path);
  static RunConfig from_yaml(const std::string& yaml_text);

  // Canonical resolved form: JSON with sorted keys, written next to every
  // run's artifacts so a run can be reproduced from the snapshot alone.
  std::string canonical_snapshot() const;
  // FNV-1a over the canonical snapshot, as 16 hex digits.
  std::string hash() const;

  TTestKind ttest_kind() const;
  TrainConfig train_config(std::uint64_t run_seed) const;
  AugmentationConfig augmentation_config() const;

  void write_snapshot(const std::string& dir) const;
};

}  // namespace salt
