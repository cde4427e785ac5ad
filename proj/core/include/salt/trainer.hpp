#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "salt/codeswitch.hpp"
#include "salt/data.hpp"
#include "salt/model.hpp"
#include "salt/nn.hpp"

namespace salt {

struct TrainConfig {
  int epochs = 4;
  int batch_size = 16;
  double learning_rate = 5e-4;
  std::uint64_t seed = 1;
  // Ablations: augmentation off reproduces vanilla fine-tuning; source-only
  // keeps just the synonym-augmented copies; mixup off trains on the
  // code-switched tokens directly.
  bool augmentation_enabled = true;
  bool source_language_only = false;
  bool mixup_enabled = true;
  bool per_position_mixup = false;
  std::string config_hash;
};

// One training instance. Original instances carry identical original/switched
// sequences; augmented ones carry the position-aligned pair that the mixup
// layer interpolates.
struct TrainingInstance {
  int source_index = 0;
  int label = 0;
  bool augmented = false;
  std::string language;
  std::vector<int> original_a, original_b;
  std::vector<int> switched_a, switched_b;
};

// Joins originals with their augmented variants (index-linked). Every epoch
// yields each original plus its augmented copies; ablation flags control
// which copies are kept. Dangling source indices, label or length mismatches
// are data errors.
std::vector<TrainingInstance> build_training_stream(
    std::span<const TaskExample> originals, std::span<const AugmentedExample> augmented,
    const Tokenizer& tokenizer, const TrainConfig& config);

// Deterministic shuffle for one epoch.
std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed,
                                     std::size_t epoch);

// Runs one optimizer step over the given instances. Augmented instances pass
// through embedding mixup with a coefficient vector drawn from the stream
// seeded by hash(seed, epoch, instance_index); originals use the plain
// lookup. Returns the mean batch loss. A non-finite loss aborts with a
// diagnostic listing the batch and coefficients.
double training_step(ToyTransformer& model, std::span<const TrainingInstance> stream,
                     std::span<const std::size_t> batch_indices, std::size_t epoch,
                     const TrainConfig& config, nn::AdamOptimizer& optimizer);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
};

struct TrainResult {
  double best_dev_accuracy = 0.0;
  int best_epoch = -1;
  std::vector<EpochRecord> log;
  std::string source_language;
};

// Fine-tunes the model on originals plus augmented data, selecting the
// checkpoint by source-language dev accuracy. Target-language data never
// enter model selection. The model is left holding the best epoch's weights.
TrainResult train(ToyTransformer& model, const TrainConfig& config,
                  std::span<const TaskExample> originals,
                  std::span<const TaskExample> dev_set,
                  std::span<const AugmentedExample> augmented);

void write_training_log(std::span<const EpochRecord> log, const std::string& path);

}  // namespace salt
