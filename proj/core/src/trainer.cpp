#include "salt/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "salt/errors.hpp"
#include "salt/eval.hpp"
#include "salt/mixup.hpp"

namespace salt {

namespace {

constexpr std::uint64_t kShuffleStream = 0x51AFFE;

std::vector<int> tokenize_sentence(const Tokenizer& tokenizer, const std::string& sentence) {
  auto text = tokenizer.encode(sentence);
  if (text.size() == 0) {
    throw DataError("sentence tokenizes to an empty sequence: '" + sentence + "'");
  }
  return std::move(text.ids);
}

}  // namespace

std::vector<TrainingInstance> build_training_stream(
    std::span<const TaskExample> originals, std::span<const AugmentedExample> augmented,
    const Tokenizer& tokenizer, const TrainConfig& config) {
  if (originals.empty()) throw InputError("no training data");

  const std::string source_language = originals.front().language;
  std::unordered_map<int, const TaskExample*> by_index;
  std::vector<TrainingInstance> stream;

  for (const auto& ex : originals) {
    if (ex.language != source_language) {
      throw DataError("training data mixes languages: '" + ex.language + "' vs '" +
                      source_language + "'");
    }
    by_index.emplace(ex.index, &ex);
    TrainingInstance inst;
    inst.source_index = ex.index;
    inst.label = ex.label;
    inst.augmented = false;
    inst.language = ex.language;
    inst.original_a = tokenize_sentence(tokenizer, ex.sentence_a);
    inst.original_b = tokenize_sentence(tokenizer, ex.sentence_b);
    inst.switched_a = inst.original_a;
    inst.switched_b = inst.original_b;
    stream.push_back(std::move(inst));
  }

  if (!config.augmentation_enabled) return stream;

  for (const auto& aug : augmented) {
    if (config.source_language_only && aug.language != source_language) continue;
    const auto it = by_index.find(aug.source_index);
    if (it == by_index.end()) {
      throw DataError("augmented example references unknown source index " +
                      std::to_string(aug.source_index));
    }
    const TaskExample& src = *it->second;
    if (aug.label != src.label) {
      throw DataError("augmented example " + std::to_string(aug.source_index) +
                      " changed the label");
    }
    TrainingInstance inst;
    inst.source_index = aug.source_index;
    inst.label = aug.label;
    inst.augmented = true;
    inst.language = aug.language;
    inst.original_a = tokenize_sentence(tokenizer, src.sentence_a);
    inst.original_b = tokenize_sentence(tokenizer, src.sentence_b);
    if (aug.tokens_a.size() != inst.original_a.size() ||
        aug.tokens_b.size() != inst.original_b.size()) {
      throw DataError("augmented tokens for source index " +
                      std::to_string(aug.source_index) +
                      " do not align with the source tokenization");
    }
    inst.switched_a = aug.tokens_a;
    inst.switched_b = aug.tokens_b;
    stream.push_back(std::move(inst));
  }
  return stream;
}

std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed,
                                     std::size_t epoch) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, epoch, kShuffleStream));
  rng.shuffle(order);
  return order;
}

double training_step(ToyTransformer& model, std::span<const TrainingInstance> stream,
                     std::span<const std::size_t> batch_indices, std::size_t epoch,
                     const TrainConfig& config, nn::AdamOptimizer& optimizer) {
  if (batch_indices.empty()) throw InputError("empty batch");
  optimizer.zero_grad();

  const double inv_batch = 1.0 / static_cast<double>(batch_indices.size());
  double total_loss = 0.0;
  std::vector<Eigen::VectorXd> batch_coefficients;

  for (const std::size_t idx : batch_indices) {
    if (idx >= stream.size()) throw InternalError("batch index out of range");
    const TrainingInstance& inst = stream[idx];
    if (inst.label < 0 || inst.label >= static_cast<int>(model.config().num_classes)) {
      throw DataError("label " + std::to_string(inst.label) + " outside the class range");
    }

    const auto original_pair = model.encode_pair(inst.original_a, inst.original_b);
    const auto switched_pair = model.encode_pair(inst.switched_a, inst.switched_b);

    nn::Matrix rows;
    Eigen::MatrixXd coefficients;  // per-row r, only meaningful for mixup rows
    const bool use_mixup = inst.augmented && config.mixup_enabled;
    if (use_mixup) {
      Rng mixup_rng(derive_seed(config.seed, epoch, idx));
      MixupOptions options;
      options.per_position = config.per_position_mixup;
      rows = mixed_input_with_coefficients(original_pair.ids, switched_pair.ids, model,
                                           mixup_rng, options, &coefficients);
      batch_coefficients.push_back(coefficients.row(0).transpose());
    } else {
      rows = model.lookup_rows(switched_pair.ids);
    }

    ToyTransformer::ClassifierCache cache;
    const nn::Matrix logits = model.classify(rows, switched_pair.segments, &cache);

    nn::Matrix grad_logits;
    const double loss =
        nn::softmax_cross_entropy(logits, {inst.label}, &grad_logits);
    total_loss += loss;

    if (!std::isfinite(loss)) {
      std::ostringstream dump;
      dump << "non-finite loss in training step (epoch " << epoch << "); batch indices:";
      for (const std::size_t b : batch_indices) {
        dump << ' ' << stream[b].source_index;
      }
      dump << "; mixup coefficients:";
      for (const auto& r : batch_coefficients) {
        dump << " [";
        for (Eigen::Index j = 0; j < std::min<Eigen::Index>(r.size(), 4); ++j) {
          dump << (j > 0 ? "," : "") << r(j);
        }
        dump << "...]";
      }
      throw InternalError(dump.str());
    }

    const nn::Matrix grad_rows =
        model.classify_backward(grad_logits * inv_batch, cache);

    // Route row gradients to the embedding table. Mixed rows split between
    // the original token (weight r) and the substituted token (weight 1-r).
    for (Eigen::Index i = 0; i < grad_rows.rows(); ++i) {
      const std::size_t pos = static_cast<std::size_t>(i);
      const int switched_id = switched_pair.ids[pos];
      if (!use_mixup || original_pair.ids[pos] == switched_id) {
        const int target_id = use_mixup ? original_pair.ids[pos] : switched_id;
        model.accumulate_token_grad(target_id, grad_rows.row(i));
      } else {
        const Eigen::RowVectorXd r = coefficients.row(i);
        model.accumulate_token_grad(original_pair.ids[pos],
                                    grad_rows.row(i).cwiseProduct(r));
        model.accumulate_token_grad(
            switched_id,
            grad_rows.row(i).cwiseProduct(Eigen::RowVectorXd::Ones(r.size()) - r));
      }
    }
  }

  optimizer.step();
  return total_loss * inv_batch;
}

TrainResult train(ToyTransformer& model, const TrainConfig& config,
                  std::span<const TaskExample> originals,
                  std::span<const TaskExample> dev_set,
                  std::span<const AugmentedExample> augmented) {
  if (config.epochs <= 0) throw ConfigError("epochs must be positive");
  if (config.batch_size <= 0) throw ConfigError("batch size must be positive");
  if (config.augmentation_enabled && augmented.empty()) {
    throw ConfigError("augmentation is enabled but no augmented data was provided");
  }
  if (dev_set.empty()) throw InputError("dev set is empty");

  model.reinit_classification_head(config.seed);
  const auto stream =
      build_training_stream(originals, augmented, model.tokenizer(), config);

  nn::AdamOptimizer optimizer(model.parameters(), config.learning_rate);

  TrainResult result;
  result.source_language = originals.front().language;
  for (const auto& ex : dev_set) {
    if (ex.language != result.source_language) {
      throw DataError("dev set must be source-language only (zero-shot contract)");
    }
  }

  std::vector<nn::Matrix> best_weights;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = epoch_order(stream.size(), config.seed, static_cast<std::size_t>(epoch));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      loss_sum += training_step(model, stream,
                                std::span<const std::size_t>(order).subspan(begin, end - begin),
                                static_cast<std::size_t>(epoch), config, optimizer);
      ++batches;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(batches);
    record.dev_accuracy = accuracy(model, dev_set);
    result.log.push_back(record);

    if (record.dev_accuracy > result.best_dev_accuracy || result.best_epoch < 0) {
      result.best_dev_accuracy = record.dev_accuracy;
      result.best_epoch = epoch;
      best_weights.clear();
      for (nn::Parameter* p : model.parameters()) best_weights.push_back(p->value);
    }
  }

  const auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_weights[i];
  return result;
}

void write_training_log(std::span<const EpochRecord> log, const std::string& path) {
  std::ofstream out(path);
  if (!out.is_open()) throw InputError("cannot write training log '" + path + "'");
  for (const auto& record : log) {
    nlohmann::json j;
    j["epoch"] = record.epoch;
    j["train_loss"] = record.train_loss;
    j["dev_acc"] = record.dev_accuracy;
    out << j.dump() << '\n';
  }
}

}  // namespace salt
