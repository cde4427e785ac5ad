#include "salt/scorer.hpp"

#include "salt/checkpoint.hpp"
#include "salt/errors.hpp"

namespace salt {

std::vector<std::vector<PositionDistribution>> Scorer::score_batch(
    std::span<const std::vector<int>> sequences) const {
  std::vector<std::vector<PositionDistribution>> out;
  out.reserve(sequences.size());
  for (const auto& seq : sequences) out.push_back(score_positions(seq));
  return out;
}

std::unique_ptr<Scorer> load_scorer(const ScorerConfig& config) {
  if (config.backend != "toy" && config.backend != "pretrained") {
    throw ConfigError("unknown scorer backend '" + config.backend +
                      "' (expected 'toy' or 'pretrained')");
  }
  if (config.checkpoint_path.empty()) {
    throw ConfigError("scorer backend '" + config.backend + "' requires a checkpoint path");
  }
  auto loaded = load_checkpoint(config.checkpoint_path);
  if (config.max_sequence_length != 0 &&
      config.max_sequence_length > loaded.model->max_sequence_length()) {
    throw ConfigError("requested max sequence length exceeds the checkpoint's limit");
  }
  return std::move(loaded.model);
}

}  // namespace salt
