#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "salt/tokenizer.hpp"

namespace salt {

// Raw softmax over the full model vocabulary at one input position. The
// probabilities are never renormalized over a restricted candidate set;
// substitution thresholds are calibrated against this full-vocabulary scale.
struct PositionDistribution {
  std::size_t position = 0;
  Eigen::VectorXd probs;
};

// Read-only view of a masked language model used for self-augmentation:
// per-position vocabulary distributions computed on the sequence exactly as
// given (no mask token is ever inserted), plus bare token-embedding lookup.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual std::size_t embedding_dim() const = 0;
  virtual std::size_t max_sequence_length() const = 0;
  virtual const Tokenizer& tokenizer() const = 0;

  // One distribution per non-special input position, each a probability
  // vector over the full vocabulary summing to 1 within 1e-5. The scored
  // sequence is bit-identical to `token_ids`.
  virtual std::vector<PositionDistribution> score_positions(
      std::span<const int> token_ids) const = 0;

  // Convenience wrapper scoring several sequences; must agree with
  // per-sequence scoring within 1e-5 per probability.
  std::vector<std::vector<PositionDistribution>> score_batch(
      std::span<const std::vector<int>> sequences) const;

  // Row i is the input token-embedding table lookup for token_ids[i],
  // before positional or segment additions.
  virtual Eigen::MatrixXd embed_tokens(std::span<const int> token_ids) const = 0;
};

struct ScorerConfig {
  std::string backend = "toy";  // "toy" | "pretrained"; both load checkpoints
                                // in this toolkit's format, the key records
                                // where the weights came from.
  std::string checkpoint_path;
  std::size_t max_sequence_length = 0;  // 0: use the checkpoint's value
};

std::unique_ptr<Scorer> load_scorer(const ScorerConfig& config);

}  // namespace salt
