#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "salt/nn.hpp"
#include "salt/scorer.hpp"
#include "salt/tokenizer.hpp"

namespace salt {

// Small bidirectional transformer encoder with a tied masked-LM head and a
// sentence-pair classification head. Doubles as the `toy` scoring backend.
//
// Training paths are composed from the public primitives: encode() /
// encode_backward() plus the head-specific forward/backward pairs. Callers
// own the loss computation and the optimizer.
class ToyTransformer final : public Scorer {
 public:
  struct Config {
    std::size_t dim = 32;
    std::size_t num_heads = 2;
    std::size_t num_layers = 2;
    std::size_t ffn_dim = 64;
    std::size_t max_sequence_length = 48;
    std::size_t num_segments = 2;
    std::size_t num_classes = 3;
    std::uint64_t init_seed = 1;
  };

  ToyTransformer(Tokenizer tokenizer, Config config);

  // Scorer interface.
  std::size_t vocab_size() const override { return tokenizer_.vocab_size(); }
  std::size_t embedding_dim() const override { return config_.dim; }
  std::size_t max_sequence_length() const override { return config_.max_sequence_length; }
  const Tokenizer& tokenizer() const override { return tokenizer_; }
  std::vector<PositionDistribution> score_positions(
      std::span<const int> token_ids) const override;
  Eigen::MatrixXd embed_tokens(std::span<const int> token_ids) const override;

  const Config& config() const { return config_; }

  struct EncoderCache {
    nn::Matrix token_rows;
    std::vector<int> segments;
    std::vector<nn::TransformerLayerCache> layers;
  };

  // token_rows are embedding-table rows (or mixtures of them); positional and
  // segment embeddings are added here, identically for any row source.
  nn::Matrix encode(const nn::Matrix& token_rows, std::span<const int> segments,
                    EncoderCache* cache) const;
  // Returns the gradient w.r.t. token_rows; accumulates positional/segment
  // embedding gradients.
  nn::Matrix encode_backward(const nn::Matrix& grad_hidden, const EncoderCache& cache);

  // Tied MLM head: logits = hidden * token_embeddings^T + bias.
  nn::Matrix mlm_logits(const nn::Matrix& hidden) const;
  // Accumulates gradients for the tied embedding table and bias; returns the
  // gradient w.r.t. hidden.
  nn::Matrix mlm_logits_backward(const nn::Matrix& grad_logits, const nn::Matrix& hidden);

  struct ClassifierCache {
    EncoderCache encoder;
    nn::LinearCache pooler_cache;
    nn::LinearCache head_cache;
    nn::Matrix pooled;  // after tanh
  };

  // Pair classification over pre-built token rows ([CLS] a [SEP] b [SEP]).
  // Returns [1 x num_classes] logits.
  nn::Matrix classify(const nn::Matrix& token_rows, std::span<const int> segments,
                      ClassifierCache* cache) const;
  // Returns the gradient w.r.t. token rows.
  nn::Matrix classify_backward(const nn::Matrix& grad_logits, const ClassifierCache& cache);

  // Assembles [CLS] a [SEP] b [SEP] ids and segment ids.
  struct PairEncoding {
    std::vector<int> ids;
    std::vector<int> segments;
  };
  PairEncoding encode_pair(std::span<const int> ids_a, std::span<const int> ids_b) const;

  // Plain token-embedding rows for ids (training-path lookup).
  nn::Matrix lookup_rows(std::span<const int> ids) const;
  // Routes a gradient row to one token-embedding row.
  void accumulate_token_grad(int token_id, const Eigen::RowVectorXd& grad);

  // Fresh pooler/classifier weights for a new fine-tuning run; the encoder
  // is left untouched.
  void reinit_classification_head(std::uint64_t seed);

  nn::NamedParameters named_parameters();
  std::vector<nn::Parameter*> parameters();

  nn::Parameter& token_embeddings() { return token_embeddings_; }
  const nn::Parameter& token_embeddings() const { return token_embeddings_; }

 private:
  void validate_ids(std::span<const int> token_ids) const;

  Tokenizer tokenizer_;
  Config config_;

  nn::Parameter token_embeddings_;     // [vocab x dim]
  nn::Parameter position_embeddings_;  // [max_len x dim]
  nn::Parameter segment_embeddings_;   // [num_segments x dim]
  nn::Parameter mlm_bias_;             // [1 x vocab]
  std::vector<nn::TransformerLayer> layers_;
  nn::Linear pooler_;
  nn::Linear head_;
};

}  // namespace salt
