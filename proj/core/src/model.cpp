#include "salt/model.hpp"

#include <cmath>

#include "salt/errors.hpp"

namespace salt {

ToyTransformer::ToyTransformer(Tokenizer tokenizer, Config config)
    : tokenizer_(std::move(tokenizer)), config_(config) {
  const auto dim = static_cast<Eigen::Index>(config_.dim);
  const auto vocab = static_cast<Eigen::Index>(tokenizer_.vocab_size());

  token_embeddings_.init(vocab, dim);
  position_embeddings_.init(static_cast<Eigen::Index>(config_.max_sequence_length), dim);
  segment_embeddings_.init(static_cast<Eigen::Index>(config_.num_segments), dim);
  mlm_bias_.init(1, vocab);

  layers_.reserve(config_.num_layers);
  for (std::size_t i = 0; i < config_.num_layers; ++i) {
    layers_.emplace_back(dim, static_cast<Eigen::Index>(config_.num_heads),
                         static_cast<Eigen::Index>(config_.ffn_dim));
  }
  pooler_ = nn::Linear(dim, dim);
  head_ = nn::Linear(dim, static_cast<Eigen::Index>(config_.num_classes));

  Rng rng(derive_seed(config_.init_seed, 0xC0FFEE));
  constexpr double kInitStd = 0.02;
  auto fill_normal = [&rng](nn::Parameter& p) {
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
      for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
        p.value(r, c) = rng.normal(0.0, kInitStd);
      }
    }
  };
  fill_normal(token_embeddings_);
  fill_normal(position_embeddings_);
  fill_normal(segment_embeddings_);
  for (auto& layer : layers_) layer.init_weights(rng, kInitStd);
  pooler_.init_weights(rng, kInitStd);
  head_.init_weights(rng, kInitStd);
}

void ToyTransformer::validate_ids(std::span<const int> token_ids) const {
  if (token_ids.empty()) throw InputError("empty token sequence");
  if (token_ids.size() > config_.max_sequence_length) {
    throw InputError("sequence length " + std::to_string(token_ids.size()) +
                     " exceeds model maximum " +
                     std::to_string(config_.max_sequence_length));
  }
  for (const int id : token_ids) {
    if (id < 0 || id >= static_cast<int>(tokenizer_.vocab_size())) {
      throw InputError("token id " + std::to_string(id) + " out of vocabulary");
    }
  }
}

nn::Matrix ToyTransformer::lookup_rows(std::span<const int> ids) const {
  validate_ids(ids);
  nn::Matrix rows(static_cast<Eigen::Index>(ids.size()), token_embeddings_.value.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = token_embeddings_.value.row(ids[i]);
  }
  return rows;
}

void ToyTransformer::accumulate_token_grad(int token_id, const Eigen::RowVectorXd& grad) {
  token_embeddings_.grad.row(token_id) += grad;
}

nn::Matrix ToyTransformer::encode(const nn::Matrix& token_rows, std::span<const int> segments,
                                  EncoderCache* cache) const {
  const auto len = token_rows.rows();
  if (static_cast<std::size_t>(len) > config_.max_sequence_length) {
    throw InputError("sequence exceeds model maximum length");
  }
  if (segments.size() != static_cast<std::size_t>(len)) {
    throw InternalError("segment count does not match sequence length");
  }

  nn::Matrix x = token_rows;
  for (Eigen::Index i = 0; i < len; ++i) {
    const int seg = segments[static_cast<std::size_t>(i)];
    if (seg < 0 || seg >= static_cast<int>(config_.num_segments)) {
      throw InternalError("segment id out of range");
    }
    x.row(i) += position_embeddings_.value.row(i) + segment_embeddings_.value.row(seg);
  }

  EncoderCache local;
  EncoderCache& c = cache != nullptr ? *cache : local;
  c.token_rows = token_rows;
  c.segments.assign(segments.begin(), segments.end());
  c.layers.assign(layers_.size(), nn::TransformerLayerCache{});
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(x, c.layers[i]);
  }
  return x;
}

nn::Matrix ToyTransformer::encode_backward(const nn::Matrix& grad_hidden,
                                           const EncoderCache& cache) {
  nn::Matrix grad = grad_hidden;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    grad = layers_[i].backward(grad, cache.layers[i]);
  }
  for (Eigen::Index i = 0; i < grad.rows(); ++i) {
    position_embeddings_.grad.row(i) += grad.row(i);
    segment_embeddings_.grad.row(cache.segments[static_cast<std::size_t>(i)]) += grad.row(i);
  }
  return grad;
}

nn::Matrix ToyTransformer::mlm_logits(const nn::Matrix& hidden) const {
  return (hidden * token_embeddings_.value.transpose()).rowwise() + mlm_bias_.value.row(0);
}

nn::Matrix ToyTransformer::mlm_logits_backward(const nn::Matrix& grad_logits,
                                               const nn::Matrix& hidden) {
  token_embeddings_.grad.noalias() += grad_logits.transpose() * hidden;
  mlm_bias_.grad.row(0) += grad_logits.colwise().sum();
  return grad_logits * token_embeddings_.value;
}

nn::Matrix ToyTransformer::classify(const nn::Matrix& token_rows,
                                    std::span<const int> segments,
                                    ClassifierCache* cache) const {
  ClassifierCache local;
  ClassifierCache& c = cache != nullptr ? *cache : local;
  const nn::Matrix hidden = encode(token_rows, segments, &c.encoder);
  const nn::Matrix cls_hidden = hidden.row(0);
  c.pooled = pooler_.forward(cls_hidden, c.pooler_cache)
                 .unaryExpr([](double v) { return std::tanh(v); });
  return head_.forward(c.pooled, c.head_cache);
}

nn::Matrix ToyTransformer::classify_backward(const nn::Matrix& grad_logits,
                                             const ClassifierCache& cache) {
  const nn::Matrix grad_pooled = head_.backward(grad_logits, cache.head_cache);
  const nn::Matrix grad_pre_tanh =
      grad_pooled.cwiseProduct(cache.pooled.unaryExpr([](double v) { return 1.0 - v * v; }));
  const nn::Matrix grad_cls = pooler_.backward(grad_pre_tanh, cache.pooler_cache);

  nn::Matrix grad_hidden =
      nn::Matrix::Zero(cache.encoder.token_rows.rows(), cache.encoder.token_rows.cols());
  grad_hidden.row(0) = grad_cls.row(0);
  return encode_backward(grad_hidden, cache.encoder);
}

ToyTransformer::PairEncoding ToyTransformer::encode_pair(std::span<const int> ids_a,
                                                         std::span<const int> ids_b) const {
  PairEncoding pair;
  pair.ids.reserve(ids_a.size() + ids_b.size() + 3);
  pair.ids.push_back(tokenizer_.cls_id());
  pair.ids.insert(pair.ids.end(), ids_a.begin(), ids_a.end());
  pair.ids.push_back(tokenizer_.sep_id());
  pair.segments.assign(pair.ids.size(), 0);
  for (const int id : ids_b) {
    pair.ids.push_back(id);
    pair.segments.push_back(1);
  }
  pair.ids.push_back(tokenizer_.sep_id());
  pair.segments.push_back(1);
  if (pair.ids.size() > config_.max_sequence_length) {
    throw InputError("sentence pair exceeds model maximum length");
  }
  return pair;
}

std::vector<PositionDistribution> ToyTransformer::score_positions(
    std::span<const int> token_ids) const {
  validate_ids(token_ids);
  for (const int id : token_ids) {
    if (id == tokenizer_.pad_id()) throw InputError("padding inside scored sequence");
  }
  const std::vector<int> segments(token_ids.size(), 0);
  const nn::Matrix hidden = encode(lookup_rows(token_ids), segments, nullptr);
  const nn::Matrix probs = nn::softmax_rows(mlm_logits(hidden));

  std::vector<PositionDistribution> result;
  result.reserve(token_ids.size());
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    if (tokenizer_.is_special(token_ids[i])) continue;
    PositionDistribution dist;
    dist.position = i;
    dist.probs = probs.row(static_cast<Eigen::Index>(i)).transpose();
    result.push_back(std::move(dist));
  }
  return result;
}

Eigen::MatrixXd ToyTransformer::embed_tokens(std::span<const int> token_ids) const {
  if (token_ids.empty()) throw InputError("empty token sequence");
  for (const int id : token_ids) {
    if (id < 0 || id >= static_cast<int>(tokenizer_.vocab_size())) {
      throw InputError("token id " + std::to_string(id) + " out of vocabulary");
    }
  }
  nn::Matrix rows(static_cast<Eigen::Index>(token_ids.size()),
                  token_embeddings_.value.cols());
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = token_embeddings_.value.row(token_ids[i]);
  }
  return rows;
}

void ToyTransformer::reinit_classification_head(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x4EAD));
  constexpr double kInitStd = 0.02;
  pooler_.init_weights(rng, kInitStd);
  head_.init_weights(rng, kInitStd);
}

nn::NamedParameters ToyTransformer::named_parameters() {
  nn::NamedParameters out;
  out.emplace_back("token_embeddings", &token_embeddings_);
  out.emplace_back("position_embeddings", &position_embeddings_);
  out.emplace_back("segment_embeddings", &segment_embeddings_);
  out.emplace_back("mlm_bias", &mlm_bias_);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].collect(out, "layer" + std::to_string(i));
  }
  pooler_.collect(out, "pooler");
  head_.collect(out, "head");
  return out;
}

std::vector<nn::Parameter*> ToyTransformer::parameters() {
  std::vector<nn::Parameter*> out;
  for (auto& [name, param] : named_parameters()) out.push_back(param);
  return out;
}

}  // namespace salt
