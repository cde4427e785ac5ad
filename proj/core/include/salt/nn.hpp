#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "salt/rng.hpp"

// Minimal dense NN toolkit in double precision. Sequences are [len x dim]
// row-per-position matrices. Every block exposes forward() filling a cache
// and backward() consuming it while accumulating parameter gradients, so a
// whole training step is an explicit, testable chain.
namespace salt::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  Matrix value;
  Matrix grad;

  void init(Eigen::Index rows, Eigen::Index cols) {
    value.setZero(rows, cols);
    grad.setZero(rows, cols);
  }
  void zero_grad() { grad.setZero(); }
};

using NamedParameters = std::vector<std::pair<std::string, Parameter*>>;

class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<Parameter*> params, double learning_rate,
                double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step();
  void zero_grad();
  void set_learning_rate(double lr) { learning_rate_ = lr; }
  std::int64_t step_count() const { return step_count_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  double learning_rate_;
  double beta1_, beta2_, epsilon_;
  std::int64_t step_count_ = 0;
};

struct LinearCache {
  Matrix input;
};

class Linear {
 public:
  Linear() = default;
  Linear(Eigen::Index in_dim, Eigen::Index out_dim);
  void init_weights(Rng& rng, double stddev);

  Matrix forward(const Matrix& x, LinearCache& cache) const;
  Matrix backward(const Matrix& grad_out, const LinearCache& cache);

  void collect(NamedParameters& out, const std::string& prefix);

  Parameter weight;  // [in x out]
  Parameter bias;    // [1 x out]
};

struct LayerNormCache {
  Matrix normalized;
  Vector inv_std;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  explicit LayerNorm(Eigen::Index dim);

  Matrix forward(const Matrix& x, LayerNormCache& cache) const;
  Matrix backward(const Matrix& grad_out, const LayerNormCache& cache);

  void collect(NamedParameters& out, const std::string& prefix);

  Parameter gamma;  // [1 x dim]
  Parameter beta;   // [1 x dim]
  double epsilon = 1e-5;
};

Matrix softmax_rows(const Matrix& logits);

struct AttentionCache {
  LinearCache q_cache, k_cache, v_cache, out_cache;
  Matrix q, k, v;
  std::vector<Matrix> attn_weights;  // per head, [len x len]
  Matrix context;
};

class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(Eigen::Index dim, Eigen::Index num_heads);
  void init_weights(Rng& rng, double stddev);

  Matrix forward(const Matrix& x, AttentionCache& cache) const;
  Matrix backward(const Matrix& grad_out, const AttentionCache& cache);

  void collect(NamedParameters& out, const std::string& prefix);

  Linear q_proj, k_proj, v_proj, out_proj;
  Eigen::Index num_heads = 1;
  Eigen::Index head_dim = 0;
};

struct FeedForwardCache {
  LinearCache fc1_cache, fc2_cache;
  Matrix pre_activation;
};

// Two-layer MLP with GELU (tanh approximation; smooth, so finite-difference
// gradient checks are well conditioned).
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(Eigen::Index dim, Eigen::Index hidden_dim);
  void init_weights(Rng& rng, double stddev);

  Matrix forward(const Matrix& x, FeedForwardCache& cache) const;
  Matrix backward(const Matrix& grad_out, const FeedForwardCache& cache);

  void collect(NamedParameters& out, const std::string& prefix);

  Linear fc1, fc2;
};

double gelu(double x);
double gelu_derivative(double x);

struct TransformerLayerCache {
  AttentionCache attn_cache;
  LayerNormCache ln1_cache;
  FeedForwardCache ffn_cache;
  LayerNormCache ln2_cache;
};

// Post-norm residual block: y = LN2(LN1(x + attn(x)) + ffn(LN1(...))).
class TransformerLayer {
 public:
  TransformerLayer() = default;
  TransformerLayer(Eigen::Index dim, Eigen::Index num_heads, Eigen::Index hidden_dim);
  void init_weights(Rng& rng, double stddev);

  Matrix forward(const Matrix& x, TransformerLayerCache& cache) const;
  Matrix backward(const Matrix& grad_out, const TransformerLayerCache& cache);

  void collect(NamedParameters& out, const std::string& prefix);

  MultiHeadAttention attention;
  LayerNorm ln1;
  FeedForward ffn;
  LayerNorm ln2;
};

// Cross-entropy over rows of logits against integer targets.
// Returns mean loss; writes d(loss)/d(logits) (already divided by row count)
// into grad_logits when non-null.
double softmax_cross_entropy(const Matrix& logits, const std::vector<int>& targets,
                             Matrix* grad_logits);

}  // namespace salt::nn
