#include "salt/nn.hpp"

#include <cmath>

#include "salt/errors.hpp"

namespace salt::nn {

AdamOptimizer::AdamOptimizer(std::vector<Parameter*> params, double learning_rate,
                             double beta1, double beta2, double epsilon)
    : params_(std::move(params)),
      learning_rate_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter* p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamOptimizer::step() {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    const Matrix m_hat = m_[i] / bc1;
    const Matrix v_hat = v_[i] / bc2;
    p.value -= learning_rate_ *
               (m_hat.array() / (v_hat.array().sqrt() + epsilon_)).matrix();
  }
}

void AdamOptimizer::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

Linear::Linear(Eigen::Index in_dim, Eigen::Index out_dim) {
  weight.init(in_dim, out_dim);
  bias.init(1, out_dim);
}

void Linear::init_weights(Rng& rng, double stddev) {
  for (Eigen::Index c = 0; c < weight.value.cols(); ++c) {
    for (Eigen::Index r = 0; r < weight.value.rows(); ++r) {
      weight.value(r, c) = rng.normal(0.0, stddev);
    }
  }
  bias.value.setZero();
}

Matrix Linear::forward(const Matrix& x, LinearCache& cache) const {
  cache.input = x;
  return (x * weight.value).rowwise() + bias.value.row(0);
}

Matrix Linear::backward(const Matrix& grad_out, const LinearCache& cache) {
  weight.grad.noalias() += cache.input.transpose() * grad_out;
  bias.grad.row(0) += grad_out.colwise().sum();
  return grad_out * weight.value.transpose();
}

void Linear::collect(NamedParameters& out, const std::string& prefix) {
  out.emplace_back(prefix + ".weight", &weight);
  out.emplace_back(prefix + ".bias", &bias);
}

LayerNorm::LayerNorm(Eigen::Index dim) {
  gamma.init(1, dim);
  gamma.value.setOnes();
  beta.init(1, dim);
}

Matrix LayerNorm::forward(const Matrix& x, LayerNormCache& cache) const {
  const Eigen::Index dim = x.cols();
  Matrix normalized(x.rows(), dim);
  cache.inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    const double inv_std = 1.0 / std::sqrt(var + epsilon);
    normalized.row(r) = (x.row(r).array() - mean) * inv_std;
    cache.inv_std(r) = inv_std;
  }
  cache.normalized = normalized;
  Matrix out = normalized.array().rowwise() * gamma.value.row(0).array();
  out.rowwise() += beta.value.row(0);
  return out;
}

Matrix LayerNorm::backward(const Matrix& grad_out, const LayerNormCache& cache) {
  const Eigen::Index dim = grad_out.cols();
  gamma.grad.row(0) += (grad_out.array() * cache.normalized.array()).colwise().sum().matrix();
  beta.grad.row(0) += grad_out.colwise().sum();

  Matrix grad_in(grad_out.rows(), dim);
  for (Eigen::Index r = 0; r < grad_out.rows(); ++r) {
    const auto g = grad_out.row(r).array() * gamma.value.row(0).array();
    const auto xhat = cache.normalized.row(r).array();
    const double g_mean = g.mean();
    const double gx_mean = (g * xhat).mean();
    grad_in.row(r) = (cache.inv_std(r) * (g - g_mean - xhat * gx_mean)).matrix();
  }
  return grad_in;
}

void LayerNorm::collect(NamedParameters& out, const std::string& prefix) {
  out.emplace_back(prefix + ".gamma", &gamma);
  out.emplace_back(prefix + ".beta", &beta);
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double max = logits.row(r).maxCoeff();
    Eigen::ArrayXd exps = (logits.row(r).array() - max).exp();
    out.row(r) = (exps / exps.sum()).matrix();
  }
  return out;
}

MultiHeadAttention::MultiHeadAttention(Eigen::Index dim, Eigen::Index heads)
    : q_proj(dim, dim),
      k_proj(dim, dim),
      v_proj(dim, dim),
      out_proj(dim, dim),
      num_heads(heads),
      head_dim(dim / heads) {
  if (dim % heads != 0) throw InternalError("model dim must be divisible by head count");
}

void MultiHeadAttention::init_weights(Rng& rng, double stddev) {
  q_proj.init_weights(rng, stddev);
  k_proj.init_weights(rng, stddev);
  v_proj.init_weights(rng, stddev);
  out_proj.init_weights(rng, stddev);
}

Matrix MultiHeadAttention::forward(const Matrix& x, AttentionCache& cache) const {
  const Eigen::Index len = x.rows();
  cache.q = q_proj.forward(x, cache.q_cache);
  cache.k = k_proj.forward(x, cache.k_cache);
  cache.v = v_proj.forward(x, cache.v_cache);
  cache.attn_weights.assign(static_cast<std::size_t>(num_heads), Matrix());

  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  Matrix context(len, num_heads * head_dim);
  for (Eigen::Index h = 0; h < num_heads; ++h) {
    const auto q_h = cache.q.middleCols(h * head_dim, head_dim);
    const auto k_h = cache.k.middleCols(h * head_dim, head_dim);
    const auto v_h = cache.v.middleCols(h * head_dim, head_dim);
    const Matrix scores = scale * (q_h * k_h.transpose());
    const Matrix weights = softmax_rows(scores);
    cache.attn_weights[static_cast<std::size_t>(h)] = weights;
    context.middleCols(h * head_dim, head_dim) = weights * v_h;
  }
  cache.context = context;
  return out_proj.forward(context, cache.out_cache);
}

Matrix MultiHeadAttention::backward(const Matrix& grad_out, const AttentionCache& cache) {
  const Matrix grad_context = out_proj.backward(grad_out, cache.out_cache);

  Matrix grad_q(cache.q.rows(), cache.q.cols());
  Matrix grad_k(cache.k.rows(), cache.k.cols());
  Matrix grad_v(cache.v.rows(), cache.v.cols());
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  for (Eigen::Index h = 0; h < num_heads; ++h) {
    const auto q_h = cache.q.middleCols(h * head_dim, head_dim);
    const auto k_h = cache.k.middleCols(h * head_dim, head_dim);
    const auto v_h = cache.v.middleCols(h * head_dim, head_dim);
    const Matrix& weights = cache.attn_weights[static_cast<std::size_t>(h)];
    const auto grad_ctx_h = grad_context.middleCols(h * head_dim, head_dim);

    grad_v.middleCols(h * head_dim, head_dim) = weights.transpose() * grad_ctx_h;
    const Matrix grad_weights = grad_ctx_h * v_h.transpose();

    // Softmax backward, row-wise.
    Matrix grad_scores(weights.rows(), weights.cols());
    for (Eigen::Index r = 0; r < weights.rows(); ++r) {
      const auto w = weights.row(r).array();
      const auto gw = grad_weights.row(r).array();
      const double dot = (w * gw).sum();
      grad_scores.row(r) = (w * (gw - dot)).matrix();
    }
    grad_scores *= scale;

    grad_q.middleCols(h * head_dim, head_dim) = grad_scores * k_h;
    grad_k.middleCols(h * head_dim, head_dim) = grad_scores.transpose() * q_h;
  }

  Matrix grad_in = q_proj.backward(grad_q, cache.q_cache);
  grad_in += k_proj.backward(grad_k, cache.k_cache);
  grad_in += v_proj.backward(grad_v, cache.v_cache);
  return grad_in;
}

void MultiHeadAttention::collect(NamedParameters& out, const std::string& prefix) {
  q_proj.collect(out, prefix + ".q");
  k_proj.collect(out, prefix + ".k");
  v_proj.collect(out, prefix + ".v");
  out_proj.collect(out, prefix + ".out");
}

double gelu(double x) {
  constexpr double kSqrt2OverPi = 0.7978845608028654;
  const double u = kSqrt2OverPi * (x + 0.044715 * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_derivative(double x) {
  constexpr double kSqrt2OverPi = 0.7978845608028654;
  const double u = kSqrt2OverPi * (x + 0.044715 * x * x * x);
  const double t = std::tanh(u);
  const double du = kSqrt2OverPi * (1.0 + 3.0 * 0.044715 * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

FeedForward::FeedForward(Eigen::Index dim, Eigen::Index hidden_dim)
    : fc1(dim, hidden_dim), fc2(hidden_dim, dim) {}

void FeedForward::init_weights(Rng& rng, double stddev) {
  fc1.init_weights(rng, stddev);
  fc2.init_weights(rng, stddev);
}

Matrix FeedForward::forward(const Matrix& x, FeedForwardCache& cache) const {
  cache.pre_activation = fc1.forward(x, cache.fc1_cache);
  Matrix activated = cache.pre_activation.unaryExpr([](double v) { return gelu(v); });
  return fc2.forward(activated, cache.fc2_cache);
}

Matrix FeedForward::backward(const Matrix& grad_out, const FeedForwardCache& cache) {
  const Matrix grad_activated = fc2.backward(grad_out, cache.fc2_cache);
  const Matrix grad_pre =
      grad_activated.cwiseProduct(cache.pre_activation.unaryExpr(
          [](double v) { return gelu_derivative(v); }));
  return fc1.backward(grad_pre, cache.fc1_cache);
}

void FeedForward::collect(NamedParameters& out, const std::string& prefix) {
  fc1.collect(out, prefix + ".fc1");
  fc2.collect(out, prefix + ".fc2");
}

TransformerLayer::TransformerLayer(Eigen::Index dim, Eigen::Index num_heads,
                                   Eigen::Index hidden_dim)
    : attention(dim, num_heads), ln1(dim), ffn(dim, hidden_dim), ln2(dim) {}

void TransformerLayer::init_weights(Rng& rng, double stddev) {
  attention.init_weights(rng, stddev);
  ffn.init_weights(rng, stddev);
}

Matrix TransformerLayer::forward(const Matrix& x, TransformerLayerCache& cache) const {
  const Matrix attended = attention.forward(x, cache.attn_cache);
  const Matrix normed1 = ln1.forward(x + attended, cache.ln1_cache);
  const Matrix ffn_out = ffn.forward(normed1, cache.ffn_cache);
  return ln2.forward(normed1 + ffn_out, cache.ln2_cache);
}

Matrix TransformerLayer::backward(const Matrix& grad_out, const TransformerLayerCache& cache) {
  const Matrix grad_sum2 = ln2.backward(grad_out, cache.ln2_cache);
  const Matrix grad_normed1 = grad_sum2 + ffn.backward(grad_sum2, cache.ffn_cache);
  const Matrix grad_sum1 = ln1.backward(grad_normed1, cache.ln1_cache);
  return grad_sum1 + attention.backward(grad_sum1, cache.attn_cache);
}

void TransformerLayer::collect(NamedParameters& out, const std::string& prefix) {
  attention.collect(out, prefix + ".attn");
  ln1.collect(out, prefix + ".ln1");
  ffn.collect(out, prefix + ".ffn");
  ln2.collect(out, prefix + ".ln2");
}

double softmax_cross_entropy(const Matrix& logits, const std::vector<int>& targets,
                             Matrix* grad_logits) {
  if (static_cast<std::size_t>(logits.rows()) != targets.size()) {
    throw InternalError("cross entropy: logits/target row mismatch");
  }
  const Matrix probs = softmax_rows(logits);
  const double inv_n = 1.0 / static_cast<double>(logits.rows());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const int target = targets[static_cast<std::size_t>(r)];
    if (target < 0 || target >= logits.cols()) {
      throw InternalError("cross entropy: target out of range");
    }
    loss -= std::log(std::max(probs(r, target), 1e-300));
  }
  loss *= inv_n;
  if (grad_logits != nullptr) {
    *grad_logits = probs * inv_n;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      (*grad_logits)(r, targets[static_cast<std::size_t>(r)]) -= inv_n;
    }
  }
  return loss;
}

}  // namespace salt::nn
