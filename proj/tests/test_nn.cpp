#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "salt/nn.hpp"
#include "salt/model.hpp"
#include "test_util.hpp"

using namespace salt;
using namespace salt::nn;
using salt::testing::numeric_gradient;
using salt::testing::random_matrix;
using salt::testing::relative_error;

namespace {

constexpr double kTol = 1e-6;

// Checks analytic parameter gradients against central differences on every
// coordinate of the parameter.
void check_parameter(Parameter& p, const std::function<double()>& loss,
                     const Matrix& analytic) {
  for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
      const double numeric = numeric_gradient(loss, p.value(r, c));
      CAPTURE(r);
      CAPTURE(c);
      CHECK(relative_error(analytic(r, c), numeric) < kTol);
    }
  }
}

void check_input(Matrix& x, const std::function<double()>& loss, const Matrix& analytic) {
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double numeric = numeric_gradient(loss, x(r, c));
      CHECK(relative_error(analytic(r, c), numeric) < kTol);
    }
  }
}

}  // namespace

TEST_CASE("linear layer gradients match finite differences") {
  Rng rng(3);
  Linear lin(4, 3);
  lin.init_weights(rng, 0.5);
  Matrix x = random_matrix(5, 4, 10);
  const Matrix proj = random_matrix(5, 3, 11);

  auto loss = [&]() {
    LinearCache cache;
    return (lin.forward(x, cache).array() * proj.array()).sum();
  };

  LinearCache cache;
  lin.forward(x, cache);
  lin.weight.zero_grad();
  lin.bias.zero_grad();
  const Matrix grad_in = lin.backward(proj, cache);

  check_parameter(lin.weight, loss, lin.weight.grad);
  check_parameter(lin.bias, loss, lin.bias.grad);
  check_input(x, loss, grad_in);
}

TEST_CASE("layer norm gradients match finite differences") {
  LayerNorm ln(6);
  ln.gamma.value = random_matrix(1, 6, 20).array() + 1.0;
  ln.beta.value = random_matrix(1, 6, 21);
  Matrix x = random_matrix(4, 6, 22);
  const Matrix proj = random_matrix(4, 6, 23);

  auto loss = [&]() {
    LayerNormCache cache;
    return (ln.forward(x, cache).array() * proj.array()).sum();
  };

  LayerNormCache cache;
  ln.forward(x, cache);
  ln.gamma.zero_grad();
  ln.beta.zero_grad();
  const Matrix grad_in = ln.backward(proj, cache);

  check_parameter(ln.gamma, loss, ln.gamma.grad);
  check_parameter(ln.beta, loss, ln.beta.grad);
  check_input(x, loss, grad_in);
}

TEST_CASE("attention gradients match finite differences") {
  Rng rng(5);
  MultiHeadAttention attn(8, 2);
  attn.init_weights(rng, 0.4);
  Matrix x = random_matrix(5, 8, 30);
  const Matrix proj = random_matrix(5, 8, 31);

  auto loss = [&]() {
    AttentionCache cache;
    return (attn.forward(x, cache).array() * proj.array()).sum();
  };

  AttentionCache cache;
  attn.forward(x, cache);
  NamedParameters params;
  attn.collect(params, "attn");
  for (auto& [name, p] : params) p->zero_grad();
  const Matrix grad_in = attn.backward(proj, cache);

  for (auto& [name, p] : params) {
    CAPTURE(name);
    check_parameter(*p, loss, p->grad);
  }
  check_input(x, loss, grad_in);
}

TEST_CASE("feed-forward gradients match finite differences") {
  Rng rng(7);
  FeedForward ffn(6, 12);
  ffn.init_weights(rng, 0.4);
  Matrix x = random_matrix(3, 6, 40);
  const Matrix proj = random_matrix(3, 6, 41);

  auto loss = [&]() {
    FeedForwardCache cache;
    return (ffn.forward(x, cache).array() * proj.array()).sum();
  };

  FeedForwardCache cache;
  ffn.forward(x, cache);
  NamedParameters params;
  ffn.collect(params, "ffn");
  for (auto& [name, p] : params) p->zero_grad();
  const Matrix grad_in = ffn.backward(proj, cache);

  for (auto& [name, p] : params) {
    CAPTURE(name);
    check_parameter(*p, loss, p->grad);
  }
  check_input(x, loss, grad_in);
}

TEST_CASE("transformer layer end-to-end gradients match finite differences") {
  Rng rng(9);
  TransformerLayer layer(8, 2, 16);
  layer.init_weights(rng, 0.3);
  Matrix x = random_matrix(4, 8, 50);
  const Matrix proj = random_matrix(4, 8, 51);

  auto loss = [&]() {
    TransformerLayerCache cache;
    return (layer.forward(x, cache).array() * proj.array()).sum();
  };

  TransformerLayerCache cache;
  layer.forward(x, cache);
  NamedParameters params;
  layer.collect(params, "layer");
  for (auto& [name, p] : params) p->zero_grad();
  const Matrix grad_in = layer.backward(proj, cache);

  for (auto& [name, p] : params) {
    CAPTURE(name);
    check_parameter(*p, loss, p->grad);
  }
  check_input(x, loss, grad_in);
}

TEST_CASE("softmax cross entropy gradient matches finite differences") {
  Matrix logits = random_matrix(4, 5, 60);
  const std::vector<int> targets = {1, 4, 0, 2};

  auto loss = [&]() { return softmax_cross_entropy(logits, targets, nullptr); };

  Matrix grad;
  softmax_cross_entropy(logits, targets, &grad);
  check_input(logits, loss, grad);
}

TEST_CASE("softmax rows sum to one") {
  const Matrix probs = softmax_rows(random_matrix(6, 9, 70) * 3.0);
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    CHECK(probs.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(probs.row(r).minCoeff() >= 0.0);
  }
}

TEST_CASE("classifier path gradients reach the input rows") {
  ToyTransformer model(salt::testing::toy_tokenizer(), salt::testing::tiny_model_config());
  const std::vector<int> ids = {2, 5, 8, 3, 6, 9, 3};  // [CLS] cat big [SEP] dog small [SEP]
  const std::vector<int> segments = {0, 0, 0, 0, 1, 1, 1};
  Matrix rows = model.lookup_rows(ids);

  auto loss = [&]() {
    ToyTransformer::ClassifierCache cache;
    const Matrix logits = model.classify(rows, segments, &cache);
    return softmax_cross_entropy(logits, {1}, nullptr);
  };

  ToyTransformer::ClassifierCache cache;
  const Matrix logits = model.classify(rows, segments, &cache);
  Matrix grad_logits;
  softmax_cross_entropy(logits, {1}, &grad_logits);
  for (auto* p : model.parameters()) p->zero_grad();
  const Matrix grad_rows = model.classify_backward(grad_logits, cache);

  // Sampled coordinates are enough here; the full sweep runs per layer above.
  Rng rng(77);
  for (int s = 0; s < 24; ++s) {
    const auto r = static_cast<Eigen::Index>(rng.uniform_index(rows.rows()));
    const auto c = static_cast<Eigen::Index>(rng.uniform_index(rows.cols()));
    const double numeric = numeric_gradient(loss, rows(r, c));
    CHECK(relative_error(grad_rows(r, c), numeric) < kTol);
  }
}

TEST_CASE("tied MLM head routes gradients to embeddings and bias") {
  ToyTransformer model(salt::testing::toy_tokenizer(), salt::testing::tiny_model_config());
  const Matrix hidden = random_matrix(3, 16, 80);
  const std::vector<int> targets = {5, 9, 12};

  auto& emb = model.token_embeddings();
  auto loss = [&]() {
    return softmax_cross_entropy(model.mlm_logits(hidden), targets, nullptr);
  };

  Matrix grad_logits;
  softmax_cross_entropy(model.mlm_logits(hidden), targets, &grad_logits);
  for (auto* p : model.parameters()) p->zero_grad();
  model.mlm_logits_backward(grad_logits, hidden);

  Rng rng(81);
  for (int s = 0; s < 24; ++s) {
    const auto r = static_cast<Eigen::Index>(rng.uniform_index(emb.value.rows()));
    const auto c = static_cast<Eigen::Index>(rng.uniform_index(emb.value.cols()));
    const double numeric = numeric_gradient(loss, emb.value(r, c));
    CHECK(relative_error(emb.grad(r, c), numeric) < kTol);
  }
}

TEST_CASE("adam step matches a hand-computed update") {
  Parameter p;
  p.init(1, 2);
  p.value << 1.0, -2.0;
  p.grad << 0.5, -1.5;

  AdamOptimizer opt({&p}, 0.1);
  opt.step();

  // First step with bias correction: m_hat = g, v_hat = g^2,
  // update = lr * g / (|g| + eps) ~= lr * sign(g).
  const double eps = 1e-8;
  const double expected0 = 1.0 - 0.1 * 0.5 / (0.5 + eps);
  const double expected1 = -2.0 + 0.1 * 1.5 / (1.5 + eps);
  CHECK(p.value(0, 0) == doctest::Approx(expected0).epsilon(1e-9));
  CHECK(p.value(0, 1) == doctest::Approx(expected1).epsilon(1e-9));
}

TEST_CASE("forward passes are deterministic") {
  ToyTransformer model(salt::testing::toy_tokenizer(), salt::testing::tiny_model_config());
  const std::vector<int> ids = {5, 8, 6};
  const std::vector<int> segments = {0, 0, 0};
  const Matrix h1 = model.encode(model.lookup_rows(ids), segments, nullptr);
  const Matrix h2 = model.encode(model.lookup_rows(ids), segments, nullptr);
  CHECK((h1 - h2).cwiseAbs().maxCoeff() == 0.0);
}
