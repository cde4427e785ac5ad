#pragma once

#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "salt/model.hpp"
#include "salt/rng.hpp"
#include "salt/scorer.hpp"

namespace salt::testing {

// Central finite difference of a scalar function at one parameter coordinate.
inline double numeric_gradient(const std::function<double()>& loss, double& coord,
                               double step = 1e-6) {
  const double saved = coord;
  coord = saved + step;
  const double up = loss();
  coord = saved - step;
  const double down = loss();
  coord = saved;
  return (up - down) / (2.0 * step);
}

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

// Deterministic random matrix for fixtures.
inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal(0.0, 1.0);
  }
  return m;
}

// Tiny word-level tokenizer fixture.
inline Tokenizer toy_tokenizer() {
  return Tokenizer::from_vocabulary(
      {"the", "a", "is", "and", ".", "cat", "dog", "bird", "big", "small", "red",
       "qof", "zim", "vek", "gru", "lom", "nar"});
}

inline ToyTransformer::Config tiny_model_config(std::size_t max_len = 24) {
  ToyTransformer::Config config;
  config.dim = 16;
  config.num_heads = 2;
  config.num_layers = 2;
  config.ffn_dim = 32;
  config.max_sequence_length = max_len;
  config.num_classes = 3;
  config.init_seed = 99;
  return config;
}

// Scorer decorator that records every scored sequence, so tests can assert
// the no-mask contract over whole pipeline runs.
class SpyScorer final : public Scorer {
 public:
  explicit SpyScorer(const Scorer& inner) : inner_(inner) {}

  std::size_t vocab_size() const override { return inner_.vocab_size(); }
  std::size_t embedding_dim() const override { return inner_.embedding_dim(); }
  std::size_t max_sequence_length() const override { return inner_.max_sequence_length(); }
  const Tokenizer& tokenizer() const override { return inner_.tokenizer(); }

  std::vector<PositionDistribution> score_positions(
      std::span<const int> token_ids) const override {
    scored_sequences_.emplace_back(token_ids.begin(), token_ids.end());
    return inner_.score_positions(token_ids);
  }

  Eigen::MatrixXd embed_tokens(std::span<const int> token_ids) const override {
    return inner_.embed_tokens(token_ids);
  }

  const std::vector<std::vector<int>>& scored_sequences() const {
    return scored_sequences_;
  }

  bool saw_mask_token() const {
    const int mask = inner_.tokenizer().mask_id();
    for (const auto& seq : scored_sequences_) {
      for (const int id : seq) {
        if (id == mask) return true;
      }
    }
    return false;
  }

 private:
  const Scorer& inner_;
  mutable std::vector<std::vector<int>> scored_sequences_;
};

// Unique scratch directory under the build tree, cleaned on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 counter(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("salt_test_" + tag + "_" + std::to_string(counter()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace salt::testing
