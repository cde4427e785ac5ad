#include "salt/mixup.hpp"

#include "salt/errors.hpp"

namespace salt {

MixupCoefficients sample_coefficients(std::size_t embedding_dim, Rng& rng) {
  if (embedding_dim == 0) throw InputError("embedding dimension must be positive");
  MixupCoefficients c;
  c.r.resize(static_cast<Eigen::Index>(embedding_dim));
  for (Eigen::Index j = 0; j < c.r.size(); ++j) c.r(j) = rng.uniform();
  return c;
}

Eigen::VectorXd mix_embeddings(const Eigen::VectorXd& h_original,
                               const Eigen::VectorXd& h_switched,
                               const MixupCoefficients& coefficients) {
  if (h_original.size() != h_switched.size() ||
      h_original.size() != coefficients.r.size()) {
    throw InputError("mixup operands have mismatched dimensions");
  }
  return (coefficients.r.array() * h_original.array() +
          (1.0 - coefficients.r.array()) * h_switched.array())
      .matrix();
}

Eigen::MatrixXd mixed_input_with_coefficients(std::span<const int> original_ids,
                                              std::span<const int> switched_ids,
                                              const Scorer& embeddings, Rng& rng,
                                              const MixupOptions& options,
                                              Eigen::MatrixXd* coefficients_out) {
  if (original_ids.size() != switched_ids.size()) {
    throw InternalError("original/switched sequences differ in length; "
                        "substitution upstream must be 1:1");
  }
  const auto dim = static_cast<Eigen::Index>(embeddings.embedding_dim());
  const auto len = static_cast<Eigen::Index>(original_ids.size());

  const Eigen::MatrixXd h_original = embeddings.embed_tokens(original_ids);
  const Eigen::MatrixXd h_switched = embeddings.embed_tokens(switched_ids);

  MixupCoefficients r;
  if (!options.per_position) r = sample_coefficients(embeddings.embedding_dim(), rng);

  Eigen::MatrixXd mixed(len, dim);
  Eigen::MatrixXd used(len, dim);
  for (Eigen::Index i = 0; i < len; ++i) {
    if (options.per_position) r = sample_coefficients(embeddings.embedding_dim(), rng);
    used.row(i) = r.r.transpose();
    if (original_ids[static_cast<std::size_t>(i)] ==
        switched_ids[static_cast<std::size_t>(i)]) {
      mixed.row(i) = h_original.row(i);
    } else {
      mixed.row(i) = mix_embeddings(h_original.row(i).transpose(),
                                    h_switched.row(i).transpose(), r)
                         .transpose();
    }
  }
  if (coefficients_out != nullptr) *coefficients_out = used;
  return mixed;
}

Eigen::MatrixXd mixed_input(std::span<const int> original_ids,
                            std::span<const int> switched_ids, const Scorer& embeddings,
                            Rng& rng, const MixupOptions& options) {
  return mixed_input_with_coefficients(original_ids, switched_ids, embeddings, rng,
                                       options, nullptr);
}

}  // namespace salt
