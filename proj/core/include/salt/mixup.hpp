#pragma once

#include <span>

#include <Eigen/Dense>

#include "salt/rng.hpp"
#include "salt/scorer.hpp"

namespace salt {

// Per-dimension interpolation coefficients, i.i.d. Uniform[0,1].
struct MixupCoefficients {
  Eigen::VectorXd r;
};

MixupCoefficients sample_coefficients(std::size_t embedding_dim, Rng& rng);

// h[j] = r[j] * h_original[j] + (1 - r[j]) * h_switched[j].
// r == 1 recovers the original embedding and r == 0 the switched one exactly.
Eigen::VectorXd mix_embeddings(const Eigen::VectorXd& h_original,
                               const Eigen::VectorXd& h_switched,
                               const MixupCoefficients& coefficients);

struct MixupOptions {
  bool per_position = false;  // fresh r per position instead of one per instance
};

// Token-embedding rows for one training instance: row i interpolates the
// embeddings of original_ids[i] and switched_ids[i]. One coefficient vector
// is drawn per call (per position with per_position), so callers sampling
// once per training step per instance get the resampling behaviour for free.
// Rows where the two ids coincide are the plain lookup.
Eigen::MatrixXd mixed_input(std::span<const int> original_ids,
                            std::span<const int> switched_ids, const Scorer& embeddings,
                            Rng& rng, const MixupOptions& options = {});

// As above but also exposes the per-row coefficients actually used, which the
// training step needs to split gradients between the two source embeddings.
Eigen::MatrixXd mixed_input_with_coefficients(std::span<const int> original_ids,
                                              std::span<const int> switched_ids,
                                              const Scorer& embeddings, Rng& rng,
                                              const MixupOptions& options,
                                              Eigen::MatrixXd* coefficients_out);

}  // namespace salt
