#pragma once

#include <Eigen/Core>

#include "fogpr/gp.hpp"
#include "fogpr/types.hpp"

#include "json.hpp"

namespace fogpr {

// Bounded-memory online GP model. The Gram matrix and its inverse are
// maintained incrementally: block growth below the capacity cap, selective
// forgetting plus a rank-2 swap at capacity. Values are plain data; updates
// return new states.
struct GpState {
    Dataset data;
    Eigen::MatrixXd gram;   // K + sigma_n^2 I over data.inputs (kept exact)
    Eigen::MatrixXd a_inv;  // maintained inverse of gram
    MeanWeights mean_weights;
    Hyperparams hp;
    long step_count = 0;

    Eigen::Index size() const { return data.size(); }
    Eigen::Index input_dim() const { return data.input_dim(); }
    Eigen::Index output_dim() const { return data.output_dim(); }
    bool at_capacity() const { return data.size() >= hp.max_size; }
};

GpState make_gp_state(Eigen::Index input_dim, Eigen::Index output_dim, const Hyperparams& hp);

// Appends one pair and extends A^-1 by the blockwise-inverse formula.
// If the Schur complement r = c - b^T A^-1 b falls below the duplicate guard,
// the pair is absorbed by averaging its output into the nearest stored
// input's output instead of growing.
GpState grow_update(const GpState& state, const Eigen::VectorXd& dx, const Eigen::VectorXd& dpm);

// Row index of the Gram matrix with maximal row-sum (the stored point most
// similar to the rest). Ties break to the lowest index.
Eigen::Index select_forget_index(const GpState& state);

// Replaces the stored pair at `i_star` with (dx, dpm) and updates A^-1 with
// a rank-2 Sherman-Morrison-Woodbury step. A singular 2x2 capacitance falls
// back to dense re-inversion of the rebuilt Gram.
GpState swap_update(const GpState& state, Eigen::Index i_star, const Eigen::VectorXd& dx,
                    const Eigen::VectorXd& dpm);

// Streaming entry point: grow below capacity, otherwise forget-and-swap.
// Refits the linear mean and runs periodic inverse hygiene.
GpState add_observation(const GpState& state, const Eigen::VectorXd& dx,
                        const Eigen::VectorXd& dpm);

Posterior predict(const GpState& state, const Eigen::VectorXd& dx);

// max-norm of A_inv * gram_matrix(data.inputs, hp) - I, with the Gram rebuilt
// from scratch. On-demand health check; O(M^3).
double inverse_consistency_residual(const GpState& state);

// Checkpoint schema: hyperparameters and raw pairs only. The Gram, its
// inverse, and the mean weights are rebuilt on load.
nlohmann::json to_json(const GpState& state);
GpState gp_state_from_json(const nlohmann::json& j);

namespace detail {
// Swap with an explicit capacitance-singularity threshold (exposed so the
// dense fallback path is testable).
GpState swap_update_with_guard(const GpState& state, Eigen::Index i_star,
                               const Eigen::VectorXd& dx, const Eigen::VectorXd& dpm,
                               double capacitance_tol);
}  // namespace detail

}  // namespace fogpr
