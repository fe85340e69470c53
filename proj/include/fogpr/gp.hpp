#pragma once

#include <Eigen/Core>

#include "fogpr/types.hpp"

namespace fogpr {

// RBF kernel k(a, b) = exp(-||a - b||^2 / (2 sigma_rbf^2)). Result in (0, 1].
double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma_rbf);

// Kernel vector k(X, q): one entry per row of `inputs`.
Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& query,
                              double sigma_rbf);

// Gram matrix A = K + sigma_n^2 I over the given inputs (rows).
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& inputs, const Hyperparams& hp);

// Least-squares fit of the linear mean W minimizing sum_t ||dp_t - W dx_t||^2.
// Rank-deficient input Grams yield the minimum-norm solution; an empty
// dataset yields zero weights.
MeanWeights fit_linear_mean(const Dataset& data);

// Batch GP posterior at `query` given the maintained Gram inverse.
//   mu  = W q + k^T A^-1 (outputs - inputs W^T)
//   var = k(q, q) - k^T A^-1 k, clamped at zero
// Computed variances below -1e-6 indicate a corrupted inverse and throw.
Posterior gp_predict(const Dataset& data, const Eigen::MatrixXd& a_inv, const MeanWeights& w,
                     const Hyperparams& hp, const Eigen::VectorXd& query);

}  // namespace fogpr
