#include "fogpr/gp.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace fogpr {

namespace {
constexpr double kVarClampTol = 1e-10;
constexpr double kVarErrorTol = -1e-6;
}  // namespace

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma_rbf) {
    if (a.size() != b.size())
        throw InputError("rbf_kernel: vectors must have equal dimension");
    if (!(sigma_rbf > 0.0)) throw InputError("rbf_kernel: sigma_rbf must be > 0");
    const double sq = (a - b).squaredNorm();
    return std::exp(-sq / (2.0 * sigma_rbf * sigma_rbf));
}

Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& query,
                              double sigma_rbf) {
    if (inputs.cols() != query.size())
        throw InputError("kernel_vector: query dimension does not match inputs");
    const double inv_two_s2 = 1.0 / (2.0 * sigma_rbf * sigma_rbf);
    Eigen::VectorXd k =
        (inputs.rowwise() - query.transpose()).rowwise().squaredNorm() * (-inv_two_s2);
    return k.array().exp();
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& inputs, const Hyperparams& hp) {
    hp.validate();
    const Eigen::Index n = inputs.rows();
    if (n == 0) throw InputError("gram_matrix: inputs must be nonempty");
    Eigen::MatrixXd a(n, n);
    const double inv_two_s2 = 1.0 / (2.0 * hp.sigma_rbf * hp.sigma_rbf);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = 1.0 + hp.sigma_n * hp.sigma_n;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double k = std::exp(-(inputs.row(i) - inputs.row(j)).squaredNorm() * inv_two_s2);
            a(i, j) = k;
            a(j, i) = k;
        }
    }
    return a;
}

MeanWeights fit_linear_mean(const Dataset& data) {
    data.validate();
    if (data.size() == 0)
        return MeanWeights::Zero(data.output_dim(), data.input_dim());
    // Minimum-norm least squares: solve inputs * W^T ~= outputs.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(data.inputs);
    return cod.solve(data.outputs).transpose();
}

Posterior gp_predict(const Dataset& data, const Eigen::MatrixXd& a_inv, const MeanWeights& w,
                     const Hyperparams& hp, const Eigen::VectorXd& query) {
    data.validate();
    if (query.size() != data.input_dim())
        throw InputError("gp_predict: query dimension does not match dataset");
    if (w.rows() != data.output_dim() || w.cols() != data.input_dim())
        throw InputError("gp_predict: mean weights shape does not match dataset");

    Posterior post;
    post.mu = w * query;
    if (data.size() == 0) {
        post.var = 1.0;  // k(q, q) for the RBF kernel
        return post;
    }
    if (a_inv.rows() != data.size() || a_inv.cols() != data.size())
        throw InputError("gp_predict: Gram inverse size does not match dataset");

    const Eigen::VectorXd k = kernel_vector(data.inputs, query, hp.sigma_rbf);
    const Eigen::VectorXd a_inv_k = a_inv * k;

    // Residuals of the linear mean, one row per observation.
    const Eigen::MatrixXd residuals = data.outputs - data.inputs * w.transpose();
    post.mu += residuals.transpose() * a_inv_k;

    double var = 1.0 - k.dot(a_inv_k);
    if (var < kVarErrorTol)
        throw NumericalError("gp_predict: posterior variance " + std::to_string(var) +
                             " is far below zero; Gram inverse is unhealthy");
    if (var < kVarClampTol) var = 0.0;
    post.var = var;

    if (!post.mu.allFinite())
        throw NumericalError("gp_predict: non-finite posterior mean");
    return post;
}

}  // namespace fogpr
