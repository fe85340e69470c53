#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "fogpr/gp.hpp"
#include "fogpr/rng.hpp"
#include "test_util.hpp"

using namespace fogpr;

namespace {

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Dataset random_dataset(Rng& rng, int n, int in_dim, int out_dim) {
    Dataset data(in_dim, out_dim);
    data.inputs.resize(n, in_dim);
    data.outputs.resize(n, out_dim);
    for (int i = 0; i < n; ++i) {
        data.inputs.row(i) = rng.uniform_vector(in_dim, -1.0, 1.0).transpose();
        data.outputs.row(i) = rng.uniform_vector(out_dim, -1.0, 1.0).transpose();
    }
    return data;
}

}  // namespace

TEST_CASE("rbf kernel closed-form values") {
    CHECK(rbf_kernel(vec2(0.3, -0.7), vec2(0.3, -0.7), 0.6) == doctest::Approx(1.0));
    // 1-D points separated by exactly sigma_rbf.
    CHECK(rbf_kernel(vec1(0.0), vec1(0.6), 0.6) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(rbf_kernel(vec2(1, 0), vec2(0, 1), 0.6) ==
          doctest::Approx(std::exp(-2.0 / (2.0 * 0.36))).epsilon(1e-12));
}

TEST_CASE("rbf kernel symmetry and boundedness") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
        const Eigen::VectorXd a = rng.uniform_vector(dim, -3.0, 3.0);
        const Eigen::VectorXd b = rng.uniform_vector(dim, -3.0, 3.0);
        const double kab = rbf_kernel(a, b, 0.6);
        CHECK(kab == rbf_kernel(b, a, 0.6));
        CHECK(kab > 0.0);
        CHECK(kab <= 1.0);
    }
}

TEST_CASE("rbf kernel rejects mismatched dimensions") {
    CHECK_THROWS_AS(rbf_kernel(vec1(0.0), vec2(0.0, 1.0), 0.6), InputError);
}

TEST_CASE("fit_linear_mean interpolates orthonormal inputs exactly") {
    Dataset data(2, 1);
    data.inputs.resize(2, 2);
    data.inputs << 1, 0, 0, 1;
    data.outputs.resize(2, 1);
    data.outputs << 2, 3;
    const MeanWeights w = fit_linear_mean(data);
    CHECK(w(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("fit_linear_mean single pair is the ratio") {
    Dataset data(1, 1);
    data.inputs.resize(1, 1);
    data.inputs << 2;
    data.outputs.resize(1, 1);
    data.outputs << 6;
    const MeanWeights w = fit_linear_mean(data);
    CHECK(w(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("fit_linear_mean recovers the generating weights from noiseless data") {
    Rng rng(7);
    Eigen::MatrixXd w_true(2, 3);
    w_true << 0.5, -1.2, 2.0, 0.1, 0.9, -0.4;
    Dataset data(3, 2);
    data.inputs.resize(20, 3);
    data.outputs.resize(20, 2);
    for (int i = 0; i < 20; ++i) {
        const Eigen::VectorXd x = rng.uniform_vector(3, -1.0, 1.0);
        data.inputs.row(i) = x.transpose();
        data.outputs.row(i) = (w_true * x).transpose();
    }
    const MeanWeights w = fit_linear_mean(data);
    CHECK((w - w_true).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit_linear_mean empty dataset yields zero weights") {
    const Dataset data(4, 2);
    const MeanWeights w = fit_linear_mean(data);
    CHECK(w.rows() == 2);
    CHECK(w.cols() == 4);
    CHECK(w.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_linear_mean returns the minimum-norm solution when rank deficient") {
    // All inputs lie on one line; any W + (component orthogonal to it) fits
    // equally well, so the solver must return the smallest W.
    Dataset data(2, 1);
    data.inputs.resize(3, 2);
    data.inputs << 1, 1, 2, 2, -1, -1;
    data.outputs.resize(3, 1);
    data.outputs << 2, 4, -2;
    const MeanWeights w = fit_linear_mean(data);
    // Oracle: pinv through Jacobi SVD.
    const Eigen::MatrixXd pinv_w =
        data.inputs.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
            .solve(data.outputs)
            .transpose();
    CHECK((w - pinv_w).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(w(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit_linear_mean residual gradient vanishes at the fit") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform(0.0, 30.0));
        Dataset data = random_dataset(rng, n, 3, 2);
        const MeanWeights w = fit_linear_mean(data);
        // gradient of sum_t ||W dx_t - dp_t||^2 wrt W
        const Eigen::MatrixXd grad =
            2.0 * (data.inputs * w.transpose() - data.outputs).transpose() * data.inputs;
        CHECK(grad.norm() <= 1e-6 * n);
    }
}

TEST_CASE("gram matrix basic shapes") {
    Hyperparams hp;
    Eigen::MatrixXd one(1, 1);
    one << 0.4;
    const Eigen::MatrixXd g1 = gram_matrix(one, hp);
    CHECK(g1.rows() == 1);
    CHECK(g1(0, 0) == doctest::Approx(1.0 + hp.sigma_n * hp.sigma_n).epsilon(1e-15));

    Eigen::MatrixXd twin(2, 1);
    twin << 0.4, 0.4;
    const Eigen::MatrixXd g2 = gram_matrix(twin, hp);
    CHECK(g2(0, 0) == doctest::Approx(1.0 + hp.sigma_n * hp.sigma_n));
    CHECK(g2(0, 1) == doctest::Approx(1.0));
    CHECK(g2(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("gram matrix matches entrywise kernel recomputation") {
    Rng rng(3);
    Hyperparams hp;
    Eigen::MatrixXd inputs(3, 2);
    for (int i = 0; i < 3; ++i) inputs.row(i) = rng.uniform_vector(2, -1.0, 1.0).transpose();
    const Eigen::MatrixXd g = gram_matrix(inputs, hp);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double expected =
                rbf_kernel(inputs.row(i), inputs.row(j), hp.sigma_rbf) +
                (i == j ? hp.sigma_n * hp.sigma_n : 0.0);
            CHECK(g(i, j) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("gram matrix stays positive definite, duplicates included") {
    Rng rng(17);
    Hyperparams hp;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 20.0));
        Eigen::MatrixXd inputs(n, 2);
        for (int i = 0; i < n; ++i)
            inputs.row(i) = rng.uniform_vector(2, -1.0, 1.0).transpose();
        if (n >= 2) inputs.row(1) = inputs.row(0);  // force a duplicate
        const Eigen::MatrixXd g = gram_matrix(inputs, hp);
        const Eigen::VectorXd eigenvalues =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues();
        CHECK(eigenvalues.minCoeff() >= hp.sigma_n * hp.sigma_n - 1e-10);
    }
}

TEST_CASE("gp_predict on an empty dataset returns the prior") {
    Hyperparams hp;
    const Dataset data(2, 3);
    const MeanWeights w = MeanWeights::Zero(3, 2);
    const Posterior post = gp_predict(data, Eigen::MatrixXd(), w, hp, vec2(0.5, -0.5));
    CHECK(post.mu.cwiseAbs().maxCoeff() == 0.0);
    CHECK(post.var == doctest::Approx(1.0));
}

TEST_CASE("gp_predict interpolates stored points as noise vanishes") {
    Hyperparams hp;
    hp.sigma_n = 1e-9;
    Rng rng(5);
    Dataset data = random_dataset(rng, 6, 2, 2);
    const MeanWeights w = fit_linear_mean(data);
    const Eigen::MatrixXd a_inv = testutil::dense_inverse(gram_matrix(data.inputs, hp));
    for (int i = 0; i < data.size(); ++i) {
        const Posterior post = gp_predict(data, a_inv, w, hp, data.inputs.row(i));
        CHECK((post.mu - data.outputs.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-5);
        CHECK(post.var < 1e-5);
    }
}

TEST_CASE("gp_predict matches the dense-solve oracle") {
    Rng rng(29);
    Hyperparams hp;
    Dataset data = random_dataset(rng, 5, 1, 1);
    const MeanWeights w = fit_linear_mean(data);
    const Eigen::MatrixXd a_inv = testutil::dense_inverse(gram_matrix(data.inputs, hp));
    for (int probe = 0; probe < 25; ++probe) {
        const Eigen::VectorXd q = rng.uniform_vector(1, -1.5, 1.5);
        const Posterior got = gp_predict(data, a_inv, w, hp, q);
        const Posterior want = testutil::dense_gp_oracle(data, w, hp, q);
        CHECK((got.mu - want.mu).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(got.var == doctest::Approx(want.var).epsilon(1e-10));
    }
}

TEST_CASE("posterior variance does not increase when data is added") {
    Rng rng(31);
    Hyperparams hp;
    Dataset big = random_dataset(rng, 20, 2, 1);
    for (int probe = 0; probe < 10; ++probe) {
        const Eigen::VectorXd q = rng.uniform_vector(2, -1.0, 1.0);
        double prev_var = 1.0;
        for (int n : {5, 10, 20}) {
            Dataset sub(2, 1);
            sub.inputs = big.inputs.topRows(n);
            sub.outputs = big.outputs.topRows(n);
            const MeanWeights w = fit_linear_mean(sub);
            const Eigen::MatrixXd a_inv = testutil::dense_inverse(gram_matrix(sub.inputs, hp));
            const Posterior post = gp_predict(sub, a_inv, w, hp, q);
            CHECK(post.var <= prev_var + 1e-10);
            prev_var = post.var;
        }
    }
}

TEST_CASE("gp_predict is invariant to dataset permutation") {
    Rng rng(37);
    Hyperparams hp;
    Dataset data = random_dataset(rng, 8, 2, 2);
    const MeanWeights w = fit_linear_mean(data);
    const Eigen::MatrixXd a_inv = testutil::dense_inverse(gram_matrix(data.inputs, hp));

    Dataset shuffled(2, 2);
    shuffled.inputs.resize(8, 2);
    shuffled.outputs.resize(8, 2);
    const int perm[8] = {3, 0, 7, 1, 5, 2, 6, 4};
    for (int i = 0; i < 8; ++i) {
        shuffled.inputs.row(i) = data.inputs.row(perm[i]);
        shuffled.outputs.row(i) = data.outputs.row(perm[i]);
    }
    const MeanWeights w2 = fit_linear_mean(shuffled);
    const Eigen::MatrixXd a_inv2 =
        testutil::dense_inverse(gram_matrix(shuffled.inputs, hp));

    for (int probe = 0; probe < 10; ++probe) {
        const Eigen::VectorXd q = rng.uniform_vector(2, -1.0, 1.0);
        const Posterior a = gp_predict(data, a_inv, w, hp, q);
        const Posterior b = gp_predict(shuffled, a_inv2, w2, hp, q);
        CHECK((a.mu - b.mu).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(a.var == doctest::Approx(b.var).epsilon(1e-10));
    }
}

TEST_CASE("gp_predict rejects dimension mismatches") {
    Hyperparams hp;
    Rng rng(41);
    Dataset data = random_dataset(rng, 4, 2, 1);
    const MeanWeights w = fit_linear_mean(data);
    const Eigen::MatrixXd a_inv = testutil::dense_inverse(gram_matrix(data.inputs, hp));
    CHECK_THROWS_AS(gp_predict(data, a_inv, w, hp, vec1(0.0)), InputError);
}
