#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace fogpr {

// Bad caller input: dimension mismatches, invalid parameters, degenerate data.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical-health failure: non-finite values, variance far below zero, etc.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed experiment configuration (file-level problems name the field).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Equilibrium solver failed to converge.
class EquilibriumError : public NumericalError {
public:
    EquilibriumError(const std::string& msg, double residual)
        : NumericalError(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_ = 0.0;
};

struct Hyperparams {
    double sigma_rbf = 0.6;  // RBF spread, feature-space units
    double sigma_n = 0.001;  // observation-noise std
    int max_size = 300;      // Gram-size cap M
    double eta = 1.0;        // feedback gain

    void validate() const {
        if (!(sigma_rbf > 0.0)) throw InputError("Hyperparams: sigma_rbf must be > 0");
        if (!(sigma_n > 0.0)) throw InputError("Hyperparams: sigma_n must be > 0");
        if (max_size < 2) throw InputError("Hyperparams: max_size must be >= 2");
        if (!(eta > 0.0)) throw InputError("Hyperparams: eta must be > 0");
    }
};

// Linear mean weights W, shape (output dim) x (input dim).
using MeanWeights = Eigen::MatrixXd;

// Paired observations: rows of `inputs` are feature velocities, rows of
// `outputs` the manipulated-point velocities observed with them.
struct Dataset {
    Eigen::MatrixXd inputs;   // N x input_dim
    Eigen::MatrixXd outputs;  // N x output_dim

    Dataset() = default;
    Dataset(Eigen::Index input_dim, Eigen::Index output_dim)
        : inputs(0, input_dim), outputs(0, output_dim) {}

    Eigen::Index size() const { return inputs.rows(); }
    Eigen::Index input_dim() const { return inputs.cols(); }
    Eigen::Index output_dim() const { return outputs.cols(); }

    void validate() const {
        if (inputs.rows() != outputs.rows())
            throw InputError("Dataset: inputs and outputs must have equal length");
        if (!inputs.allFinite() || !outputs.allFinite())
            throw InputError("Dataset: entries must be finite");
    }
};

struct Posterior {
    Eigen::VectorXd mu;  // predicted manipulated-point velocity
    double var = 1.0;    // scalar posterior variance, shared across outputs
};

}  // namespace fogpr
