#include "fogpr/online_gp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "fogpr/log.hpp"

namespace fogpr {

namespace {

constexpr double kGrowthGuard = 1e-12;       // minimal Schur complement r
constexpr double kCapacitanceTol = 1e-12;    // 2x2 capacitance |det| floor
constexpr long kHygieneInterval = 1000;      // steps between full residual checks
constexpr double kHygieneResidual = 1e-6;
constexpr double kProbeThreshold = 1e-8;     // per-swap drift probe trigger

void check_pair(const GpState& state, const Eigen::VectorXd& dx, const Eigen::VectorXd& dpm) {
    if (dx.size() != state.input_dim())
        throw InputError("online gp: input dimension mismatch");
    if (dpm.size() != state.output_dim())
        throw InputError("online gp: output dimension mismatch");
    if (!dx.allFinite() || !dpm.allFinite())
        throw InputError("online gp: observation must be finite");
}

void append_pair(Dataset& data, const Eigen::VectorXd& dx, const Eigen::VectorXd& dpm) {
    const Eigen::Index n = data.size();
    data.inputs.conservativeResize(n + 1, Eigen::NoChange);
    data.outputs.conservativeResize(n + 1, Eigen::NoChange);
    data.inputs.row(n) = dx.transpose();
    data.outputs.row(n) = dpm.transpose();
}

// Dense re-inversion of the maintained Gram. Used on load, on swap fallback,
// and by hygiene.
void reinvert_dense(GpState& state) {
    const Eigen::Index n = state.size();
    state.a_inv = state.gram.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    state.a_inv = ((state.a_inv + state.a_inv.transpose()) * 0.5).eval();
}

// O(M^2) drift estimate: residual of A_inv against the maintained Gram along
// one pseudo-random direction. The direction derives from step_count so that
// replays stay deterministic.
double probe_residual(const GpState& state) {
    const Eigen::Index n = state.size();
    std::mt19937_64 gen(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(state.step_count));
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = ((gen() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
    const double scale = v.cwiseAbs().maxCoeff();
    const Eigen::VectorXd res = state.a_inv * (state.gram * v) - v;
    return res.cwiseAbs().maxCoeff() / scale;
}

}  // namespace

GpState make_gp_state(Eigen::Index input_dim, Eigen::Index output_dim, const Hyperparams& hp) {
    hp.validate();
    if (input_dim < 1 || output_dim < 1)
        throw InputError("make_gp_state: dimensions must be positive");
    GpState state;
    state.data = Dataset(input_dim, output_dim);
    state.mean_weights = MeanWeights::Zero(output_dim, input_dim);
    state.hp = hp;
    return state;
}

GpState grow_update(const GpState& state, const Eigen::VectorXd& dx, const Eigen::VectorXd& dpm) {
    check_pair(state, dx, dpm);
    const Eigen::Index n = state.size();
    if (n >= state.hp.max_size)
        throw InputError("grow_update: state already at capacity");

    GpState next = state;
    const double c = 1.0 + state.hp.sigma_n * state.hp.sigma_n;

    if (n == 0) {
        append_pair(next.data, dx, dpm);
        next.gram = Eigen::MatrixXd::Constant(1, 1, c);
        next.a_inv = Eigen::MatrixXd::Constant(1, 1, 1.0 / c);
        return next;
    }

    const Eigen::VectorXd b = kernel_vector(state.data.inputs, dx, state.hp.sigma_rbf);
    const Eigen::VectorXd u = state.a_inv * b;
    const double r = c - b.dot(u);

    if (r <= kGrowthGuard) {
        // Near-duplicate input: growing would corrupt the inverse. Absorb the
        // pair into the nearest stored input's output instead.
        Eigen::Index nearest = 0;
        const Eigen::VectorXd dist2 =
            (state.data.inputs.rowwise() - dx.transpose()).rowwise().squaredNorm();
        dist2.minCoeff(&nearest);
        next.data.outputs.row(nearest) =
            0.5 * (state.data.outputs.row(nearest) + dpm.transpose());
        log::info("grow_update: near-duplicate input absorbed into stored pair ", nearest,
                  " (r=", r, ")");
        return next;
    }

    next.gram.resize(n + 1, n + 1);
    next.gram.topLeftCorner(n, n) = state.gram;
    next.gram.col(n).head(n) = b;
    next.gram.row(n).head(n) = b.transpose();
    next.gram(n, n) = c;

    const double inv_r = 1.0 / r;
    next.a_inv.resize(n + 1, n + 1);
    next.a_inv.topLeftCorner(n, n) = state.a_inv + inv_r * (u * u.transpose());
    next.a_inv.col(n).head(n) = -inv_r * u;
    next.a_inv.row(n).head(n) = next.a_inv.col(n).head(n).transpose();
    next.a_inv(n, n) = inv_r;

    append_pair(next.data, dx, dpm);
    return next;
}

Eigen::Index select_forget_index(const GpState& state) {
    if (state.size() == 0) throw InputError("select_forget_index: empty state");
    Eigen::Index i_star = 0;
    // rowwise().sum().maxCoeff(&i) scans in order, so ties already resolve to
    // the lowest index.
    state.gram.rowwise().sum().maxCoeff(&i_star);
    return i_star;
}

namespace detail {

GpState swap_update_with_guard(const GpState& state, Eigen::Index i_star,
                               const Eigen::VectorXd& dx, const Eigen::VectorXd& dpm,
                               double capacitance_tol) {
    check_pair(state, dx, dpm);
    const Eigen::Index m = state.size();
    if (i_star < 0 || i_star >= m) throw InputError("swap_update: index out of range");

    GpState next = state;
    next.data.inputs.row(i_star) = dx.transpose();
    next.data.outputs.row(i_star) = dpm.transpose();

    // k_new: kernels of the replaced input set against the new point.
    Eigen::VectorXd k_new = kernel_vector(state.data.inputs, dx, state.hp.sigma_rbf);
    k_new[i_star] = 1.0;  // k(dx, dx)
    // k_old: kernels of the old input set against the forgotten point,
    // available as the stored Gram column minus its diagonal noise.
    Eigen::VectorXd k_old = state.gram.col(i_star);
    k_old[i_star] -= state.hp.sigma_n * state.hp.sigma_n;

    // Difference vector, halved at i_star so that U V^T reproduces the
    // diagonal entry of the Gram change exactly.
    Eigen::VectorXd d = k_new - k_old;
    d[i_star] *= 0.5;

    const Eigen::VectorXd a_inv_d = state.a_inv * d;
    const Eigen::VectorXd a_inv_e = state.a_inv.col(i_star);

    // capacitance = I + V^T A^-1 U with U = [e, d], V = [d, e].
    Eigen::Matrix2d capacitance;
    capacitance(0, 0) = 1.0 + d.dot(a_inv_e);
    capacitance(0, 1) = d.dot(a_inv_d);
    capacitance(1, 0) = a_inv_e[i_star];
    capacitance(1, 1) = 1.0 + a_inv_d[i_star];

    // Maintained Gram: rewrite row/column i_star with fresh kernel values.
    next.gram.col(i_star) = k_new;
    next.gram.row(i_star) = k_new.transpose();
    next.gram(i_star, i_star) = 1.0 + state.hp.sigma_n * state.hp.sigma_n;

    const double det = capacitance.determinant();
    if (std::abs(det) < capacitance_tol) {
        log::warn("swap_update: singular capacitance (det=", det,
                  "); falling back to dense re-inversion");
        reinvert_dense(next);
        return next;
    }

    const Eigen::Matrix2d cap_inv = capacitance.inverse();
    // A^-1 U is [a_inv_e, a_inv_d]; V^T A^-1 is [a_inv_d, a_inv_e]^T by the
    // symmetry of A^-1.
    Eigen::MatrixXd left(m, 2);
    left.col(0) = a_inv_e;
    left.col(1) = a_inv_d;
    Eigen::MatrixXd right(2, m);
    right.row(0) = a_inv_d.transpose();
    right.row(1) = a_inv_e.transpose();

    next.a_inv = state.a_inv - left * (cap_inv * right);
    next.a_inv = ((next.a_inv + next.a_inv.transpose()) * 0.5).eval();
    return next;
}

}  // namespace detail

GpState swap_update(const GpState& state, Eigen::Index i_star, const Eigen::VectorXd& dx,
                    const Eigen::VectorXd& dpm) {
    return detail::swap_update_with_guard(state, i_star, dx, dpm, kCapacitanceTol);
}

GpState add_observation(const GpState& state, const Eigen::VectorXd& dx,
                        const Eigen::VectorXd& dpm) {
    const bool swapped = state.at_capacity();
    GpState next = swapped ? swap_update(state, select_forget_index(state), dx, dpm)
                           : grow_update(state, dx, dpm);
    next.mean_weights = fit_linear_mean(next.data);
    next.step_count = state.step_count + 1;

    // Swap chains accumulate drift roughly with the Gram's conditioning, so
    // a cheap directional probe guards every swap; a full residual check
    // still runs on the long schedule.
    if (swapped) {
        const double est = probe_residual(next);
        if (est > kProbeThreshold) {
            log::debug("add_observation: drift probe ", est, " at step ", next.step_count,
                       "; refreshing inverse");
            reinvert_dense(next);
        }
    }
    if (next.step_count % kHygieneInterval == 0 && next.size() > 0) {
        const double res = inverse_consistency_residual(next);
        if (res > kHygieneResidual) {
            log::warn("add_observation: hygiene re-inversion at step ", next.step_count,
                      " (residual=", res, ")");
            reinvert_dense(next);
        }
    }
    return next;
}

Posterior predict(const GpState& state, const Eigen::VectorXd& dx) {
    return gp_predict(state.data, state.a_inv, state.mean_weights, state.hp, dx);
}

double inverse_consistency_residual(const GpState& state) {
    if (state.size() == 0) return 0.0;
    const Eigen::MatrixXd rebuilt = gram_matrix(state.data.inputs, state.hp);
    const Eigen::Index n = state.size();
    return (state.a_inv * rebuilt - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

nlohmann::json to_json(const GpState& state) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["hyperparams"] = {{"sigma_rbf", state.hp.sigma_rbf},
                        {"sigma_n", state.hp.sigma_n},
                        {"max_size", state.hp.max_size},
                        {"eta", state.hp.eta}};
    j["input_dim"] = state.input_dim();
    j["output_dim"] = state.output_dim();
    j["step_count"] = state.step_count;
    auto rows_to_json = [](const Eigen::MatrixXd& mat) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < mat.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < mat.cols(); ++c) row.push_back(mat(i, c));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["inputs"] = rows_to_json(state.data.inputs);
    j["outputs"] = rows_to_json(state.data.outputs);
    return j;
}

GpState gp_state_from_json(const nlohmann::json& j) {
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw ConfigError("gp state: unsupported schema_version");
    Hyperparams hp;
    const auto& jh = j.at("hyperparams");
    hp.sigma_rbf = jh.at("sigma_rbf").get<double>();
    hp.sigma_n = jh.at("sigma_n").get<double>();
    hp.max_size = jh.at("max_size").get<int>();
    hp.eta = jh.at("eta").get<double>();

    const auto input_dim = j.at("input_dim").get<Eigen::Index>();
    const auto output_dim = j.at("output_dim").get<Eigen::Index>();
    GpState state = make_gp_state(input_dim, output_dim, hp);
    state.step_count = j.at("step_count").get<long>();

    const auto& jin = j.at("inputs");
    const auto& jout = j.at("outputs");
    if (jin.size() != jout.size())
        throw ConfigError("gp state: inputs and outputs length mismatch");
    const Eigen::Index n = static_cast<Eigen::Index>(jin.size());
    state.data.inputs.resize(n, input_dim);
    state.data.outputs.resize(n, output_dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(jin[i].size()) != input_dim ||
            static_cast<Eigen::Index>(jout[i].size()) != output_dim)
            throw ConfigError("gp state: row dimension mismatch");
        for (Eigen::Index c = 0; c < input_dim; ++c)
            state.data.inputs(i, c) = jin[i][c].get<double>();
        for (Eigen::Index c = 0; c < output_dim; ++c)
            state.data.outputs(i, c) = jout[i][c].get<double>();
    }
    if (n > state.hp.max_size) throw ConfigError("gp state: more pairs than max_size");

    if (n > 0) {
        state.gram = gram_matrix(state.data.inputs, state.hp);
        reinvert_dense(state);
        state.mean_weights = fit_linear_mean(state.data);
    }
    return state;
}

}  // namespace fogpr
