#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fogpr/features.hpp"
#include "fogpr/types.hpp"

#include "json.hpp"

namespace fogpr {

enum class NodeRole { Manipulated, Feedback, Uninformative };

struct Spring {
    int i = 0;
    int j = 0;
    double rest_length = 0.0;
    double stiffness = 1.0;
};

// Bending resistance at the middle node j of a straight-rest triple.
// Energy k * (1 + cos(theta_ijk)): zero when straight, quadratic in the
// deviation angle to leading order.
struct BendingTriple {
    int i = 0;
    int j = 0;
    int k = 0;
    double stiffness = 0.0;
};

struct World {
    std::vector<Eigen::Vector3d> nodes;
    std::vector<Spring> springs;
    std::vector<BendingTriple> bending;
    std::vector<NodeRole> roles;
    Eigen::Vector3d gravity = Eigen::Vector3d::Zero();  // acceleration
    double node_mass = 0.05;
    double stiffening = 0.0;  // strain-dependent stiffness coefficient
    std::vector<std::array<int, 3>> faces;  // surface triangles, for normals

    std::vector<int> indices_with_role(NodeRole role) const;
    std::vector<int> manipulated() const { return indices_with_role(NodeRole::Manipulated); }
    std::vector<int> feedback() const { return indices_with_role(NodeRole::Feedback); }
    std::vector<int> free_nodes() const;  // feedback + uninformative

    // Stacked coordinates of the manipulated nodes, 3 per node.
    Eigen::VectorXd manipulated_positions() const;

    void validate() const;  // connectivity, roles, stiffness signs
};

// Total potential: stretch springs (with optional strain stiffening),
// bending triples, gravity.
double potential_energy(const World& world);

// dU/dp over all nodes, stacked 3 per node.
Eigen::VectorXd energy_gradient(const World& world);

// dU/dp restricted to the free nodes, infinity norm. The equilibrium
// residual reported by the solver.
double free_gradient_norm(const World& world);

// d2U/dp2 over the free nodes (3 per node, in free_nodes() order). The
// solver's Newton matrix.
Eigen::MatrixXd free_hessian_matrix(const World& world);

struct EquilibriumSettings {
    double gradient_tol = 1e-8;
    int max_iterations = 500;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
    int saddle_escapes = 0;
    std::vector<double> energy_trace;  // energy after each accepted step
};

// Pins the manipulated nodes at `manipulated_positions` (stacked, 3 per
// node) and settles the free nodes to a stationary point of the potential.
// Damped Newton with a gradient-descent fallback; throws EquilibriumError on
// non-convergence.
World solve_equilibrium(World world, const Eigen::VectorXd& manipulated_positions,
                        const EquilibriumSettings& settings = {}, SolveStats* stats = nullptr);

// Feedback nodes as a point cloud, in node-index order. Vertex normals are
// attached when the world carries surface faces.
PointCloud feedback_cloud(const World& world);

// Shifts the manipulated nodes by `delta_pm`, re-solves the equilibrium and
// returns the new world together with the realized feature change.
std::pair<World, Eigen::VectorXd> apply_control(const World& world,
                                                const Eigen::VectorXd& delta_pm,
                                                const FeatureSpec& spec,
                                                const EquilibriumSettings& settings = {});

// Central-difference sensitivity of the feature vector with respect to each
// manipulated coordinate, probed from the given (equilibrated) world.
// Shape dim(x) by dim(p^m).
Eigen::MatrixXd ground_truth_jacobian(const World& world, const FeatureSpec& spec, double h,
                                      const EquilibriumSettings& settings = {});

// Templates: rod (chain, ends grabbed), sheet (stiff grid), cloth_grid
// (soft grid under gravity). Unknown names raise ConfigError.
World build_world(const std::string& template_name, const nlohmann::json& params);

}  // namespace fogpr
