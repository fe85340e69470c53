#include "fogpr/sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <queue>

#include "fogpr/log.hpp"

namespace fogpr {

namespace {

// Stretch energy derivatives for elongation s = |d| - L. With stiffening
// coefficient kappa the effective stiffness grows with strain:
//   E(s) = 1/2 k s^2 + 1/4 k kappa s^4 / Lr^2,  Lr = max(L, tiny) reference.
struct StretchTerms {
    double e = 0.0;
    double de = 0.0;   // dE/ds
    double dde = 0.0;  // d2E/ds2
};

StretchTerms stretch_terms(const Spring& s, double stretch, double stiffening) {
    StretchTerms t;
    const double k = s.stiffness;
    t.e = 0.5 * k * stretch * stretch;
    t.de = k * stretch;
    t.dde = k;
    if (stiffening > 0.0 && s.rest_length > 0.0) {
        const double lr2 = s.rest_length * s.rest_length;
        t.e += 0.25 * k * stiffening * stretch * stretch * stretch * stretch / lr2;
        t.de += k * stiffening * stretch * stretch * stretch / lr2;
        t.dde += 3.0 * k * stiffening * stretch * stretch / lr2;
    }
    return t;
}

}  // namespace

std::vector<int> World::indices_with_role(NodeRole role) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < roles.size(); ++i)
        if (roles[i] == role) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> World::free_nodes() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < roles.size(); ++i)
        if (roles[i] != NodeRole::Manipulated) out.push_back(static_cast<int>(i));
    return out;
}

Eigen::VectorXd World::manipulated_positions() const {
    const std::vector<int> manip = manipulated();
    Eigen::VectorXd out(3 * manip.size());
    for (std::size_t i = 0; i < manip.size(); ++i) out.segment<3>(3 * i) = nodes[manip[i]];
    return out;
}

void World::validate() const {
    const int n = static_cast<int>(nodes.size());
    if (n == 0) throw InputError("world: no nodes");
    if (roles.size() != nodes.size()) throw InputError("world: roles must match nodes");
    if (manipulated().empty()) throw InputError("world: needs at least one manipulated node");
    if (feedback().empty()) throw InputError("world: needs at least one feedback node");
    for (const auto& s : springs) {
        if (s.i < 0 || s.i >= n || s.j < 0 || s.j >= n || s.i == s.j)
            throw InputError("world: spring endpoints out of range");
        if (!(s.stiffness > 0.0)) throw InputError("world: spring stiffness must be > 0");
        if (s.rest_length < 0.0) throw InputError("world: negative rest length");
    }
    for (const auto& b : bending) {
        if (b.i < 0 || b.i >= n || b.j < 0 || b.j >= n || b.k < 0 || b.k >= n)
            throw InputError("world: bending indices out of range");
        if (!(b.stiffness > 0.0)) throw InputError("world: bending stiffness must be > 0");
    }
    // Spring graph connectivity (bending triples do not transmit stretch).
    std::vector<char> seen(nodes.size(), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    std::vector<std::vector<int>> adj(nodes.size());
    for (const auto& s : springs) {
        adj[s.i].push_back(s.j);
        adj[s.j].push_back(s.i);
    }
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                frontier.push(w);
            }
    }
    if (std::count(seen.begin(), seen.end(), 1) != n)
        throw InputError("world: spring graph must be connected");
}

double potential_energy(const World& world) {
    double energy = 0.0;
    for (const auto& s : world.springs) {
        const double len = (world.nodes[s.i] - world.nodes[s.j]).norm();
        energy += stretch_terms(s, len - s.rest_length, world.stiffening).e;
    }
    for (const auto& b : world.bending) {
        const Eigen::Vector3d u = world.nodes[b.i] - world.nodes[b.j];
        const Eigen::Vector3d v = world.nodes[b.k] - world.nodes[b.j];
        const double lu = u.norm();
        const double lv = v.norm();
        if (lu < 1e-12 || lv < 1e-12) continue;
        energy += b.stiffness * (1.0 + u.dot(v) / (lu * lv));
    }
    for (const auto& p : world.nodes) energy -= world.node_mass * world.gravity.dot(p);
    return energy;
}

Eigen::VectorXd energy_gradient(const World& world) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(3 * world.nodes.size());
    for (const auto& s : world.springs) {
        const Eigen::Vector3d d = world.nodes[s.i] - world.nodes[s.j];
        const double len = d.norm();
        if (len < 1e-12) continue;  // coincident endpoints exert no stretch force
        const Eigen::Vector3d dir = d / len;
        const double de = stretch_terms(s, len - s.rest_length, world.stiffening).de;
        grad.segment<3>(3 * s.i) += de * dir;
        grad.segment<3>(3 * s.j) -= de * dir;
    }
    for (const auto& b : world.bending) {
        const Eigen::Vector3d u = world.nodes[b.i] - world.nodes[b.j];
        const Eigen::Vector3d v = world.nodes[b.k] - world.nodes[b.j];
        const double lu = u.norm();
        const double lv = v.norm();
        if (lu < 1e-12 || lv < 1e-12) continue;
        const Eigen::Vector3d uh = u / lu;
        const Eigen::Vector3d vh = v / lv;
        const double c = uh.dot(vh);
        const Eigen::Vector3d gu = (vh - c * uh) / lu;
        const Eigen::Vector3d gv = (uh - c * vh) / lv;
        grad.segment<3>(3 * b.i) += b.stiffness * gu;
        grad.segment<3>(3 * b.k) += b.stiffness * gv;
        grad.segment<3>(3 * b.j) -= b.stiffness * (gu + gv);
    }
    for (std::size_t i = 0; i < world.nodes.size(); ++i)
        grad.segment<3>(3 * i) -= world.node_mass * world.gravity;
    return grad;
}

double free_gradient_norm(const World& world) {
    const Eigen::VectorXd grad = energy_gradient(world);
    double worst = 0.0;
    for (int idx : world.free_nodes())
        worst = std::max(worst, grad.segment<3>(3 * idx).cwiseAbs().maxCoeff());
    return worst;
}

namespace {

// Dense Hessian over the free nodes only.
Eigen::MatrixXd free_hessian(const World& world, const std::vector<int>& free,
                             const std::vector<int>& free_slot) {
    const Eigen::Index dof = 3 * static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dof, dof);

    auto add_block = [&](int node_a, int node_b, const Eigen::Matrix3d& block) {
        const int sa = free_slot[node_a];
        const int sb = free_slot[node_b];
        if (sa < 0 || sb < 0) return;
        hess.block<3, 3>(3 * sa, 3 * sb) += block;
    };

    for (const auto& s : world.springs) {
        const Eigen::Vector3d d = world.nodes[s.i] - world.nodes[s.j];
        const double len = d.norm();
        if (len < 1e-12) continue;
        const Eigen::Vector3d dir = d / len;
        const StretchTerms t = stretch_terms(s, len - s.rest_length, world.stiffening);
        const Eigen::Matrix3d proj = dir * dir.transpose();
        const Eigen::Matrix3d block =
            t.dde * proj + (t.de / len) * (Eigen::Matrix3d::Identity() - proj);
        add_block(s.i, s.i, block);
        add_block(s.j, s.j, block);
        add_block(s.i, s.j, -block);
        add_block(s.j, s.i, -block);
    }

    for (const auto& b : world.bending) {
        const Eigen::Vector3d u = world.nodes[b.i] - world.nodes[b.j];
        const Eigen::Vector3d v = world.nodes[b.k] - world.nodes[b.j];
        const double lu = u.norm();
        const double lv = v.norm();
        if (lu < 1e-12 || lv < 1e-12) continue;
        const Eigen::Vector3d uh = u / lu;
        const Eigen::Vector3d vh = v / lv;
        const double c = uh.dot(vh);
        const Eigen::Vector3d gu = (vh - c * uh) / lu;
        const Eigen::Vector3d gv = (uh - c * vh) / lv;
        const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();

        const Eigen::Matrix3d huu =
            -(gu * uh.transpose() + uh * gu.transpose()) / lu - (c / (lu * lu)) * (i3 - uh * uh.transpose());
        const Eigen::Matrix3d hvv =
            -(gv * vh.transpose() + vh * gv.transpose()) / lv - (c / (lv * lv)) * (i3 - vh * vh.transpose());
        const Eigen::Matrix3d huv = (i3 - vh * vh.transpose()) / (lu * lv) - (uh * gv.transpose()) / lu;

        const double k = b.stiffness;
        add_block(b.i, b.i, k * huu);
        add_block(b.k, b.k, k * hvv);
        add_block(b.i, b.k, k * huv);
        add_block(b.k, b.i, k * huv.transpose());
        add_block(b.i, b.j, -k * (huu + huv));
        add_block(b.j, b.i, -k * (huu + huv).transpose());
        add_block(b.k, b.j, -k * (hvv + huv.transpose()));
        add_block(b.j, b.k, -k * (hvv + huv.transpose()).transpose());
        add_block(b.j, b.j, k * (huu + hvv + huv + huv.transpose()));
    }
    return hess;
}

}  // namespace

Eigen::MatrixXd free_hessian_matrix(const World& world) {
    const std::vector<int> free = world.free_nodes();
    std::vector<int> free_slot(world.nodes.size(), -1);
    for (std::size_t i = 0; i < free.size(); ++i) free_slot[free[i]] = static_cast<int>(i);
    return free_hessian(world, free, free_slot);
}

namespace {

Eigen::VectorXd gather_free(const Eigen::VectorXd& full, const std::vector<int>& free) {
    Eigen::VectorXd out(3 * free.size());
    for (std::size_t i = 0; i < free.size(); ++i)
        out.segment<3>(3 * i) = full.segment<3>(3 * free[i]);
    return out;
}

void scatter_free(World& world, const std::vector<int>& free, const Eigen::VectorXd& coords) {
    for (std::size_t i = 0; i < free.size(); ++i)
        world.nodes[free[i]] = coords.segment<3>(3 * i);
}

}  // namespace

World solve_equilibrium(World world, const Eigen::VectorXd& manipulated_positions,
                        const EquilibriumSettings& settings, SolveStats* stats) {
    const std::vector<int> manip = world.manipulated();
    if (manipulated_positions.size() != static_cast<Eigen::Index>(3 * manip.size()))
        throw InputError("solve_equilibrium: manipulated position vector has wrong size");
    if (!manipulated_positions.allFinite())
        throw InputError("solve_equilibrium: manipulated positions must be finite");
    for (std::size_t i = 0; i < manip.size(); ++i)
        world.nodes[manip[i]] = manipulated_positions.segment<3>(3 * i);

    const std::vector<int> free = world.free_nodes();
    std::vector<int> free_slot(world.nodes.size(), -1);
    for (std::size_t i = 0; i < free.size(); ++i) free_slot[free[i]] = static_cast<int>(i);

    const Eigen::Index dof = 3 * static_cast<Eigen::Index>(free.size());
    if (stats) {
        stats->iterations = 0;
        stats->energy_trace.clear();
    }
    if (dof == 0) {
        if (stats) stats->residual = 0.0;
        return world;
    }

    double energy = potential_energy(world);
    if (stats) stats->energy_trace.push_back(energy);

    auto current_free = [&] {
        Eigen::VectorXd coords(3 * free.size());
        for (std::size_t i = 0; i < free.size(); ++i)
            coords.segment<3>(3 * i) = world.nodes[free[i]];
        return coords;
    };

    // Gradient-zero points of the bending term include folded-back maxima
    // and straight-under-compression saddles; a converged state is only
    // accepted once the free Hessian has no substantially negative
    // curvature, otherwise the solver nudges along the most negative
    // eigendirection and keeps going.
    int escapes_left = 8;
    auto try_escape_saddle = [&]() -> bool {
        if (escapes_left <= 0) return false;
        const Eigen::MatrixXd hess = free_hessian(world, free, free_slot);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
        const double lambda_min = eig.eigenvalues()[0];
        const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
        if (lambda_min >= -1e-8 * scale) return false;

        Eigen::VectorXd mode = eig.eigenvectors().col(0);
        for (Eigen::Index i = 0; i < mode.size(); ++i) {
            if (std::abs(mode[i]) > 1e-12) {
                if (mode[i] < 0) mode = -mode;
                break;
            }
        }
        const Eigen::VectorXd base = current_free();
        for (double step = 1e-3; step >= 1e-9; step *= 0.1) {
            scatter_free(world, free, base + step * mode);
            const double trial = potential_energy(world);
            if (trial < energy) {
                energy = trial;
                --escapes_left;
                if (stats) {
                    ++stats->saddle_escapes;
                    stats->energy_trace.push_back(energy);
                }
                return true;
            }
        }
        scatter_free(world, free, base);
        return false;
    };

    double damping = 0.0;
    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        const Eigen::VectorXd full_grad = energy_gradient(world);
        const Eigen::VectorXd grad = gather_free(full_grad, free);
        const double residual = grad.cwiseAbs().maxCoeff();
        if (stats) {
            stats->iterations = iter;
            stats->residual = residual;
        }
        if (residual <= settings.gradient_tol) {
            if (try_escape_saddle()) continue;
            return world;
        }

        const Eigen::MatrixXd hess = free_hessian(world, free, free_slot);
        const Eigen::VectorXd base = current_free();

        bool accepted = false;
        for (int attempt = 0; attempt < 16 && !accepted; ++attempt) {
            Eigen::MatrixXd damped = hess;
            if (damping > 0.0) damped.diagonal().array() += damping;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            Eigen::VectorXd direction;
            // Only positive-definite systems give trustworthy Newton steps.
            bool usable =
                (ldlt.info() == Eigen::Success) && ldlt.vectorD().minCoeff() > 0.0;
            if (usable) {
                direction = ldlt.solve(-grad);
                usable = direction.allFinite() && grad.dot(direction) < 0.0;
            }
            if (!usable) {
                if (attempt == 15) {
                    direction = -grad;  // gradient fallback
                } else {
                    damping = (damping == 0.0) ? 1e-6 : damping * 10.0;
                    continue;
                }
            }

            // Backtracking line search on the energy. Near the minimum the
            // energy decrease falls under double granularity while the
            // gradient still shrinks, so flat-to-roundoff steps also count.
            double step = 1.0;
            const double slope = grad.dot(direction);
            const double flat_tol = 1e-12 * (1.0 + std::abs(energy));
            for (int ls = 0; ls < 40; ++ls) {
                scatter_free(world, free, base + step * direction);
                const double trial = potential_energy(world);
                if (trial <= energy + 1e-4 * step * slope || trial <= energy + flat_tol) {
                    energy = trial;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                scatter_free(world, free, base);
                damping = (damping == 0.0) ? 1e-6 : damping * 10.0;
            }
        }

        if (!accepted) {
            // Last resort: a tiny gradient step; if even that cannot reduce
            // the energy we are at numerical stagnation.
            const Eigen::VectorXd direction = -grad;
            double step = 1e-6 / std::max(1.0, grad.norm());
            scatter_free(world, free, base + step * direction);
            const double trial = potential_energy(world);
            if (trial < energy) {
                energy = trial;
            } else {
                scatter_free(world, free, base);
                throw EquilibriumError(
                    "solve_equilibrium: stagnated with residual " + std::to_string(residual),
                    residual);
            }
        }
        if (stats) stats->energy_trace.push_back(energy);
        damping *= 0.25;
        if (damping < 1e-12) damping = 0.0;
    }

    const double residual = free_gradient_norm(world);
    if (residual <= settings.gradient_tol) {
        if (stats) stats->residual = residual;
        return world;
    }
    throw EquilibriumError("solve_equilibrium: no convergence within " +
                               std::to_string(settings.max_iterations) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           residual);
}

PointCloud feedback_cloud(const World& world) {
    PointCloud cloud;
    const std::vector<int> fb = world.feedback();
    cloud.points.reserve(fb.size());
    for (int idx : fb) cloud.points.push_back(world.nodes[idx]);

    if (!world.faces.empty()) {
        // Area-weighted vertex normals from the surface triangles.
        std::vector<Eigen::Vector3d> accum(world.nodes.size(), Eigen::Vector3d::Zero());
        for (const auto& f : world.faces) {
            const Eigen::Vector3d n = (world.nodes[f[1]] - world.nodes[f[0]])
                                          .cross(world.nodes[f[2]] - world.nodes[f[0]]);
            accum[f[0]] += n;
            accum[f[1]] += n;
            accum[f[2]] += n;
        }
        cloud.normals.reserve(fb.size());
        for (int idx : fb) {
            const double norm = accum[idx].norm();
            if (norm < 1e-12)
                throw NumericalError("feedback_cloud: degenerate vertex normal at node " +
                                     std::to_string(idx));
            cloud.normals.push_back(accum[idx] / norm);
        }
    }
    return cloud;
}

std::pair<World, Eigen::VectorXd> apply_control(const World& world,
                                                const Eigen::VectorXd& delta_pm,
                                                const FeatureSpec& spec,
                                                const EquilibriumSettings& settings) {
    const Eigen::VectorXd before = extract(spec, feedback_cloud(world));
    const Eigen::VectorXd target = world.manipulated_positions() + delta_pm;
    World next = solve_equilibrium(world, target, settings);
    const Eigen::VectorXd after = extract(spec, feedback_cloud(next));
    return {std::move(next), after - before};
}

Eigen::MatrixXd ground_truth_jacobian(const World& world, const FeatureSpec& spec, double h,
                                      const EquilibriumSettings& settings) {
    if (!(h > 0.0)) throw InputError("ground_truth_jacobian: step must be > 0");
    const Eigen::VectorXd base = world.manipulated_positions();
    const Eigen::Index m = base.size();
    Eigen::MatrixXd jac(spec.dimension(), m);
    for (Eigen::Index q = 0; q < m; ++q) {
        Eigen::VectorXd plus = base;
        Eigen::VectorXd minus = base;
        plus[q] += h;
        minus[q] -= h;
        const Eigen::VectorXd x_plus =
            extract(spec, feedback_cloud(solve_equilibrium(world, plus, settings)));
        const Eigen::VectorXd x_minus =
            extract(spec, feedback_cloud(solve_equilibrium(world, minus, settings)));
        jac.col(q) = (x_plus - x_minus) / (2.0 * h);
    }
    return jac;
}

namespace {

int grid_index(int row, int col, int cols) { return row * cols + col; }

World build_grid(int rows, int cols, double spacing, double stretch_k, double bend_k,
                 double diagonal_k, const Eigen::Vector3d& gravity, double node_mass,
                 double stiffening) {
    if (rows < 2 || cols < 2) throw ConfigError("grid template: needs rows, cols >= 2");
    World world;
    world.gravity = gravity;
    world.node_mass = node_mass;
    world.stiffening = stiffening;
    world.nodes.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            world.nodes.emplace_back(c * spacing, r * spacing, 0.0);

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c)
            world.springs.push_back(
                {grid_index(r, c, cols), grid_index(r, c + 1, cols), spacing, stretch_k});
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < cols; ++c)
            world.springs.push_back(
                {grid_index(r, c, cols), grid_index(r + 1, c, cols), spacing, stretch_k});
    const double diag_rest = spacing * std::sqrt(2.0);
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) {
            world.springs.push_back(
                {grid_index(r, c, cols), grid_index(r + 1, c + 1, cols), diag_rest, diagonal_k});
            world.springs.push_back(
                {grid_index(r, c + 1, cols), grid_index(r + 1, c, cols), diag_rest, diagonal_k});
        }

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 2 < cols; ++c)
            world.bending.push_back({grid_index(r, c, cols), grid_index(r, c + 1, cols),
                                     grid_index(r, c + 2, cols), bend_k});
    for (int r = 0; r + 2 < rows; ++r)
        for (int c = 0; c < cols; ++c)
            world.bending.push_back({grid_index(r, c, cols), grid_index(r + 1, c, cols),
                                     grid_index(r + 2, c, cols), bend_k});

    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) {
            world.faces.push_back({grid_index(r, c, cols), grid_index(r, c + 1, cols),
                                   grid_index(r + 1, c, cols)});
            world.faces.push_back({grid_index(r, c + 1, cols), grid_index(r + 1, c + 1, cols),
                                   grid_index(r + 1, c, cols)});
        }

    // Two corners of the first row are grabbed; the rest feeds back.
    world.roles.assign(world.nodes.size(), NodeRole::Feedback);
    world.roles[grid_index(0, 0, cols)] = NodeRole::Manipulated;
    world.roles[grid_index(0, cols - 1, cols)] = NodeRole::Manipulated;
    return world;
}

}  // namespace

World build_world(const std::string& template_name, const nlohmann::json& params) {
    auto get_num = [&](const char* key, double fallback) {
        return params.contains(key) ? params.at(key).get<double>() : fallback;
    };
    auto get_int = [&](const char* key, int fallback) {
        return params.contains(key) ? params.at(key).get<int>() : fallback;
    };

    if (template_name == "rod") {
        const int n = get_int("nodes", 20);
        if (n < 4) throw ConfigError("rod template: needs at least 4 nodes");
        const double spacing = get_num("spacing", 0.05);
        const double stretch_k = get_num("stretch_stiffness", 50.0);
        const double bend_k = get_num("bending_stiffness", 0.05);
        // Positive pre_strain builds the rod with its grips pinned wider than
        // the rest span, starting the task in the taut regime.
        const double pre_strain = get_num("pre_strain", 0.0);
        World world;
        world.stiffening = get_num("stiffening", 0.0);
        world.node_mass = get_num("node_mass", 0.05);
        if (get_num("gravity", 0.0) != 0.0)
            world.gravity = Eigen::Vector3d(0.0, 0.0, -get_num("gravity", 0.0));
        world.nodes.reserve(n);
        for (int i = 0; i < n; ++i)
            world.nodes.emplace_back(i * spacing * (1.0 + pre_strain), 0.0, 0.0);
        for (int i = 0; i + 1 < n; ++i) world.springs.push_back({i, i + 1, spacing, stretch_k});
        for (int i = 0; i + 2 < n; ++i) world.bending.push_back({i, i + 1, i + 2, bend_k});
        world.roles.assign(n, NodeRole::Feedback);
        world.roles[0] = NodeRole::Manipulated;
        world.roles[n - 1] = NodeRole::Manipulated;
        if (n >= 6) {
            // The neighbors of the grips are occluded in practice; simulate
            // them without exposing them to the features.
            world.roles[1] = NodeRole::Uninformative;
            world.roles[n - 2] = NodeRole::Uninformative;
        }
        world.validate();
        return world;
    }
    if (template_name == "sheet") {
        const int rows = get_int("rows", 4);
        const int cols = get_int("cols", 4);
        World world = build_grid(rows, cols, get_num("spacing", 0.05),
                                 get_num("stretch_stiffness", 200.0),
                                 get_num("bending_stiffness", 1.0),
                                 get_num("diagonal_stiffness", 100.0), Eigen::Vector3d::Zero(),
                                 get_num("node_mass", 0.05), get_num("stiffening", 0.0));
        world.validate();
        return world;
    }
    if (template_name == "cloth_grid") {
        const int rows = get_int("rows", 5);
        const int cols = get_int("cols", 5);
        const double g = get_num("gravity", 9.8);
        World world = build_grid(rows, cols, get_num("spacing", 0.05),
                                 get_num("stretch_stiffness", 100.0),
                                 get_num("bending_stiffness", 0.005),
                                 get_num("diagonal_stiffness", 50.0),
                                 Eigen::Vector3d(0.0, 0.0, -g), get_num("node_mass", 0.01),
                                 get_num("stiffening", 0.0));
        world.validate();
        return world;
    }
    throw ConfigError("build_world: unknown template '" + template_name + "'");
}

}  // namespace fogpr
