#include "fogpr/features.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fogpr/log.hpp"

namespace fogpr {

namespace {

constexpr double kCoincidentTol = 1e-9;
constexpr double kDegenerateEigenSum = 1e-15;

// Mean nearest-neighbor distance; O(K^2), fine at feedback-cloud sizes.
double mean_spacing(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    if (n < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            best = std::min(best, (cloud.points[i] - cloud.points[j]).norm());
        }
        total += best;
    }
    return total / static_cast<double>(n);
}

void histogram_channel(const std::vector<double>& values, double lo, double hi, int bins,
                       Eigen::Ref<Eigen::VectorXd> out) {
    out.setZero();
    if (values.empty()) return;
    const double width = (hi - lo) / bins;
    for (double v : values) {
        int idx = static_cast<int>(std::floor((v - lo) / width));
        idx = std::clamp(idx, 0, bins - 1);
        out[idx] += 1.0;
    }
    out /= static_cast<double>(values.size());
}

}  // namespace

void PointCloud::validate() const {
    if (points.empty()) throw InputError("point cloud: must contain at least one point");
    if (!normals.empty()) {
        if (normals.size() != points.size())
            throw InputError("point cloud: normals must match point count");
        for (const auto& n : normals)
            if (std::abs(n.norm() - 1.0) > 1e-6)
                throw InputError("point cloud: normals must be unit length");
    }
}

Eigen::Vector3d centroid(const PointCloud& cloud) {
    cloud.validate();
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (const auto& p : cloud.points) sum += p;
    return sum / static_cast<double>(cloud.size());
}

Eigen::VectorXd stacked_positions(const PointCloud& cloud) {
    cloud.validate();
    Eigen::VectorXd out(3 * cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) out.segment<3>(3 * i) = cloud.points[i];
    return out;
}

double pairwise_distance(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2) {
    return (p1 - p2).norm();
}

double surface_variation(const PointCloud& neighborhood) {
    neighborhood.validate();
    const std::size_t n = neighborhood.size();
    if (n < 3) throw InputError("surface_variation: needs at least 3 points");

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : neighborhood.points) mean += p;
    mean /= static_cast<double>(n);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : neighborhood.points) {
        const Eigen::Vector3d d = p - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending
    const double sum = lambda.sum();
    if (sum < kDegenerateEigenSum)
        throw InputError("surface_variation: degenerate neighborhood (zero spread)");
    return std::max(lambda[0], 0.0) / sum;
}

Eigen::VectorXd extended_fpfh(const PointCloud& cloud, int bins) {
    cloud.validate();
    if (!cloud.has_normals()) throw InputError("extended_fpfh: cloud must carry normals");
    if (cloud.size() < 2) throw InputError("extended_fpfh: needs at least 2 points");
    if (bins < 1) throw InputError("extended_fpfh: bins must be >= 1");

    // Centroid point: the cloud point nearest the geometric centroid,
    // carrying its stored normal.
    const Eigen::Vector3d c = centroid(cloud);
    std::size_t c_idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double d = (cloud.points[i] - c).squaredNorm();
        if (d < best) {
            best = d;
            c_idx = i;
        }
    }
    const Eigen::Vector3d& pc = cloud.points[c_idx];
    const Eigen::Vector3d& nc = cloud.normals[c_idx];

    std::vector<double> cos_alpha, cos_phi, theta;
    cos_alpha.reserve(cloud.size());
    cos_phi.reserve(cloud.size());
    theta.reserve(cloud.size());

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (i == c_idx) continue;
        const Eigen::Vector3d diff = cloud.points[i] - pc;
        const double dist = diff.norm();
        if (dist < kCoincidentTol) {
            log::debug("extended_fpfh: point ", i, " coincides with centroid point; skipped");
            continue;
        }
        const Eigen::Vector3d dir = diff / dist;
        const Eigen::Vector3d& ni = cloud.normals[i];
        const Eigen::Vector3d u = nc;
        const Eigen::Vector3d v = dir.cross(u);
        const Eigen::Vector3d w = u.cross(v);
        cos_alpha.push_back(v.dot(ni));
        cos_phi.push_back(u.dot(dir));
        theta.push_back(std::atan2(w.dot(ni), u.dot(ni)));
    }

    Eigen::VectorXd out(3 * bins);
    histogram_channel(cos_alpha, -1.0, 1.0, bins, out.segment(0, bins));
    histogram_channel(cos_phi, -1.0, 1.0, bins, out.segment(bins, bins));
    histogram_channel(theta, -std::numbers::pi, std::numbers::pi, bins,
                      out.segment(2 * bins, bins));
    return out;
}

Eigen::Index FeatureComponent::dimension(std::size_t point_count) const {
    switch (kind) {
        case Kind::Centroid: return 3;
        case Kind::Positions: return 3 * static_cast<Eigen::Index>(point_count);
        case Kind::Distance: return 1;
        case Kind::SurfaceVariation: return 1;
        case Kind::FpfhHistogram: return 3 * bins;
    }
    throw InputError("feature component: unknown kind");
}

std::string FeatureComponent::describe() const {
    switch (kind) {
        case Kind::Centroid: return "centroid";
        case Kind::Positions: return "positions";
        case Kind::Distance:
            return "distance(" + std::to_string(index_a) + "," + std::to_string(index_b) + ")";
        case Kind::SurfaceVariation:
            return "surface_variation(center=" + std::to_string(center_index) + ")";
        case Kind::FpfhHistogram: return "fpfh(bins=" + std::to_string(bins) + ")";
    }
    return "?";
}

Eigen::Index FeatureSpec::dimension() const {
    Eigen::Index total = 0;
    for (const auto& comp : components) total += comp.dimension(point_count);
    return total;
}

Eigen::VectorXd extract(const FeatureSpec& spec, const PointCloud& cloud) {
    if (spec.components.empty()) throw InputError("extract: feature spec has no components");
    cloud.validate();
    if (spec.point_count != 0 && spec.point_count != cloud.size())
        throw InputError("extract: cloud size " + std::to_string(cloud.size()) +
                         " does not match spec point count " + std::to_string(spec.point_count));

    Eigen::VectorXd out(spec.dimension());
    Eigen::Index offset = 0;
    for (std::size_t ci = 0; ci < spec.components.size(); ++ci) {
        const FeatureComponent& comp = spec.components[ci];
        const Eigen::Index dim = comp.dimension(cloud.size());
        try {
            switch (comp.kind) {
                case FeatureComponent::Kind::Centroid:
                    out.segment(offset, 3) = centroid(cloud);
                    break;
                case FeatureComponent::Kind::Positions:
                    out.segment(offset, dim) = stacked_positions(cloud);
                    break;
                case FeatureComponent::Kind::Distance: {
                    const int n = static_cast<int>(cloud.size());
                    if (comp.index_a < 0 || comp.index_a >= n || comp.index_b < 0 ||
                        comp.index_b >= n)
                        throw InputError("distance indices out of range");
                    out[offset] = pairwise_distance(cloud.points[comp.index_a],
                                                    cloud.points[comp.index_b]);
                    break;
                }
                case FeatureComponent::Kind::SurfaceVariation: {
                    const int n = static_cast<int>(cloud.size());
                    if (comp.center_index < 0 || comp.center_index >= n)
                        throw InputError("surface_variation center out of range");
                    double radius = comp.radius;
                    if (radius <= 0.0) radius = 3.0 * mean_spacing(cloud);
                    const Eigen::Vector3d& center = cloud.points[comp.center_index];
                    PointCloud neighborhood;
                    for (const auto& p : cloud.points)
                        if ((p - center).norm() <= radius) neighborhood.points.push_back(p);
                    out[offset] = surface_variation(neighborhood);
                    break;
                }
                case FeatureComponent::Kind::FpfhHistogram:
                    out.segment(offset, dim) = extended_fpfh(cloud, comp.bins);
                    break;
            }
        } catch (const InputError& err) {
            throw InputError("extract: component " + std::to_string(ci) + " (" +
                             comp.describe() + "): " + err.what());
        }
        if (comp.weight != 1.0) out.segment(offset, dim) *= comp.weight;
        offset += dim;
    }
    return out * spec.scale;
}

}  // namespace fogpr
