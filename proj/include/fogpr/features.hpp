#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fogpr/types.hpp"

namespace fogpr {

struct PointCloud {
    std::vector<Eigen::Vector3d> points;
    std::vector<Eigen::Vector3d> normals;  // empty, or unit vectors matching points

    bool has_normals() const { return !normals.empty(); }
    std::size_t size() const { return points.size(); }
    void validate() const;
};

Eigen::Vector3d centroid(const PointCloud& cloud);

// Concatenated point coordinates in cloud order, length 3K.
Eigen::VectorXd stacked_positions(const PointCloud& cloud);

double pairwise_distance(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2);

// lambda_min / (lambda_0 + lambda_1 + lambda_2) of the neighborhood
// covariance; in [0, 1/3]. Needs >= 3 points and a non-degenerate spread.
double surface_variation(const PointCloud& neighborhood);

// Darboux-frame angle triple of every point against the centroid point,
// histogrammed per channel (cos alpha, cos phi in [-1,1]; theta in [-pi,pi])
// into `bins` equal-width bins, each channel normalized to sum 1.
// Output length 3*bins. Points coincident with the centroid point are
// skipped. Invariant under rigid motions.
Eigen::VectorXd extended_fpfh(const PointCloud& cloud, int bins);

struct FeatureComponent {
    enum class Kind { Centroid, Positions, Distance, SurfaceVariation, FpfhHistogram };
    Kind kind = Kind::Centroid;
    int index_a = 0;      // Distance: first point
    int index_b = 1;      // Distance: second point
    int center_index = 0; // SurfaceVariation: neighborhood center
    double radius = 0.0;  // SurfaceVariation: 0 = auto (3x mean spacing)
    int bins = 45;        // FpfhHistogram
    double weight = 1.0;  // per-component scaling in the assembled vector

    Eigen::Index dimension(std::size_t point_count) const;
    std::string describe() const;
};

// Task-level feature map C: ordered components evaluated on the feedback
// cloud and concatenated, then scaled by `scale` (feature normalization knob
// so kernel distances land at a useful magnitude).
struct FeatureSpec {
    std::vector<FeatureComponent> components;
    std::size_t point_count = 0;  // feedback cloud size the spec is bound to
    double scale = 1.0;

    Eigen::Index dimension() const;
};

Eigen::VectorXd extract(const FeatureSpec& spec, const PointCloud& cloud);

}  // namespace fogpr
