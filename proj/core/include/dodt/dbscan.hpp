#pragma once

#include <vector>

#include "dodt/geometry.hpp"

namespace dodt {

struct DbscanConfig {
    double voxel_size{0.1};
    int min_points_per_voxel{2};  // raw points a voxel needs to survive filtering
    double eps{0.3};
    int min_pts{4};            // neighbors (excluding self) a core point needs
    int min_cluster_size{15};  // filtered points per emitted cluster
    double max_range{3.0};     // dense-range cutoff
    int stride{2};
    // tight boxes of near-planar clusters are inflated to at least this; keeps
    // thin structures fusable against histogram-quantized boxes
    double min_box_dim{0.1};
};

// Occupancy-style downsample: one centroid per voxel holding at least
// min_points_per_voxel raw points, in first-occupied order.
PointCloud voxelFilter(const PointCloud& cloud, double voxel_size, int min_points_per_voxel);

// Classic DBSCAN over a voxel-hash neighborhood. Returns clusters as ascending
// index lists, in discovery order; noise points belong to no cluster.
std::vector<std::vector<int>> dbscanCluster(const PointCloud& points, double eps, int min_pts);

struct DbscanDetection {
    AABB3D box;
    PointCloud points;  // the cluster's filtered points
};

std::vector<DbscanDetection> detectDbscan(const DepthImage& depth, const CameraIntrinsics& intr,
                                          const Pose& pose, const DbscanConfig& cfg);

}  // namespace dodt
