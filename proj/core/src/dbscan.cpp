#include "dodt/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "dodt/spatial_hash.hpp"

namespace dodt {

PointCloud voxelFilter(const PointCloud& cloud, double voxel_size, int min_points_per_voxel) {
    if (voxel_size <= 0) throw std::invalid_argument("voxel_size must be positive");

    struct Acc {
        Vec3 sum{Vec3::Zero()};
        int count{0};
        int order{0};
    };
    std::unordered_map<std::int64_t, Acc> vox;
    vox.reserve(cloud.size());
    const double inv = 1.0 / voxel_size;
    const auto key = [&](const Vec3& p) {
        const auto c = [&](double x) {
            return (static_cast<std::int64_t>(static_cast<int>(std::floor(x * inv)) + (1 << 20))) &
                   0x1fffff;
        };
        return (c(p.x()) << 42) | (c(p.y()) << 21) | c(p.z());
    };

    int next_order = 0;
    for (const Vec3& p : cloud) {
        Acc& a = vox[key(p)];
        if (a.count == 0) a.order = next_order++;
        a.sum += p;
        ++a.count;
    }

    std::vector<const Acc*> kept;
    kept.reserve(vox.size());
    for (const auto& [k, a] : vox) {
        (void)k;
        if (a.count >= min_points_per_voxel) kept.push_back(&a);
    }
    std::sort(kept.begin(), kept.end(), [](const Acc* a, const Acc* b) { return a->order < b->order; });

    PointCloud out;
    out.reserve(kept.size());
    for (const Acc* a : kept) out.push_back(a->sum / a->count);
    return out;
}

std::vector<std::vector<int>> dbscanCluster(const PointCloud& points, double eps, int min_pts) {
    if (eps <= 0) throw std::invalid_argument("eps must be positive");
    const int n = static_cast<int>(points.size());
    std::vector<std::vector<int>> clusters;
    if (n == 0) return clusters;

    SpatialHashGrid grid(points, eps);
    constexpr int kUnvisited = -2, kNoise = -1;
    std::vector<int> label(n, kUnvisited);
    std::vector<int> neigh, q_neigh;

    for (int i = 0; i < n; ++i) {
        if (label[i] != kUnvisited) continue;
        grid.queryRadius(points[i], eps, neigh);
        // neighbor counts exclude the point itself
        if (static_cast<int>(neigh.size()) - 1 < min_pts) {
            label[i] = kNoise;
            continue;
        }
        const int cid = static_cast<int>(clusters.size());
        clusters.emplace_back();
        label[i] = cid;
        std::deque<int> queue(neigh.begin(), neigh.end());
        while (!queue.empty()) {
            const int j = queue.front();
            queue.pop_front();
            if (label[j] == kNoise) label[j] = cid;  // border point
            if (label[j] != kUnvisited) continue;
            label[j] = cid;
            grid.queryRadius(points[j], eps, q_neigh);
            if (static_cast<int>(q_neigh.size()) - 1 >= min_pts)
                queue.insert(queue.end(), q_neigh.begin(), q_neigh.end());
        }
    }

    for (int i = 0; i < n; ++i) {
        if (label[i] >= 0) clusters[label[i]].push_back(i);
    }
    std::erase_if(clusters, [](const std::vector<int>& c) { return c.empty(); });
    return clusters;
}

std::vector<DbscanDetection> detectDbscan(const DepthImage& depth, const CameraIntrinsics& intr,
                                          const Pose& pose, const DbscanConfig& cfg) {
    CameraIntrinsics clipped = intr;
    clipped.depth_max = std::min(intr.depth_max, cfg.max_range);
    const PointCloud raw = triangulate(depth, clipped, pose, cfg.stride);
    const PointCloud filtered = voxelFilter(raw, cfg.voxel_size, cfg.min_points_per_voxel);

    std::vector<DbscanDetection> out;
    for (const auto& cluster : dbscanCluster(filtered, cfg.eps, cfg.min_pts)) {
        if (static_cast<int>(cluster.size()) < cfg.min_cluster_size) continue;
        DbscanDetection det;
        det.points.reserve(cluster.size());
        Vec3 lo(1e30, 1e30, 1e30), hi(-1e30, -1e30, -1e30);
        for (int idx : cluster) {
            const Vec3& p = filtered[idx];
            det.points.push_back(p);
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        det.box = AABB3D::fromMinMax(lo, hi);
        for (int k = 0; k < 3; ++k)
            det.box.dims[k] = std::max(det.box.dims[k], cfg.min_box_dim);
        out.push_back(std::move(det));
    }
    return out;
}

}  // namespace dodt
