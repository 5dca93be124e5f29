#include "dodt/spatial_hash.hpp"

#include <algorithm>
#include <cmath>

namespace dodt {

void SpatialHashGrid::build(const PointCloud& points, double cell_size) {
    points_ = &points;
    cell_ = cell_size;
    inv_cell_ = 1.0 / cell_size;
    cells_.clear();
    cells_.reserve(points.size());
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        const Vec3& p = points[i];
        cells_[packKey(cellOf(p.x()), cellOf(p.y()), cellOf(p.z()))].push_back(i);
    }
}

void SpatialHashGrid::queryRadius(const Vec3& q, double radius, std::vector<int>& out) const {
    out.clear();
    if (empty()) return;
    const double r2 = radius * radius;
    const int lo[3] = {cellOf(q.x() - radius), cellOf(q.y() - radius), cellOf(q.z() - radius)};
    const int hi[3] = {cellOf(q.x() + radius), cellOf(q.y() + radius), cellOf(q.z() + radius)};
    for (int ix = lo[0]; ix <= hi[0]; ++ix)
        for (int iy = lo[1]; iy <= hi[1]; ++iy)
            for (int iz = lo[2]; iz <= hi[2]; ++iz) {
                const auto it = cells_.find(packKey(ix, iy, iz));
                if (it == cells_.end()) continue;
                for (int idx : it->second) {
                    if (((*points_)[idx] - q).squaredNorm() <= r2) out.push_back(idx);
                }
            }
    std::sort(out.begin(), out.end());
}

int SpatialHashGrid::nearestWithin(const Vec3& q, double max_dist) const {
    if (empty()) return -1;
    const int cx = cellOf(q.x()), cy = cellOf(q.y()), cz = cellOf(q.z());
    const int max_ring = static_cast<int>(std::ceil(max_dist * inv_cell_)) + 1;
    double best2 = max_dist * max_dist;
    int best = -1;
    for (int ring = 0; ring <= max_ring; ++ring) {
        // cells closer than (ring-1) cell widths can no longer beat the best hit
        if (best >= 0) {
            const double reach = (ring - 1) * cell_;
            if (reach > 0 && reach * reach > best2) break;
        }
        for (int ix = cx - ring; ix <= cx + ring; ++ix)
            for (int iy = cy - ring; iy <= cy + ring; ++iy)
                for (int iz = cz - ring; iz <= cz + ring; ++iz) {
                    const int d = std::max({std::abs(ix - cx), std::abs(iy - cy), std::abs(iz - cz)});
                    if (d != ring) continue;  // shell only
                    const auto it = cells_.find(packKey(ix, iy, iz));
                    if (it == cells_.end()) continue;
                    for (int idx : it->second) {
                        const double d2 = ((*points_)[idx] - q).squaredNorm();
                        if (d2 < best2 || (d2 == best2 && (best < 0 || idx < best))) {
                            best2 = d2;
                            best = idx;
                        }
                    }
                }
    }
    return best;
}

}  // namespace dodt
