#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "dodt/geometry.hpp"

namespace dodt {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hashCombine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL));
}

// Uniform grid over a point set. Cells are keyed by packed integer
// coordinates; used for DBSCAN range queries and track-cloud nearest
// neighbors. Cell coordinates must stay within +-2^20 cells of the origin.
class SpatialHashGrid {
public:
    SpatialHashGrid() = default;
    SpatialHashGrid(const PointCloud& points, double cell_size) { build(points, cell_size); }

    void build(const PointCloud& points, double cell_size);

    // Indices of all points with |p - q| <= radius, ascending.
    void queryRadius(const Vec3& q, double radius, std::vector<int>& out) const;

    // Index of the nearest point within max_dist, or -1.
    int nearestWithin(const Vec3& q, double max_dist) const;

    bool empty() const { return points_ == nullptr || points_->empty(); }

private:
    static std::int64_t packKey(int ix, int iy, int iz) {
        const auto b = [](int c) { return static_cast<std::int64_t>(c + (1 << 20)) & 0x1fffff; };
        return (b(ix) << 42) | (b(iy) << 21) | b(iz);
    }
    int cellOf(double x) const { return static_cast<int>(std::floor(x * inv_cell_)); }

    const PointCloud* points_{nullptr};
    double inv_cell_{1.0};
    double cell_{1.0};
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

}  // namespace dodt
