#include "dodt/udepth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dodt {

namespace {

// disjoint-set over run indices
struct RunForest {
    std::vector<int> parent;
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

int UdepthConfig::effectiveCountThreshold(int image_height) const {
    if (count_threshold > 0) return count_threshold;
    return std::max(4, static_cast<int>(std::lround(0.02 * image_height)));
}

UDepthMap computeUDepth(const DepthImage& depth, const CameraIntrinsics& intr,
                        const UdepthConfig& cfg) {
    intr.validate();
    if (!depth.sizeMatches(intr)) throw std::invalid_argument("depth image size mismatch");
    if (cfg.bin_size <= 0) throw std::invalid_argument("bin_size must be positive");

    UDepthMap map;
    map.width = depth.width;
    map.range_min = intr.depth_min;
    map.bin_size = cfg.bin_size;
    const double range_max = std::min(intr.depth_max, cfg.range_max);
    map.num_bins = std::max(1, static_cast<int>(std::ceil((range_max - map.range_min) / cfg.bin_size)));
    map.counts.assign(static_cast<size_t>(map.num_bins) * map.width, 0);

    const double inv_bin = 1.0 / cfg.bin_size;
    for (int v = 0; v < depth.height; ++v) {
        const std::uint16_t* row = depth.data.data() + static_cast<size_t>(v) * depth.width;
        for (int u = 0; u < depth.width; ++u) {
            if (row[u] == 0) continue;
            const double d = row[u] * intr.depth_scale;
            if (d < map.range_min || d > range_max) continue;
            int bin = static_cast<int>((d - map.range_min) * inv_bin);
            if (bin >= map.num_bins) bin = map.num_bins - 1;
            ++map.counts[static_cast<size_t>(bin) * map.width + u];
        }
    }
    return map;
}

std::vector<UdepthRegion> groupLines(const UDepthMap& map, int count_threshold, int min_width) {
    struct Run {
        int bin, u_min, u_max;
    };
    std::vector<Run> runs;
    std::vector<int> prev_row_runs, cur_row_runs;

    RunForest forest;
    for (int b = 0; b < map.num_bins; ++b) {
        cur_row_runs.clear();
        int u = 0;
        while (u < map.width) {
            if (map.at(b, u) < count_threshold) {
                ++u;
                continue;
            }
            int start = u;
            while (u < map.width && map.at(b, u) >= count_threshold) ++u;
            const int id = static_cast<int>(runs.size());
            runs.push_back({b, start, u - 1});
            forest.parent.push_back(id);
            // merge with runs one bin down that share at least one column; an
            // oblique surface that sweeps many bins stays fragmented per bin,
            // which keeps each fragment's lateral extent honest
            for (int pid : prev_row_runs) {
                if (runs[pid].u_min <= u - 1 && start <= runs[pid].u_max) forest.unite(pid, id);
            }
            cur_row_runs.push_back(id);
        }
        std::swap(prev_row_runs, cur_row_runs);
    }

    std::vector<UdepthRegion> regions;
    std::vector<int> region_of(runs.size(), -1);
    for (int i = 0; i < static_cast<int>(runs.size()); ++i) {
        const int root = forest.find(i);
        if (region_of[root] < 0) {
            region_of[root] = static_cast<int>(regions.size());
            regions.push_back({runs[i].u_min, runs[i].u_max, runs[i].bin, runs[i].bin});
        }
        UdepthRegion& r = regions[region_of[root]];
        r.u_min = std::min(r.u_min, runs[i].u_min);
        r.u_max = std::max(r.u_max, runs[i].u_max);
        r.b_min = std::min(r.b_min, runs[i].bin);
        r.b_max = std::max(r.b_max, runs[i].bin);
    }

    std::erase_if(regions, [&](const UdepthRegion& r) { return r.width() < min_width; });
    std::sort(regions.begin(), regions.end(), [](const UdepthRegion& a, const UdepthRegion& b) {
        return a.b_min != b.b_min ? a.b_min < b.b_min : a.u_min < b.u_min;
    });
    return regions;
}

std::optional<RowRange> continuitySearch(const DepthImage& depth, const CameraIntrinsics& intr,
                                         const UDepthMap& map, const UdepthRegion& region,
                                         int min_pixels_per_row) {
    const double d_lo = map.binLo(region.b_min) - map.bin_size;
    const double d_hi = map.binHi(region.b_max) + map.bin_size;

    int best_start = -1, best_len = 0;
    int run_start = -1, run_len = 0;
    for (int v = 0; v < depth.height; ++v) {
        const std::uint16_t* row = depth.data.data() + static_cast<size_t>(v) * depth.width;
        int hits = 0;
        for (int u = region.u_min; u <= region.u_max; ++u) {
            if (row[u] == 0) continue;
            const double d = row[u] * intr.depth_scale;
            if (d >= d_lo && d <= d_hi && ++hits >= min_pixels_per_row) break;
        }
        if (hits >= min_pixels_per_row) {
            if (run_start < 0) run_start = v;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        } else {
            run_start = -1;
            run_len = 0;
        }
    }
    if (best_len == 0) return std::nullopt;
    return RowRange{best_start, best_start + best_len - 1};
}

std::vector<UdepthDetection> detectUdepth(const DepthImage& depth, const CameraIntrinsics& intr,
                                          const Pose& pose, const UdepthConfig& cfg) {
    const UDepthMap map = computeUDepth(depth, intr, cfg);
    const int thr = cfg.effectiveCountThreshold(depth.height);
    std::vector<UdepthDetection> out;
    for (const UdepthRegion& region : groupLines(map, thr, cfg.min_width)) {
        const auto rows = continuitySearch(depth, intr, map, region, cfg.min_pixels_per_row);
        if (!rows) continue;

        UdepthDetection det;
        det.region = region;
        det.rows = *rows;
        det.depth_lo = map.binLo(region.b_min);
        det.depth_hi = map.binHi(region.b_max);

        // lateral extents scale with the near face, where the silhouette
        // boundary of a mostly-frontal object lives
        const double d = det.depth_lo;
        const double x_lo = (region.u_min - intr.cx) * d / intr.fx;
        const double x_hi = (region.u_max + 1 - intr.cx) * d / intr.fx;
        const double y_lo = (rows->v_min - intr.cy) * d / intr.fy;
        const double y_hi = (rows->v_max + 1 - intr.cy) * d / intr.fy;

        Vec3 lo(1e30, 1e30, 1e30), hi(-1e30, -1e30, -1e30);
        for (const double x : {x_lo, x_hi})
            for (const double y : {y_lo, y_hi})
                for (const double z : {det.depth_lo, det.depth_hi}) {
                    const Vec3 w = pose.toWorld(Vec3(x, y, z));
                    lo = lo.cwiseMin(w);
                    hi = hi.cwiseMax(w);
                }
        det.box = AABB3D::fromMinMax(lo, hi);
        out.push_back(std::move(det));
    }
    return out;
}

}  // namespace dodt
