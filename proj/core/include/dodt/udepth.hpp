#pragma once

#include <optional>
#include <vector>

#include "dodt/geometry.hpp"

namespace dodt {

struct UdepthConfig {
    double bin_size{0.1};
    // cells with at least this many pixels are part of a line; 0 selects
    // max(4, 2% of image height)
    int count_threshold{0};
    int min_width{4};          // columns
    int min_pixels_per_row{2};  // row qualifies for the vertical extent scan
    double range_max{3.0};      // dense-range cutoff for the histogram
    int resample_stride{2};     // cloud resampling when no cluster is attached

    int effectiveCountThreshold(int image_height) const;
};

// Column-wise depth histogram: counts[bin * width + u] is the number of valid
// pixels in column u whose depth falls in bin. Bins span [range_min, range_max].
struct UDepthMap {
    int width{0};
    int num_bins{0};
    double range_min{0};
    double bin_size{0};
    std::vector<int> counts;

    int at(int bin, int u) const { return counts[static_cast<size_t>(bin) * width + u]; }
    double binLo(int bin) const { return range_min + bin * bin_size; }
    double binHi(int bin) const { return range_min + (bin + 1) * bin_size; }
};

UDepthMap computeUDepth(const DepthImage& depth, const CameraIntrinsics& intr,
                        const UdepthConfig& cfg);

// Connected region of above-threshold cells: horizontal runs merged across
// adjacent bins when their column spans overlap. Extents are inclusive.
struct UdepthRegion {
    int u_min{0}, u_max{0};
    int b_min{0}, b_max{0};
    int width() const { return u_max - u_min + 1; }
};

std::vector<UdepthRegion> groupLines(const UDepthMap& map, int count_threshold, int min_width);

struct RowRange {
    int v_min{0}, v_max{0};
};

// Longest contiguous row extent whose pixels (inside the region's columns)
// stay depth-continuous with the region's depth interval, expanded by one bin.
std::optional<RowRange> continuitySearch(const DepthImage& depth, const CameraIntrinsics& intr,
                                         const UDepthMap& map, const UdepthRegion& region,
                                         int min_pixels_per_row);

struct UdepthDetection {
    AABB3D box;
    UdepthRegion region;
    RowRange rows;
    double depth_lo{0}, depth_hi{0};
};

std::vector<UdepthDetection> detectUdepth(const DepthImage& depth, const CameraIntrinsics& intr,
                                          const Pose& pose, const UdepthConfig& cfg);

}  // namespace dodt
