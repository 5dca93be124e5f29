#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dodt/geometry.hpp"

namespace dodt {

struct Detection2D {
    double u_min{0}, u_max{0}, v_min{0}, v_max{0};
    std::string class_label;
    double confidence{1.0};
};

struct MadConfig {
    double n{1.5};                 // half-width of the inlier band, in MADs
    double min_thickness{0.1};     // meters
    std::vector<std::string> dynamic_classes{"person"};
    int subsample_area{4096};      // boxes above this pixel area sample every 2nd pixel
    int cloud_stride{2};

    bool isDynamicClass(const std::string& label) const;
};

struct MadStats {
    double median{0};
    double mad{0};
};

// Median and median-absolute-deviation; nullopt on an empty sample.
std::optional<MadStats> madStats(std::vector<double> values);

struct DepthRange {
    double d_min{0}, d_max{0};
};

// Min/max of the values inside [median - n*mad, median + n*mad]. A zero MAD
// collapses the band onto the median.
DepthRange madRange(const std::vector<double>& values, const MadStats& stats, double n);

struct MadDetection {
    AABB3D box;
    std::string class_label;
    bool dynamic_hint{false};
    PointCloud points;
};

// Lifts an image-space detection into a world box: inlier depth band from the
// MAD filter, lateral extent from the 2D corners at the median depth. Boxes
// whose region holds no valid depth are dropped.
std::optional<MadDetection> liftTo3d(const Detection2D& det, const DepthImage& depth,
                                     const CameraIntrinsics& intr, const Pose& pose,
                                     const MadConfig& cfg);

std::vector<MadDetection> detectMadlift(const std::vector<Detection2D>& dets,
                                        const DepthImage& depth, const CameraIntrinsics& intr,
                                        const Pose& pose, const MadConfig& cfg);

}  // namespace dodt
