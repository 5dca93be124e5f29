#include "dodt/madlift.hpp"

#include <algorithm>
#include <cmath>

namespace dodt {

namespace {

double medianInPlace(std::vector<double>& v) {
    const size_t n = v.size();
    const size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    const double upper = v[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lower + upper);
}

}  // namespace

bool MadConfig::isDynamicClass(const std::string& label) const {
    return std::find(dynamic_classes.begin(), dynamic_classes.end(), label) !=
           dynamic_classes.end();
}

std::optional<MadStats> madStats(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    MadStats s;
    s.median = medianInPlace(values);
    for (double& v : values) v = std::abs(v - s.median);
    s.mad = medianInPlace(values);
    return s;
}

DepthRange madRange(const std::vector<double>& values, const MadStats& stats, double n) {
    const double lo = stats.median - n * stats.mad;
    const double hi = stats.median + n * stats.mad;
    double d_min = 1e30, d_max = -1e30;
    for (double v : values) {
        if (v < lo || v > hi) continue;
        d_min = std::min(d_min, v);
        d_max = std::max(d_max, v);
    }
    if (d_min > d_max) return {stats.median, stats.median};
    return {d_min, d_max};
}

std::optional<MadDetection> liftTo3d(const Detection2D& det, const DepthImage& depth,
                                     const CameraIntrinsics& intr, const Pose& pose,
                                     const MadConfig& cfg) {
    intr.validate();
    const int u_lo = std::clamp(static_cast<int>(std::floor(det.u_min)), 0, intr.width - 1);
    const int u_hi = std::clamp(static_cast<int>(std::floor(det.u_max)), 0, intr.width - 1);
    const int v_lo = std::clamp(static_cast<int>(std::floor(det.v_min)), 0, intr.height - 1);
    const int v_hi = std::clamp(static_cast<int>(std::floor(det.v_max)), 0, intr.height - 1);
    if (u_hi <= u_lo || v_hi <= v_lo) return std::nullopt;

    const long area = static_cast<long>(u_hi - u_lo + 1) * (v_hi - v_lo + 1);
    const int stride = area > cfg.subsample_area ? 2 : 1;

    std::vector<double> depths;
    depths.reserve(area / (stride * stride) + 1);
    for (int v = v_lo; v <= v_hi; v += stride) {
        const std::uint16_t* row = depth.data.data() + static_cast<size_t>(v) * depth.width;
        for (int u = u_lo; u <= u_hi; u += stride) {
            if (row[u] == 0) continue;
            const double d = row[u] * intr.depth_scale;
            if (d < intr.depth_min || d > intr.depth_max) continue;
            depths.push_back(d);
        }
    }
    const auto stats = madStats(depths);
    if (!stats) return std::nullopt;

    DepthRange range = madRange(depths, *stats, cfg.n);
    if (range.d_max - range.d_min < cfg.min_thickness) {
        const double c = 0.5 * (range.d_min + range.d_max);
        range.d_min = c - 0.5 * cfg.min_thickness;
        range.d_max = c + 0.5 * cfg.min_thickness;
    }

    // lateral extent: 2D corners pushed to the median depth
    const double dm = stats->median;
    const double x_lo = (det.u_min - intr.cx) * dm / intr.fx;
    const double x_hi = (det.u_max - intr.cx) * dm / intr.fx;
    const double y_lo = (det.v_min - intr.cy) * dm / intr.fy;
    const double y_hi = (det.v_max - intr.cy) * dm / intr.fy;

    Vec3 lo(1e30, 1e30, 1e30), hi(-1e30, -1e30, -1e30);
    for (const double x : {x_lo, x_hi})
        for (const double y : {y_lo, y_hi})
            for (const double z : {range.d_min, range.d_max}) {
                const Vec3 w = pose.toWorld(Vec3(x, y, z));
                lo = lo.cwiseMin(w);
                hi = hi.cwiseMax(w);
            }

    MadDetection out;
    out.box = AABB3D::fromMinMax(lo, hi);
    out.class_label = det.class_label;
    out.dynamic_hint = cfg.isDynamicClass(det.class_label);
    for (int v = v_lo; v <= v_hi; v += cfg.cloud_stride) {
        const std::uint16_t* row = depth.data.data() + static_cast<size_t>(v) * depth.width;
        for (int u = u_lo; u <= u_hi; u += cfg.cloud_stride) {
            if (row[u] == 0) continue;
            const double d = row[u] * intr.depth_scale;
            if (d < range.d_min || d > range.d_max) continue;
            out.points.push_back(
                pose.toWorld(Vec3((u - intr.cx) * d / intr.fx, (v - intr.cy) * d / intr.fy, d)));
        }
    }
    return out;
}

std::vector<MadDetection> detectMadlift(const std::vector<Detection2D>& dets,
                                        const DepthImage& depth, const CameraIntrinsics& intr,
                                        const Pose& pose, const MadConfig& cfg) {
    std::vector<MadDetection> out;
    out.reserve(dets.size());
    for (const Detection2D& d : dets) {
        if (auto lifted = liftTo3d(d, depth, intr, pose, cfg)) out.push_back(std::move(*lifted));
    }
    return out;
}

}  // namespace dodt
