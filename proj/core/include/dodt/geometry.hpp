#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace dodt {

using Vec3 = Eigen::Vector3d;
using PointCloud = std::vector<Vec3>;

// Pinhole model for a depth camera. depth_scale converts raw 16-bit values
// to meters; raw zero is always invalid, and decoded values outside
// [depth_min, depth_max] are treated as invalid too.
struct CameraIntrinsics {
    double fx{390.0};
    double fy{390.0};
    double cx{319.5};
    double cy{239.5};
    int width{640};
    int height{480};
    double depth_scale{0.001};
    double depth_min{0.3};
    double depth_max{5.0};

    bool valid() const;
    void validate() const;  // throws std::invalid_argument on a bad model
};

// Camera-to-world rigid transform. rotation columns are the camera axes
// (x right, y down, z forward) expressed in world coordinates.
struct Pose {
    Vec3 translation{Vec3::Zero()};
    Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};

    Vec3 toWorld(const Vec3& p_cam) const { return rotation * p_cam + translation; }
    Vec3 toCamera(const Vec3& p_world) const { return rotation.transpose() * (p_world - translation); }
    Pose inverse() const;
    bool isOrthonormal(double tol = 1e-9) const;

    // Level camera at `position` looking along world +x rotated by yaw about
    // world z, then pitched about the camera x axis (negative pitches down).
    static Pose facing(const Vec3& position, double yaw = 0.0, double pitch = 0.0);
};

struct DepthImage {
    int width{0};
    int height{0};
    std::vector<std::uint16_t> data;  // row-major, width*height

    DepthImage() = default;
    DepthImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {}

    std::uint16_t raw(int u, int v) const { return data[static_cast<size_t>(v) * width + u]; }
    std::uint16_t& raw(int u, int v) { return data[static_cast<size_t>(v) * width + u]; }
    bool sizeMatches(const CameraIntrinsics& intr) const {
        return width == intr.width && height == intr.height;
    }
};

// Axis-aligned box, center/dims parameterization. dims must stay positive.
struct AABB3D {
    Vec3 center{Vec3::Zero()};
    Vec3 dims{Vec3::Ones()};

    Vec3 lo() const { return center - 0.5 * dims; }
    Vec3 hi() const { return center + 0.5 * dims; }
    double volume() const { return dims.x() * dims.y() * dims.z(); }
    static AABB3D fromMinMax(const Vec3& lo, const Vec3& hi);
};

// Back-projects every valid pixel (subsampled by stride in both axes) into a
// world-frame cloud. Out-of-range and zero pixels are skipped.
PointCloud triangulate(const DepthImage& depth, const CameraIntrinsics& intr,
                       const Pose& pose, int stride = 2);

// Intersection-over-union of two axis-aligned boxes, in [0, 1].
double iou3d(const AABB3D& a, const AABB3D& b);

struct PixelDepth {
    double u{0};
    double v{0};
    double depth{0};
};

// World point -> (pixel, camera depth), or nullopt when the point falls
// outside the frustum or outside [depth_min, depth_max].
std::optional<PixelDepth> projectToPixel(const Vec3& p_world, const CameraIntrinsics& intr,
                                         const Pose& pose);

}  // namespace dodt
