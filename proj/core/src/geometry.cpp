#include "dodt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dodt {

bool CameraIntrinsics::valid() const {
    return fx > 0 && fy > 0 && width > 0 && height > 0 && cx >= 0 && cx < width && cy >= 0 &&
           cy < height && depth_scale > 0 && depth_min > 0 && depth_max > depth_min;
}

void CameraIntrinsics::validate() const {
    if (!valid()) throw std::invalid_argument("camera intrinsics out of range");
}

Pose Pose::inverse() const {
    Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
}

bool Pose::isOrthonormal(double tol) const {
    const Eigen::Matrix3d err = rotation * rotation.transpose() - Eigen::Matrix3d::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && rotation.determinant() > 0;
}

Pose Pose::facing(const Vec3& position, double yaw, double pitch) {
    // camera x -> world -y, camera y -> world -z, camera z -> world +x
    Eigen::Matrix3d level;
    level << 0, 0, 1,
            -1, 0, 0,
             0, -1, 0;
    const Eigen::Matrix3d rz = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
    const Eigen::Matrix3d rx = Eigen::AngleAxisd(pitch, Vec3::UnitX()).toRotationMatrix();
    Pose p;
    p.translation = position;
    p.rotation = rz * level * rx;
    return p;
}

AABB3D AABB3D::fromMinMax(const Vec3& lo, const Vec3& hi) {
    AABB3D b;
    b.center = 0.5 * (lo + hi);
    b.dims = hi - lo;
    return b;
}

PointCloud triangulate(const DepthImage& depth, const CameraIntrinsics& intr, const Pose& pose,
                       int stride) {
    intr.validate();
    if (!depth.sizeMatches(intr)) throw std::invalid_argument("depth image size mismatch");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");

    PointCloud out;
    out.reserve(static_cast<size_t>(depth.width / stride + 1) * (depth.height / stride + 1) / 4);
    const double inv_fx = 1.0 / intr.fx;
    const double inv_fy = 1.0 / intr.fy;
    for (int v = 0; v < depth.height; v += stride) {
        const std::uint16_t* row = depth.data.data() + static_cast<size_t>(v) * depth.width;
        for (int u = 0; u < depth.width; u += stride) {
            const std::uint16_t r = row[u];
            if (r == 0) continue;
            const double d = r * intr.depth_scale;
            if (d < intr.depth_min || d > intr.depth_max) continue;
            const Vec3 cam((u - intr.cx) * d * inv_fx, (v - intr.cy) * d * inv_fy, d);
            out.push_back(pose.toWorld(cam));
        }
    }
    return out;
}

double iou3d(const AABB3D& a, const AABB3D& b) {
    const Vec3 alo = a.lo(), ahi = a.hi(), blo = b.lo(), bhi = b.hi();
    double inter = 1.0;
    for (int k = 0; k < 3; ++k) {
        const double w = std::min(ahi[k], bhi[k]) - std::max(alo[k], blo[k]);
        if (w <= 0) return 0.0;
        inter *= w;
    }
    const double uni = a.volume() + b.volume() - inter;
    if (uni <= 0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

std::optional<PixelDepth> projectToPixel(const Vec3& p_world, const CameraIntrinsics& intr,
                                         const Pose& pose) {
    const Vec3 cam = pose.toCamera(p_world);
    if (cam.z() < intr.depth_min || cam.z() > intr.depth_max) return std::nullopt;
    const double u = intr.fx * cam.x() / cam.z() + intr.cx;
    const double v = intr.fy * cam.y() / cam.z() + intr.cy;
    if (u < 0 || u >= intr.width || v < 0 || v >= intr.height) return std::nullopt;
    return PixelDepth{u, v, cam.z()};
}

}  // namespace dodt
