#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dodt/geometry.hpp"

namespace dodt {

// One leg of a piecewise trajectory: constant acceleration held for `duration`
// seconds. Position and velocity chain continuously from the previous phase.
struct TrajectoryPhase {
    double duration{0.0};
    Vec3 acceleration{Vec3::Zero()};
};

// Analytic trajectory: p(t) = p0 + v t + 0.5 a t^2 + amp .* sin(2 pi f t + phase),
// a constant-speed circular orbit in the x-y plane, or a piecewise chain of
// constant-acceleration phases (C1-continuous; coasts at final velocity past the
// last phase). Velocity is the exact derivative, which is what ground truth reports.
struct Trajectory {
    enum class Kind { Analytic, Orbit, Piecewise };
    Kind kind{Kind::Analytic};

    // Analytic; p0/velocity double as the piecewise initial state
    Vec3 p0{Vec3::Zero()};
    Vec3 velocity{Vec3::Zero()};
    Vec3 acceleration{Vec3::Zero()};
    Vec3 amplitude{Vec3::Zero()};
    double frequency{0.0};
    double phase{0.0};

    // Orbit
    Vec3 center{Vec3::Zero()};
    double radius{0.0};
    double angular_velocity{0.0};

    // Piecewise
    std::vector<TrajectoryPhase> phases;

    Vec3 positionAt(double t) const;
    Vec3 velocityAt(double t) const;
    bool isStationary() const;

    static Trajectory fixed(const Vec3& p);
    static Trajectory line(const Vec3& p0, const Vec3& v);
    static Trajectory piecewise(const Vec3& p0, const Vec3& v0,
                                std::vector<TrajectoryPhase> phases);
};

enum class ShapeKind { Box, Cylinder };

struct SceneObject {
    ShapeKind shape{ShapeKind::Box};
    Vec3 dims{Vec3::Ones()};  // cylinder: dims.x = dims.y = diameter, dims.z = height
    Trajectory trajectory;
    bool dynamic{false};
    std::string label{"obstacle"};

    AABB3D boundsAt(double t) const;
};

struct CameraPath {
    Trajectory position;
    double yaw{0.0};
    double yaw_rate{0.0};
    double pitch{0.0};

    Pose poseAt(double t) const;
};

// Multiplicative Gaussian depth noise (sigma = depth_sigma_frac * d) plus
// transient blob artifacts: small coherent false-depth patches that persist
// for a few frames and drift across the image, mimicking sensor flicker at
// depth discontinuities. Blob schedule is a pure function of (seed, frame).
struct NoiseModel {
    double depth_sigma_frac{0.0};
    double blob_rate{0.0};  // expected spawns per frame
    double blob_depth_min{0.8};
    double blob_depth_max{2.8};
    int blob_life_min{8};
    int blob_life_max{24};
    double blob_width_frac_min{0.06};  // of image width
    double blob_width_frac_max{0.18};
    double blob_height_frac_min{0.028};  // of image height
    double blob_height_frac_max{0.05};
    double blob_drift_min{2.0};  // pixels per frame
    double blob_drift_max{6.0};
};

struct Det2dModel {
    bool emit{false};
    double jitter_px{0.0};
    double dropout{0.0};
};

struct SceneScript {
    double duration{10.0};
    double frame_rate{30.0};
    std::uint64_t seed{0};
    CameraPath camera;
    NoiseModel noise;
    Det2dModel det2d;
    std::vector<SceneObject> objects;

    int frameCount() const;
    double timeOfFrame(int frame) const { return frame / frame_rate; }
    void validate() const;
};

struct TruthObject {
    AABB3D box;
    Vec3 velocity{Vec3::Zero()};
    bool dynamic{false};
    std::string label;
    // nearest-hit pixels / pixels whose ray intersects the object ignoring
    // occluders; 0 when no image ray reaches the object at all
    double visibility{0.0};
};

struct GroundTruthFrame {
    double timestamp{0.0};
    std::vector<TruthObject> objects;
};

// Ray-casts the scene at time t into a 16-bit depth image. Deterministic:
// identical (script, t, intr) produce bit-identical images.
std::pair<DepthImage, GroundTruthFrame> renderFrame(const SceneScript& script, double t,
                                                    const CameraIntrinsics& intr);

struct Box2D {
    double u_min{0}, u_max{0}, v_min{0}, v_max{0};
    std::string label;
    double confidence{1.0};
};

// Pixel-space bounds of every object that projects into the image at time t.
// Range limits are ignored (a color detector does not care about depth range)
// and occlusion between objects is not modeled.
std::vector<Box2D> renderDetections2d(const SceneScript& script, double t,
                                      const CameraIntrinsics& intr);

// renderDetections2d plus the script's jitter/dropout degradation model,
// seeded per frame.
std::vector<Box2D> renderDetections2dDegraded(const SceneScript& script, double t,
                                              const CameraIntrinsics& intr);

}  // namespace dodt
