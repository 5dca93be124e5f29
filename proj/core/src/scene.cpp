#include "dodt/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dodt/spatial_hash.hpp"

namespace dodt {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kRayEps = 1e-6;

// positive hit parameter along ray o + s*d (s equals camera depth when the
// camera-frame direction has unit z), or +inf
double rayBox(const Vec3& o, const Vec3& d, const AABB3D& box) {
    const Vec3 lo = box.lo(), hi = box.hi();
    double t_entry = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        if (std::abs(d[k]) < 1e-12) {
            if (o[k] < lo[k] || o[k] > hi[k]) return std::numeric_limits<double>::infinity();
            continue;
        }
        double t0 = (lo[k] - o[k]) / d[k];
        double t1 = (hi[k] - o[k]) / d[k];
        if (t0 > t1) std::swap(t0, t1);
        t_entry = std::max(t_entry, t0);
        t_exit = std::min(t_exit, t1);
    }
    if (t_entry > t_exit) return std::numeric_limits<double>::infinity();
    if (t_entry > kRayEps) return t_entry;
    if (t_exit > kRayEps) return t_exit;  // origin inside: first surface ahead
    return std::numeric_limits<double>::infinity();
}

double rayCylinder(const Vec3& o, const Vec3& d, const Vec3& c, double radius, double height) {
    const double z_lo = c.z() - 0.5 * height, z_hi = c.z() + 0.5 * height;
    double best = std::numeric_limits<double>::infinity();

    const double ox = o.x() - c.x(), oy = o.y() - c.y();
    const double a = d.x() * d.x() + d.y() * d.y();
    const double b = 2.0 * (ox * d.x() + oy * d.y());
    const double cc = ox * ox + oy * oy - radius * radius;
    if (a > 1e-12) {
        const double disc = b * b - 4 * a * cc;
        if (disc >= 0) {
            const double sq = std::sqrt(disc);
            for (const double s : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
                if (s <= kRayEps || s >= best) continue;
                const double z = o.z() + s * d.z();
                if (z >= z_lo && z <= z_hi) best = s;
            }
        }
    }
    // end caps
    if (std::abs(d.z()) > 1e-12) {
        for (const double zc : {z_lo, z_hi}) {
            const double s = (zc - o.z()) / d.z();
            if (s <= kRayEps || s >= best) continue;
            const double x = ox + s * d.x(), y = oy + s * d.y();
            if (x * x + y * y <= radius * radius) best = s;
        }
    }
    return best;
}

struct Blob {
    int born{0};
    int life{0};
    double u0{0}, v0{0};
    double du{0}, dv{0};  // pixels per frame
    double w{0}, h{0};    // pixels
    double depth{0};
};

// Blob spawns are derived purely from (seed, spawn frame) so any frame can
// reconstruct the set of currently active blobs.
std::vector<Blob> activeBlobs(const SceneScript& script, int frame, const CameraIntrinsics& intr) {
    std::vector<Blob> out;
    const NoiseModel& nm = script.noise;
    if (nm.blob_rate <= 0) return out;
    const int earliest = std::max(0, frame - nm.blob_life_max + 1);
    for (int f = earliest; f <= frame; ++f) {
        std::mt19937_64 rng(hashCombine(script.seed, hashCombine(0xb10bULL, static_cast<std::uint64_t>(f))));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        int spawns = static_cast<int>(nm.blob_rate);
        if (uni(rng) < nm.blob_rate - spawns) ++spawns;
        for (int k = 0; k < spawns; ++k) {
            Blob b;
            b.born = f;
            b.life = nm.blob_life_min +
                     static_cast<int>(uni(rng) * (nm.blob_life_max - nm.blob_life_min + 1));
            b.w = (nm.blob_width_frac_min +
                   uni(rng) * (nm.blob_width_frac_max - nm.blob_width_frac_min)) *
                  intr.width;
            b.h = (nm.blob_height_frac_min +
                   uni(rng) * (nm.blob_height_frac_max - nm.blob_height_frac_min)) *
                  intr.height;
            b.u0 = b.w + uni(rng) * (intr.width - 2 * b.w);
            b.v0 = b.h + uni(rng) * (intr.height - 2 * b.h);
            const double ang = uni(rng) * kTwoPi;
            const double speed = nm.blob_drift_min + uni(rng) * (nm.blob_drift_max - nm.blob_drift_min);
            b.du = speed * std::cos(ang);
            b.dv = speed * std::sin(ang);
            b.depth = nm.blob_depth_min + uni(rng) * (nm.blob_depth_max - nm.blob_depth_min);
            if (f + b.life > frame) out.push_back(b);
        }
    }
    return out;
}

}  // namespace

Vec3 Trajectory::positionAt(double t) const {
    if (kind == Kind::Orbit) {
        const double a = angular_velocity * t + phase;
        return center + Vec3(radius * std::cos(a), radius * std::sin(a), 0.0);
    }
    if (kind == Kind::Piecewise) {
        Vec3 p = p0;
        Vec3 v = velocity;
        double rem = t;
        for (const auto& ph : phases) {
            const double dt = std::min(rem, ph.duration);
            if (dt <= 0.0) break;
            p += v * dt + 0.5 * dt * dt * ph.acceleration;
            v += ph.acceleration * dt;
            rem -= dt;
        }
        if (rem > 0.0) p += v * rem;  // coast past the last phase
        return p;
    }
    Vec3 p = p0 + velocity * t + 0.5 * t * t * acceleration;
    if (frequency != 0.0 || amplitude != Vec3::Zero())
        p += amplitude * std::sin(kTwoPi * frequency * t + phase);
    return p;
}

Vec3 Trajectory::velocityAt(double t) const {
    if (kind == Kind::Orbit) {
        const double a = angular_velocity * t + phase;
        return Vec3(-radius * angular_velocity * std::sin(a),
                    radius * angular_velocity * std::cos(a), 0.0);
    }
    if (kind == Kind::Piecewise) {
        Vec3 v = velocity;
        double rem = t;
        for (const auto& ph : phases) {
            const double dt = std::min(rem, ph.duration);
            if (dt <= 0.0) break;
            v += ph.acceleration * dt;
            rem -= dt;
        }
        return v;
    }
    Vec3 v = velocity + acceleration * t;
    if (frequency != 0.0)
        v += amplitude * (kTwoPi * frequency * std::cos(kTwoPi * frequency * t + phase));
    return v;
}

bool Trajectory::isStationary() const {
    if (kind == Kind::Orbit) return angular_velocity == 0.0 || radius == 0.0;
    if (kind == Kind::Piecewise) {
        if (velocity != Vec3::Zero()) return false;
        for (const auto& ph : phases)
            if (ph.acceleration != Vec3::Zero()) return false;
        return true;
    }
    return velocity == Vec3::Zero() && acceleration == Vec3::Zero() &&
           (amplitude == Vec3::Zero() || frequency == 0.0);
}

Trajectory Trajectory::fixed(const Vec3& p) {
    Trajectory tr;
    tr.p0 = p;
    return tr;
}

Trajectory Trajectory::line(const Vec3& p0, const Vec3& v) {
    Trajectory tr;
    tr.p0 = p0;
    tr.velocity = v;
    return tr;
}

Trajectory Trajectory::piecewise(const Vec3& p0, const Vec3& v0,
                                 std::vector<TrajectoryPhase> phases) {
    Trajectory tr;
    tr.kind = Kind::Piecewise;
    tr.p0 = p0;
    tr.velocity = v0;
    tr.phases = std::move(phases);
    return tr;
}

AABB3D SceneObject::boundsAt(double t) const {
    AABB3D b;
    b.center = trajectory.positionAt(t);
    b.dims = dims;
    return b;
}

Pose CameraPath::poseAt(double t) const {
    return Pose::facing(position.positionAt(t), yaw + yaw_rate * t, pitch);
}

int SceneScript::frameCount() const {
    return static_cast<int>(std::floor(duration * frame_rate + 0.5)) + 1;
}

void SceneScript::validate() const {
    if (duration <= 0 || frame_rate <= 0) throw std::invalid_argument("bad scene timing");
    for (const auto& obj : objects) {
        if (obj.dims.minCoeff() <= 0) throw std::invalid_argument("object dims must be positive");
        if (!obj.dynamic && !obj.trajectory.isStationary())
            throw std::invalid_argument("static object with a moving trajectory");
        for (const auto& ph : obj.trajectory.phases)
            if (ph.duration <= 0) throw std::invalid_argument("trajectory phase duration must be positive");
        if (obj.shape == ShapeKind::Cylinder && std::abs(obj.dims.x() - obj.dims.y()) > 1e-12)
            throw std::invalid_argument("cylinder dims.x must equal dims.y");
    }
}

std::pair<DepthImage, GroundTruthFrame> renderFrame(const SceneScript& script, double t,
                                                    const CameraIntrinsics& intr) {
    intr.validate();
    script.validate();
    const Pose pose = script.camera.poseAt(t);
    const int frame = static_cast<int>(std::lround(t * script.frame_rate));
    const int n = static_cast<int>(script.objects.size());

    struct Placed {
        AABB3D box;
        Vec3 pos;
        bool cylinder;
    };
    std::vector<Placed> placed(n);
    for (int i = 0; i < n; ++i) {
        placed[i].box = script.objects[i].boundsAt(t);
        placed[i].pos = placed[i].box.center;
        placed[i].cylinder = script.objects[i].shape == ShapeKind::Cylinder;
    }

    DepthImage img(intr.width, intr.height);
    std::vector<float> depth_buf(static_cast<size_t>(intr.width) * intr.height, 0.f);
    std::vector<std::int64_t> hit_count(n, 0), alone_count(n, 0);

    const Vec3 origin = pose.translation;
    const double inv_fx = 1.0 / intr.fx, inv_fy = 1.0 / intr.fy;
    for (int v = 0; v < intr.height; ++v) {
        for (int u = 0; u < intr.width; ++u) {
            const Vec3 dir_cam((u - intr.cx) * inv_fx, (v - intr.cy) * inv_fy, 1.0);
            const Vec3 dir = pose.rotation * dir_cam;
            double best = std::numeric_limits<double>::infinity();
            int best_i = -1;
            for (int i = 0; i < n; ++i) {
                double s;
                if (placed[i].cylinder) {
                    s = rayCylinder(origin, dir, placed[i].pos, 0.5 * script.objects[i].dims.x(),
                                    script.objects[i].dims.z());
                } else {
                    s = rayBox(origin, dir, placed[i].box);
                }
                if (std::isfinite(s)) {
                    ++alone_count[i];
                    if (s < best) {
                        best = s;
                        best_i = i;
                    }
                }
            }
            if (best_i >= 0) {
                depth_buf[static_cast<size_t>(v) * intr.width + u] = static_cast<float>(best);
                ++hit_count[best_i];
            }
        }
    }

    // noise pass: multiplicative Gaussian on every hit pixel
    if (script.noise.depth_sigma_frac > 0) {
        std::mt19937_64 rng(
            hashCombine(script.seed, hashCombine(0xd377ULL, static_cast<std::uint64_t>(frame))));
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& d : depth_buf) {
            if (d <= 0.f) continue;
            d = static_cast<float>(d * (1.0 + script.noise.depth_sigma_frac * gauss(rng)));
        }
    }

    // blob artifacts overwrite whatever is there when they are nearer
    for (const Blob& b : activeBlobs(script, frame, intr)) {
        const int age = frame - b.born;
        std::mt19937_64 rng(hashCombine(script.seed,
                                        hashCombine(0xb10b2ULL, hashCombine(static_cast<std::uint64_t>(b.born),
                                                                            static_cast<std::uint64_t>(frame)))));
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double cu = b.u0 + b.du * age, cv = b.v0 + b.dv * age;
        const double d_frame = b.depth * (1.0 + 0.005 * gauss(rng));
        const int u_lo = std::max(0, static_cast<int>(cu - 0.5 * b.w));
        const int u_hi = std::min(intr.width - 1, static_cast<int>(cu + 0.5 * b.w));
        const int v_lo = std::max(0, static_cast<int>(cv - 0.5 * b.h));
        const int v_hi = std::min(intr.height - 1, static_cast<int>(cv + 0.5 * b.h));
        for (int v = v_lo; v <= v_hi; ++v)
            for (int u = u_lo; u <= u_hi; ++u) {
                float& cur = depth_buf[static_cast<size_t>(v) * intr.width + u];
                const double d = d_frame * (1.0 + 0.004 * gauss(rng));
                if (cur <= 0.f || d < cur) cur = static_cast<float>(d);
            }
    }

    // encode: out-of-range readings are dropped as invalid
    for (size_t i = 0; i < depth_buf.size(); ++i) {
        const double d = depth_buf[i];
        if (d < intr.depth_min || d > intr.depth_max) continue;
        const long raw = std::lround(d / intr.depth_scale);
        if (raw <= 0 || raw > 65535) continue;
        img.data[i] = static_cast<std::uint16_t>(raw);
    }

    GroundTruthFrame truth;
    truth.timestamp = t;
    truth.objects.resize(n);
    for (int i = 0; i < n; ++i) {
        TruthObject& to = truth.objects[i];
        to.box = placed[i].box;
        to.velocity = script.objects[i].trajectory.velocityAt(t);
        to.dynamic = script.objects[i].dynamic;
        to.label = script.objects[i].label;
        to.visibility =
            alone_count[i] > 0 ? static_cast<double>(hit_count[i]) / alone_count[i] : 0.0;
    }
    return {std::move(img), std::move(truth)};
}

std::vector<Box2D> renderDetections2d(const SceneScript& script, double t,
                                      const CameraIntrinsics& intr) {
    const Pose pose = script.camera.poseAt(t);
    std::vector<Box2D> out;
    for (const auto& obj : script.objects) {
        const AABB3D b = obj.boundsAt(t);
        std::vector<Vec3> samples;
        if (obj.shape == ShapeKind::Box) {
            const Vec3 lo = b.lo(), hi = b.hi();
            for (int m = 0; m < 8; ++m)
                samples.emplace_back(m & 1 ? hi.x() : lo.x(), m & 2 ? hi.y() : lo.y(),
                                     m & 4 ? hi.z() : lo.z());
        } else {
            const double r = 0.5 * obj.dims.x();
            for (int k = 0; k < 16; ++k) {
                const double a = kTwoPi * k / 16;
                for (const double z : {b.lo().z(), b.hi().z()})
                    samples.emplace_back(b.center.x() + r * std::cos(a),
                                         b.center.y() + r * std::sin(a), z);
            }
        }
        double u_min = 1e30, u_max = -1e30, v_min = 1e30, v_max = -1e30;
        bool any = false;
        for (const Vec3& s : samples) {
            const Vec3 cam = pose.toCamera(s);
            if (cam.z() < 1e-6) continue;  // behind the image plane
            const double u = intr.fx * cam.x() / cam.z() + intr.cx;
            const double v = intr.fy * cam.y() / cam.z() + intr.cy;
            u_min = std::min(u_min, u);
            u_max = std::max(u_max, u);
            v_min = std::min(v_min, v);
            v_max = std::max(v_max, v);
            any = true;
        }
        if (!any) continue;
        u_min = std::max(u_min, 0.0);
        v_min = std::max(v_min, 0.0);
        u_max = std::min(u_max, intr.width - 1.0);
        v_max = std::min(v_max, intr.height - 1.0);
        if (u_max - u_min < 1.0 || v_max - v_min < 1.0) continue;
        out.push_back(Box2D{u_min, u_max, v_min, v_max, obj.label, 1.0});
    }
    return out;
}

std::vector<Box2D> renderDetections2dDegraded(const SceneScript& script, double t,
                                              const CameraIntrinsics& intr) {
    std::vector<Box2D> boxes = renderDetections2d(script, t, intr);
    const Det2dModel& dm = script.det2d;
    if (dm.jitter_px <= 0 && dm.dropout <= 0) return boxes;
    const int frame = static_cast<int>(std::lround(t * script.frame_rate));
    std::mt19937_64 rng(
        hashCombine(script.seed, hashCombine(0xde72ULL, static_cast<std::uint64_t>(frame))));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Box2D> out;
    for (Box2D& b : boxes) {
        const bool drop = uni(rng) < dm.dropout;
        double j[4] = {0, 0, 0, 0};
        for (double& x : j) x = dm.jitter_px > 0 ? dm.jitter_px * gauss(rng) : 0.0;
        if (drop) continue;  // rng advanced regardless, keeping streams aligned
        b.u_min = std::clamp(b.u_min + j[0], 0.0, intr.width - 2.0);
        b.u_max = std::clamp(b.u_max + j[1], b.u_min + 1.0, intr.width - 1.0);
        b.v_min = std::clamp(b.v_min + j[2], 0.0, intr.height - 2.0);
        b.v_max = std::clamp(b.v_max + j[3], b.v_min + 1.0, intr.height - 1.0);
        out.push_back(b);
    }
    return out;
}

}  // namespace dodt
