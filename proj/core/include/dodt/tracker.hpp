#pragma once

#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dodt/ensemble.hpp"
#include "dodt/geometry.hpp"

namespace dodt {

enum class ObstacleClass { Unknown, Static, Dynamic };
const char* toString(ObstacleClass c);
ObstacleClass obstacleClassFromString(const std::string& s);

// Association feature: box center and dims, point count, per-axis point
// standard deviation (population convention).
struct FeatureVector {
    Vec3 pos{Vec3::Zero()};
    Vec3 dim{Vec3::Zero()};
    double len{0};
    Vec3 std_dev{Vec3::Zero()};
};

struct FeatureScales {
    double pos{1.0};
    double dim{1.0};
    double len{100.0};
    double std_dev{1.0};
};

FeatureVector extractFeature(const AABB3D& box, const PointCloud& points);

// exp(-|delta|^2) over the scale-normalized 10-component difference; in (0, 1].
double similarity(const FeatureVector& a, const FeatureVector& b, const FeatureScales& scales);

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct KalmanState {
    Vec6 x{Vec6::Zero()};
    Mat6 P{Mat6::Identity()};
};

// State [x, y, vx, vy, ax, ay], constant-acceleration transition.
Mat6 accelTransition(double dt);

void kfPredict(KalmanState& s, const Mat6& A, const Mat6& Q);

// Full-state observation (H = I). A singular innovation covariance is
// regularized with 1e-9 * I.
void kfUpdate(KalmanState& s, const Vec6& z, const Mat6& R);

struct MeasuredKinematics {
    Eigen::Vector2d velocity{Eigen::Vector2d::Zero()};
    Eigen::Vector2d acceleration{Eigen::Vector2d::Zero()};
};

// Finite differences over a k_v-frame span of planar positions, newest first.
// Velocity needs k_v+1 samples, acceleration 2*k_v+1; short histories measure
// as zero.
MeasuredKinematics measureKinematics(std::span<const Eigen::Vector2d> positions_newest_first,
                                     double dt, int k_v);

struct TrackerConfig {
    double dt{1.0 / 30};
    double t_sim{0.3};
    FeatureScales scales;
    int k_v{3};
    Vec6 q_diag{(Vec6() << 0.01, 0.01, 0.05, 0.05, 0.1, 0.1).finished()};
    Vec6 r_diag{(Vec6() << 0.05, 0.05, 0.2, 0.2, 0.5, 0.5).finished()};
    double initial_cov{1.0};
    int birth_hits{3};
    int death_misses{5};
    int history{90};
    double dims_alpha{0.5};  // exponential smoothing for z center and dims

    enum class Association { Feature, CenterDistance };
    enum class Motion { ConstAccel, ConstVel };
    Association association{Association::Feature};
    Motion motion{Motion::ConstAccel};

    // CenterDistance only: matches farther than this are rejected
    double center_gate{1.5};
};

struct TrackHistoryEntry {
    double timestamp{0};
    Vec3 position{Vec3::Zero()};  // detected center, or the prediction while coasting
    AABB3D box;
    bool coasted{false};
};

struct TrackedObstacle {
    int id{-1};
    KalmanState state;
    double z_center{0};
    Vec3 dims{Vec3::Ones()};
    FeatureVector feature;
    std::shared_ptr<const PointCloud> cloud;
    std::deque<TrackHistoryEntry> history;                        // newest first
    std::deque<std::shared_ptr<const PointCloud>> cloud_history;  // newest first
    int hits{0};
    int misses{0};
    bool confirmed{false};
    ObstacleClass label{ObstacleClass::Unknown};
    ObstacleClass pending_label{ObstacleClass::Unknown};
    int pending_count{0};
    bool dynamic_override{false};
    Vec3 last_detected_center{Vec3::Zero()};  // not advanced while coasting

    Vec3 center() const { return {state.x(0), state.x(1), z_center}; }
    Eigen::Vector2d velocityXY() const { return {state.x(2), state.x(3)}; }
    AABB3D box() const { return {center(), dims}; }
};

struct AssociationResult {
    std::vector<std::pair<int, int>> matches;  // (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

// Greedy one-to-one assignment. Feature mode ranks by descending similarity
// against tracks whose feature position is the predicted state; the
// center-distance baseline ranks by distance to the last detected center and
// never propagates.
AssociationResult associate(std::span<const TrackedObstacle> tracks,
                            std::span<const Detection3D> detections, const TrackerConfig& cfg);

// Per-frame track snapshot as written to outputs and consumed by evaluation.
struct TrackSnapshot {
    double timestamp{0};
    int id{-1};
    ObstacleClass label{ObstacleClass::Unknown};
    Vec3 center{Vec3::Zero()};
    Vec3 dims{Vec3::Ones()};
    Eigen::Vector2d velocity{Eigen::Vector2d::Zero()};
};

class Tracker {
public:
    explicit Tracker(TrackerConfig cfg);

    // Detections are consumed (clouds move into the matched tracks).
    void step(double timestamp, std::vector<Detection3D> detections);

    const std::vector<TrackedObstacle>& tracks() const { return tracks_; }
    std::vector<TrackedObstacle>& tracks() { return tracks_; }
    const TrackerConfig& config() const { return cfg_; }

    std::vector<TrackSnapshot> confirmedSnapshots(double timestamp) const;

private:
    TrackedObstacle makeTrack(double timestamp, Detection3D&& det);
    void applyDetection(TrackedObstacle& t, double timestamp, Detection3D&& det);

    TrackerConfig cfg_;
    Mat6 A_, Q_, R_;
    Mat6 P0_;
    std::vector<TrackedObstacle> tracks_;
    int next_id_{0};
};

}  // namespace dodt
