#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "dodt/geometry.hpp"
#include "dodt/tracker.hpp"

namespace dodt {

struct IdentifyConfig {
    double t_vel{0.3};    // center-speed gate, m/s
    double t_vote{0.3};   // per-point speed threshold for a dynamic vote, m/s
    double t_ratio{0.5};  // dynamic votes / valid points must exceed this
    int k_back{5};        // frames between the correspondence clouds
    int min_valid{10};    // fewer valid points falls back to the gate alone
    int hysteresis{3};    // consecutive agreeing frames to change a label
    double nn_max_dist{1.0};      // NN correspondence search cap, m
    double occlusion_slack{0.1};  // m, when checking past visibility
    // The FOV/occlusion validity test. Disabling it lets newly revealed
    // geometry vote, which is exactly the failure mode it exists to prevent.
    bool visibility_filter{true};
    bool point_voting{true};  // disabled = classify by the velocity gate alone
};

struct FrameView {
    double timestamp{0};
    std::shared_ptr<const DepthImage> depth;
    Pose pose;
};

struct VoteStats {
    int valid{0};
    int dynamic_votes{0};
    bool voted{false};  // false when voting could not run at all
};

// Per current-cloud point: its NN in the cloud k_back frames ago gives a vote
// velocity disp/span. The point is valid iff that velocity agrees in direction
// with the track velocity (angle < pi/2) and, with the visibility filter on,
// the point's position was inside the earlier view and not occluded. Valid
// points vote dynamic when their vote speed exceeds t_vote.
VoteStats pointVotes(const PointCloud& now_cloud, const PointCloud& old_cloud,
                     const Eigen::Vector2d& v_center, double span, const FrameView& old_frame,
                     const CameraIntrinsics& intr, const IdentifyConfig& cfg);

// Frame-level proposal before hysteresis: detector class hint wins outright;
// speed below t_vel is static; otherwise the vote ratio decides, degrading to
// the gate alone when there is no usable history or quorum.
ObstacleClass proposeLabel(const TrackedObstacle& t, double timestamp, const FrameView* old_frame,
                           const CameraIntrinsics& intr, const IdentifyConfig& cfg,
                           VoteStats* stats = nullptr);

class Identifier {
public:
    Identifier(IdentifyConfig cfg, CameraIntrinsics intr);

    // Call once per frame, before classify, with the frame the tracker just saw.
    void beginFrame(double timestamp, std::shared_ptr<const DepthImage> depth, const Pose& pose);

    void classify(std::vector<TrackedObstacle>& tracks);

    const IdentifyConfig& config() const { return cfg_; }

private:
    IdentifyConfig cfg_;
    CameraIntrinsics intr_;
    std::deque<FrameView> frames_;  // newest first
};

}  // namespace dodt
