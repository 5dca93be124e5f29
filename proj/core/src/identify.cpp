#include "dodt/identify.hpp"

#include <stdexcept>

#include "dodt/spatial_hash.hpp"

namespace dodt {

VoteStats pointVotes(const PointCloud& now_cloud, const PointCloud& old_cloud,
                     const Eigen::Vector2d& v_center, double span, const FrameView& old_frame,
                     const CameraIntrinsics& intr, const IdentifyConfig& cfg) {
    VoteStats stats;
    if (now_cloud.empty() || old_cloud.empty() || span <= 0) return stats;
    if (cfg.visibility_filter && !old_frame.depth) return stats;
    stats.voted = true;

    SpatialHashGrid grid;
    grid.build(old_cloud, cfg.nn_max_dist);

    for (const auto& p : now_cloud) {
        if (cfg.visibility_filter) {
            const auto pix = projectToPixel(p, intr, old_frame.pose);
            if (!pix) continue;  // outside the earlier view
            const uint16_t raw = old_frame.depth->raw(pix->u, pix->v);
            if (raw == 0) continue;  // nothing recorded there
            if (raw * intr.depth_scale < pix->depth - cfg.occlusion_slack) continue;  // occluded
        }
        const int nn = grid.nearestWithin(p, cfg.nn_max_dist);
        if (nn < 0) continue;

        const Vec3 v_vote = (p - old_cloud[nn]) / span;
        if (v_vote.x() * v_center.x() + v_vote.y() * v_center.y() <= 0) continue;

        stats.valid += 1;
        if (v_vote.norm() > cfg.t_vote) stats.dynamic_votes += 1;
    }
    return stats;
}

ObstacleClass proposeLabel(const TrackedObstacle& t, double timestamp, const FrameView* old_frame,
                           const CameraIntrinsics& intr, const IdentifyConfig& cfg,
                           VoteStats* stats) {
    if (stats) *stats = VoteStats{};
    if (t.dynamic_override) return ObstacleClass::Dynamic;

    const Eigen::Vector2d v = t.velocityXY();
    if (v.norm() < cfg.t_vel) return ObstacleClass::Static;
    if (!cfg.point_voting) return ObstacleClass::Dynamic;

    const size_t back = static_cast<size_t>(cfg.k_back);
    if (!old_frame || !t.cloud || t.cloud_history.size() <= back || !t.cloud_history[back])
        return ObstacleClass::Dynamic;

    const VoteStats vs = pointVotes(*t.cloud, *t.cloud_history[back], v,
                                    timestamp - old_frame->timestamp, *old_frame, intr, cfg);
    if (stats) *stats = vs;
    if (!vs.voted || vs.valid < cfg.min_valid) return ObstacleClass::Dynamic;
    return vs.dynamic_votes > cfg.t_ratio * vs.valid ? ObstacleClass::Dynamic
                                                     : ObstacleClass::Static;
}

Identifier::Identifier(IdentifyConfig cfg, CameraIntrinsics intr) : cfg_(cfg), intr_(intr) {
    if (cfg_.k_back < 1) throw std::invalid_argument("k_back must be >= 1");
    if (cfg_.hysteresis < 1) throw std::invalid_argument("hysteresis must be >= 1");
    if (cfg_.t_ratio <= 0 || cfg_.t_ratio >= 1)
        throw std::invalid_argument("t_ratio must be in (0, 1)");
}

void Identifier::beginFrame(double timestamp, std::shared_ptr<const DepthImage> depth,
                            const Pose& pose) {
    frames_.push_front({timestamp, std::move(depth), pose});
    while (frames_.size() > static_cast<size_t>(cfg_.k_back) + 1) frames_.pop_back();
}

void Identifier::classify(std::vector<TrackedObstacle>& tracks) {
    const FrameView* old_frame = nullptr;
    if (frames_.size() > static_cast<size_t>(cfg_.k_back))
        old_frame = &frames_[static_cast<size_t>(cfg_.k_back)];
    const double now = frames_.empty() ? 0.0 : frames_.front().timestamp;

    for (auto& t : tracks) {
        if (t.dynamic_override) {
            t.label = ObstacleClass::Dynamic;
            t.pending_count = 0;
            continue;
        }
        const ObstacleClass proposal = proposeLabel(t, now, old_frame, intr_, cfg_);
        if (proposal == t.label) {
            t.pending_count = 0;
            continue;
        }
        if (proposal == t.pending_label && t.pending_count > 0) {
            t.pending_count += 1;
        } else {
            t.pending_label = proposal;
            t.pending_count = 1;
        }
        if (t.pending_count >= cfg_.hysteresis) {
            t.label = proposal;
            t.pending_count = 0;
        }
    }
}

}  // namespace dodt
