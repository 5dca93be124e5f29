#include "dodt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dodt {

namespace {

struct Pair {
    double iou;
    int track;
    int truth;
};

}  // namespace

EvalResult evaluate(const std::vector<std::vector<TrackSnapshot>>& frames,
                    const std::vector<GroundTruthFrame>& truth, const EvalConfig& cfg) {
    if (frames.size() != truth.size())
        throw std::invalid_argument("evaluate: frame count does not match ground truth");

    EvalResult r;
    double pos_sq = 0, pos_abs = 0, vel_sq = 0, vel_abs = 0;
    // truth object index -> matched track ids, in frame order
    std::map<int, std::vector<int>> matched_ids;

    for (size_t f = 0; f < frames.size(); ++f) {
        if (static_cast<int>(f) < cfg.skip_frames) continue;
        r.frames_scored += 1;
        const auto& snaps = frames[f];
        const auto& gt = truth[f].objects;

        std::vector<int> visible;  // indices into gt
        for (size_t k = 0; k < gt.size(); ++k)
            if (gt[k].visibility >= cfg.min_visibility) visible.push_back(static_cast<int>(k));

        std::vector<int> dyn_tracks;  // indices into snaps
        for (size_t i = 0; i < snaps.size(); ++i)
            if (snaps[i].label == ObstacleClass::Dynamic) dyn_tracks.push_back(static_cast<int>(i));
        r.dynamic_reports += static_cast<int>(dyn_tracks.size());

        // misdetections: best IOU over all visible truth
        for (int ti : dyn_tracks) {
            const AABB3D box{snaps[ti].center, snaps[ti].dims};
            double best = 0;
            int best_k = -1;
            for (int k : visible) {
                const double v = iou3d(box, gt[k].box);
                if (v > best) {
                    best = v;
                    best_k = k;
                }
            }
            if (best < cfg.match_iou || !gt[best_k].dynamic) r.misdetections += 1;
        }

        // error matching: dynamic tracks vs visible dynamic truth, greedy by IOU
        std::vector<int> dyn_truth;
        for (int k : visible)
            if (gt[k].dynamic) dyn_truth.push_back(k);
        r.truth_dynamic_samples += static_cast<int>(dyn_truth.size());

        std::vector<Pair> pairs;
        for (int ti : dyn_tracks) {
            const AABB3D box{snaps[ti].center, snaps[ti].dims};
            for (int k : dyn_truth) {
                const double v = iou3d(box, gt[k].box);
                if (v >= cfg.match_iou) pairs.push_back({v, ti, k});
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.iou != b.iou) return a.iou > b.iou;
            if (a.truth != b.truth) return a.truth < b.truth;
            return a.track < b.track;
        });
        std::vector<char> t_used(snaps.size(), 0), g_used(gt.size(), 0);
        for (const auto& p : pairs) {
            if (t_used[p.track] || g_used[p.truth]) continue;
            t_used[p.track] = 1;
            g_used[p.truth] = 1;
            r.matched_samples += 1;
            const auto& s = snaps[p.track];
            const auto& g = gt[p.truth];
            const double pe = (s.center - g.box.center).norm();
            const Eigen::Vector2d gv(g.velocity.x(), g.velocity.y());
            const double ve = (s.velocity - gv).norm();
            pos_sq += pe * pe;
            pos_abs += pe;
            vel_sq += ve * ve;
            vel_abs += ve;
            matched_ids[p.truth].push_back(s.id);
        }
    }

    if (r.matched_samples > 0) {
        const double n = r.matched_samples;
        r.pos_rmse = std::sqrt(pos_sq / n);
        r.pos_mae = pos_abs / n;
        r.vel_rmse = std::sqrt(vel_sq / n);
        r.vel_mae = vel_abs / n;
    }
    if (r.truth_dynamic_samples > 0)
        r.coverage = static_cast<double>(r.matched_samples) / r.truth_dynamic_samples;
    if (r.dynamic_reports > 0)
        r.fp_rate = static_cast<double>(r.misdetections) / r.dynamic_reports;

    for (const auto& [truth_idx, ids] : matched_ids) {
        for (size_t i = 1; i < ids.size(); ++i)
            if (ids[i] != ids[i - 1]) r.id_switches += 1;
    }
    return r;
}

}  // namespace dodt
