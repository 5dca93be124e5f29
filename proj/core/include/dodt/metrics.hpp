#pragma once

#include <vector>

#include "dodt/scene.hpp"
#include "dodt/tracker.hpp"

namespace dodt {

struct EvalConfig {
    double match_iou{0.1};       // minimum IOU for a track/truth match
    int skip_frames{0};          // warm-up frames excluded from scoring
    double min_visibility{0.3};  // truth objects less visible than this are ignored
};

struct EvalResult {
    int frames_scored{0};
    int truth_dynamic_samples{0};  // visible dynamic truth, summed over frames
    int matched_samples{0};
    double coverage{0};  // matched / truth_dynamic_samples

    double pos_rmse{0};
    double pos_mae{0};
    double vel_rmse{0};
    double vel_mae{0};

    int dynamic_reports{0};  // dynamic-labeled track snapshots, summed over frames
    int misdetections{0};    // dynamic reports matching static truth or nothing
    double fp_rate{0};       // misdetections / dynamic_reports

    int id_switches{0};
};

// frames[i] holds the confirmed-track snapshots for truth[i]; sizes must match.
// Dynamic-labeled snapshots are greedily matched one-to-one to visible dynamic
// truth by descending IOU. Position error is the 3D center distance, velocity
// error the planar norm. A dynamic report whose best IOU over all visible
// truth lands on a static object, or on nothing, counts as a misdetection.
// ID switches count changes in the matched track id per truth object over its
// matched frames.
EvalResult evaluate(const std::vector<std::vector<TrackSnapshot>>& frames,
                    const std::vector<GroundTruthFrame>& truth, const EvalConfig& cfg = {});

}  // namespace dodt
