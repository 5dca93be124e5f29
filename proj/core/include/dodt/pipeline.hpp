#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dodt/dbscan.hpp"
#include "dodt/ensemble.hpp"
#include "dodt/identify.hpp"
#include "dodt/madlift.hpp"
#include "dodt/metrics.hpp"
#include "dodt/scene.hpp"
#include "dodt/sequence_io.hpp"
#include "dodt/tracker.hpp"
#include "dodt/udepth.hpp"

namespace dodt {

struct PipelineFlags {
    bool enable_udepth{true};
    bool enable_dbscan{true};
    bool enable_madlift{true};
    bool enable_ensemble{true};
};

struct PipelineConfig {
    PipelineFlags flags;
    UdepthConfig udepth;
    DbscanConfig dbscan;
    MadConfig mad;
    EnsembleConfig ensemble;
    TrackerConfig tracker;
    IdentifyConfig identify;
    EvalConfig eval;
};

// Per-frame wall-clock per stage, milliseconds. Rendering and file I/O are
// never included.
struct StageTiming {
    double udepth_ms{0};
    double dbscan_ms{0};
    double madlift_ms{0};
    double ensemble_ms{0};
    double track_ms{0};
    double identify_ms{0};
    double total_ms{0};
};

struct TimingSummary {
    int frames{0};
    double mean_total_ms{0};
    double median_total_ms{0};
    double max_total_ms{0};
    double mean_udepth_ms{0};
    double mean_dbscan_ms{0};
    double mean_madlift_ms{0};
    double mean_ensemble_ms{0};
    double mean_track_ms{0};
    double mean_identify_ms{0};
};

TimingSummary summarizeTiming(const std::vector<StageTiming>& frames);

struct FrameInput {
    double timestamp{0};
    std::shared_ptr<const DepthImage> depth;
    Pose pose;
    std::vector<Detection2D> det2d;  // external 2D boxes, may be empty
};

// Box-level record of what the detector stack produced, before tracking.
struct DetectionSummary {
    AABB3D box;
    std::string class_label;
    bool dynamic_hint{false};
    int num_points{0};
};

struct FrameResult {
    std::vector<TrackSnapshot> snapshots;
    std::vector<DetectionSummary> detections;
    StageTiming timing;
};

class Pipeline {
public:
    Pipeline(PipelineConfig cfg, CameraIntrinsics intr);

    FrameResult processFrame(const FrameInput& in);

    const Tracker& tracker() const { return tracker_; }
    const PipelineConfig& config() const { return cfg_; }

private:
    PipelineConfig cfg_;
    CameraIntrinsics intr_;
    Tracker tracker_;
    Identifier identifier_;
};

struct RunResult {
    std::vector<std::vector<TrackSnapshot>> frames;
    std::vector<std::vector<DetectionSummary>> detections;
    std::vector<StageTiming> timing;
    std::optional<EvalResult> eval;  // present when ground truth was available
};

// The tracker's dt is taken from the sequence frame rate, overriding whatever
// the config carries.
RunResult runSequence(const Sequence& seq, PipelineConfig cfg);

// Render and process in memory; ground truth is always available here.
RunResult runScript(const SceneScript& script, const CameraIntrinsics& intr, PipelineConfig cfg);

struct AblationVariant {
    std::string name;
    PipelineConfig cfg;
};

// full | no_ensemble | udepth_only | dbscan_only | baseline_tracker
std::vector<AblationVariant> standardAblation(const PipelineConfig& base);

struct AblationRow {
    std::string name;
    EvalResult eval;
    TimingSummary timing;
};

std::vector<AblationRow> runAblation(const Sequence& seq,
                                     const std::vector<AblationVariant>& variants);

}  // namespace dodt
