#include "dodt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace dodt {

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// U-depth boxes carry no cluster, so resample one from the region pixels that
// sit inside the detection's depth band (one bin of slack on each side).
PointCloud udepthCloud(const UdepthDetection& det, const DepthImage& depth,
                       const CameraIntrinsics& intr, const Pose& pose, const UdepthConfig& cfg) {
    PointCloud out;
    const double lo = std::max(det.depth_lo - cfg.bin_size, intr.depth_min);
    const double hi = det.depth_hi + cfg.bin_size;
    const int stride = std::max(1, cfg.resample_stride);
    for (int v = det.rows.v_min; v <= det.rows.v_max; v += stride) {
        for (int u = det.region.u_min; u <= det.region.u_max; u += stride) {
            const uint16_t raw = depth.raw(u, v);
            if (raw == 0) continue;
            const double d = raw * intr.depth_scale;
            if (d < lo || d > hi) continue;
            const Vec3 cam((u - intr.cx) * d / intr.fx, (v - intr.cy) * d / intr.fy, d);
            out.push_back(pose.toWorld(cam));
        }
    }
    return out;
}

std::vector<Detection2D> toDetections2d(const std::vector<Box2D>& boxes) {
    std::vector<Detection2D> out;
    out.reserve(boxes.size());
    for (const auto& b : boxes)
        out.push_back({b.u_min, b.u_max, b.v_min, b.v_max, b.label, b.confidence});
    return out;
}

}  // namespace

TimingSummary summarizeTiming(const std::vector<StageTiming>& frames) {
    TimingSummary s;
    s.frames = static_cast<int>(frames.size());
    if (frames.empty()) return s;
    std::vector<double> totals;
    totals.reserve(frames.size());
    for (const auto& f : frames) {
        totals.push_back(f.total_ms);
        s.mean_total_ms += f.total_ms;
        s.mean_udepth_ms += f.udepth_ms;
        s.mean_dbscan_ms += f.dbscan_ms;
        s.mean_madlift_ms += f.madlift_ms;
        s.mean_ensemble_ms += f.ensemble_ms;
        s.mean_track_ms += f.track_ms;
        s.mean_identify_ms += f.identify_ms;
    }
    const double n = static_cast<double>(frames.size());
    s.mean_total_ms /= n;
    s.mean_udepth_ms /= n;
    s.mean_dbscan_ms /= n;
    s.mean_madlift_ms /= n;
    s.mean_ensemble_ms /= n;
    s.mean_track_ms /= n;
    s.mean_identify_ms /= n;
    std::sort(totals.begin(), totals.end());
    const size_t m = totals.size() / 2;
    s.median_total_ms =
        totals.size() % 2 ? totals[m] : 0.5 * (totals[m - 1] + totals[m]);
    s.max_total_ms = totals.back();
    return s;
}

Pipeline::Pipeline(PipelineConfig cfg, CameraIntrinsics intr)
    : cfg_(cfg), intr_(intr), tracker_(cfg.tracker), identifier_(cfg.identify, intr) {
    intr_.validate();
    if (!cfg_.flags.enable_udepth && !cfg_.flags.enable_dbscan && !cfg_.flags.enable_madlift)
        throw std::invalid_argument("pipeline: every detector is disabled");
}

FrameResult Pipeline::processFrame(const FrameInput& in) {
    FrameResult res;
    const auto t_start = Clock::now();
    const DepthImage& depth = *in.depth;

    std::vector<Detection3D> udets, ddets;
    if (cfg_.flags.enable_udepth) {
        const auto t0 = Clock::now();
        for (const auto& ud : detectUdepth(depth, intr_, in.pose, cfg_.udepth)) {
            Detection3D d;
            d.box = ud.box;
            d.points = udepthCloud(ud, depth, intr_, in.pose, cfg_.udepth);
            udets.push_back(std::move(d));
        }
        res.timing.udepth_ms = msSince(t0);
    }
    if (cfg_.flags.enable_dbscan) {
        const auto t0 = Clock::now();
        for (auto& dd : detectDbscan(depth, intr_, in.pose, cfg_.dbscan)) {
            Detection3D d;
            d.box = dd.box;
            d.points = std::move(dd.points);
            ddets.push_back(std::move(d));
        }
        res.timing.dbscan_ms = msSince(t0);
    }

    std::vector<Detection3D> dets;
    {
        const auto t0 = Clock::now();
        if (cfg_.flags.enable_udepth && cfg_.flags.enable_dbscan) {
            if (cfg_.flags.enable_ensemble) {
                dets = ensemblePair(udets, ddets, cfg_.ensemble);
            } else {
                dets = std::move(udets);
                for (auto& d : ddets) dets.push_back(std::move(d));
            }
        } else if (cfg_.flags.enable_udepth) {
            dets = std::move(udets);
        } else {
            dets = std::move(ddets);
        }
        res.timing.ensemble_ms = msSince(t0);
    }

    if (cfg_.flags.enable_madlift && !in.det2d.empty()) {
        const auto t0 = Clock::now();
        std::vector<Detection3D> aux;
        for (auto& md : detectMadlift(in.det2d, depth, intr_, in.pose, cfg_.mad)) {
            Detection3D d;
            d.box = md.box;
            d.points = std::move(md.points);
            d.class_label = std::move(md.class_label);
            d.dynamic_hint = md.dynamic_hint;
            aux.push_back(std::move(d));
        }
        res.timing.madlift_ms = msSince(t0);
        const auto t1 = Clock::now();
        if (cfg_.flags.enable_ensemble) {
            dets = ensembleCascade(std::move(dets), aux, cfg_.ensemble);
        } else {
            for (auto& d : aux) dets.push_back(std::move(d));
        }
        res.timing.ensemble_ms += msSince(t1);
    }

    res.detections.reserve(dets.size());
    for (const auto& d : dets)
        res.detections.push_back(
            {d.box, d.class_label, d.dynamic_hint, static_cast<int>(d.points.size())});

    {
        const auto t0 = Clock::now();
        tracker_.step(in.timestamp, std::move(dets));
        res.timing.track_ms = msSince(t0);
    }
    {
        const auto t0 = Clock::now();
        identifier_.beginFrame(in.timestamp, in.depth, in.pose);
        identifier_.classify(tracker_.tracks());
        res.timing.identify_ms = msSince(t0);
    }
    res.snapshots = tracker_.confirmedSnapshots(in.timestamp);
    res.timing.total_ms = msSince(t_start);
    return res;
}

RunResult runSequence(const Sequence& seq, PipelineConfig cfg) {
    cfg.tracker.dt = 1.0 / seq.meta.frame_rate;
    Pipeline pipe(cfg, seq.meta.intr);
    RunResult out;
    out.frames.reserve(static_cast<size_t>(seq.frameCount()));
    for (int i = 0; i < seq.frameCount(); ++i) {
        FrameInput in;
        in.timestamp = seq.timestamps[i];
        try {
            in.depth = std::make_shared<DepthImage>(seq.loadDepth(i));
            if (seq.has_det2d) in.det2d = seq.loadDet2d(i);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: skipping frame %d: %s\n", i, e.what());
            out.frames.emplace_back();
            out.detections.emplace_back();
            out.timing.emplace_back();
            continue;
        }
        in.pose = seq.poses[i];
        FrameResult fr = pipe.processFrame(in);
        out.frames.push_back(std::move(fr.snapshots));
        out.detections.push_back(std::move(fr.detections));
        out.timing.push_back(fr.timing);
    }
    if (seq.has_truth) out.eval = evaluate(out.frames, seq.truth, cfg.eval);
    return out;
}

RunResult runScript(const SceneScript& script, const CameraIntrinsics& intr, PipelineConfig cfg) {
    script.validate();
    cfg.tracker.dt = 1.0 / script.frame_rate;
    Pipeline pipe(cfg, intr);
    RunResult out;
    std::vector<GroundTruthFrame> truth;
    const int n = script.frameCount();
    out.frames.reserve(static_cast<size_t>(n));
    truth.reserve(static_cast<size_t>(n));
    const bool degraded = script.det2d.jitter_px > 0 || script.det2d.dropout > 0;
    for (int i = 0; i < n; ++i) {
        const double t = script.timeOfFrame(i);
        auto [depth, gt] = renderFrame(script, t, intr);
        truth.push_back(std::move(gt));
        FrameInput in;
        in.timestamp = t;
        in.depth = std::make_shared<DepthImage>(std::move(depth));
        in.pose = script.camera.poseAt(t);
        if (script.det2d.emit)
            in.det2d = toDetections2d(degraded ? renderDetections2dDegraded(script, t, intr)
                                               : renderDetections2d(script, t, intr));
        FrameResult fr = pipe.processFrame(in);
        out.frames.push_back(std::move(fr.snapshots));
        out.detections.push_back(std::move(fr.detections));
        out.timing.push_back(fr.timing);
    }
    out.eval = evaluate(out.frames, truth, cfg.eval);
    return out;
}

std::vector<AblationVariant> standardAblation(const PipelineConfig& base) {
    std::vector<AblationVariant> v;
    v.push_back({"full", base});

    PipelineConfig no_ens = base;
    no_ens.flags.enable_ensemble = false;
    v.push_back({"no_ensemble", no_ens});

    PipelineConfig ud = base;
    ud.flags.enable_dbscan = false;
    ud.flags.enable_madlift = false;
    ud.flags.enable_ensemble = false;
    v.push_back({"udepth_only", ud});

    PipelineConfig db = base;
    db.flags.enable_udepth = false;
    db.flags.enable_madlift = false;
    db.flags.enable_ensemble = false;
    v.push_back({"dbscan_only", db});

    PipelineConfig bl = base;
    bl.tracker.association = TrackerConfig::Association::CenterDistance;
    bl.tracker.motion = TrackerConfig::Motion::ConstVel;
    v.push_back({"baseline_tracker", bl});
    return v;
}

std::vector<AblationRow> runAblation(const Sequence& seq,
                                     const std::vector<AblationVariant>& variants) {
    std::vector<AblationRow> rows;
    rows.reserve(variants.size());
    for (const auto& var : variants) {
        RunResult r = runSequence(seq, var.cfg);
        AblationRow row;
        row.name = var.name;
        if (r.eval) row.eval = *r.eval;
        row.timing = summarizeTiming(r.timing);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace dodt
