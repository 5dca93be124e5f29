#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dodt/config_io.hpp"
#include "dodt/pipeline.hpp"
#include "dodt/presets.hpp"
#include "dodt/sequence_io.hpp"

namespace fs = std::filesystem;
using namespace dodt;

namespace {

// Config file first, then whichever flags were actually passed on top.
class ConfigArgs {
public:
    void attach(CLI::App* app) {
        app->add_option("--config", config_path_, "pipeline config JSON file")
            ->check(CLI::ExistingFile);

        flag(app, "--no-udepth", "disable the depth-histogram detector",
             [](PipelineConfig& c) { c.flags.enable_udepth = false; });
        flag(app, "--no-dbscan", "disable the clustering detector",
             [](PipelineConfig& c) { c.flags.enable_dbscan = false; });
        flag(app, "--no-madlift", "disable 2D-box lifting",
             [](PipelineConfig& c) { c.flags.enable_madlift = false; });
        flag(app, "--no-ensemble", "concatenate detections instead of fusing",
             [](PipelineConfig& c) { c.flags.enable_ensemble = false; });

        opt(app, "--udepth-bin", udepth_bin_, "histogram bin size, m",
            [](PipelineConfig& c, double v) { c.udepth.bin_size = v; });
        opt(app, "--udepth-count", udepth_count_, "line threshold, pixels (0 = auto)",
            [](PipelineConfig& c, int v) { c.udepth.count_threshold = v; });
        opt(app, "--udepth-min-width", udepth_min_width_, "minimum line width, columns",
            [](PipelineConfig& c, int v) { c.udepth.min_width = v; });
        opt(app, "--udepth-range", udepth_range_, "histogram range cutoff, m",
            [](PipelineConfig& c, double v) { c.udepth.range_max = v; });

        opt(app, "--dbscan-voxel", dbscan_voxel_, "voxel filter size, m",
            [](PipelineConfig& c, double v) { c.dbscan.voxel_size = v; });
        opt(app, "--dbscan-eps", dbscan_eps_, "neighborhood radius, m",
            [](PipelineConfig& c, double v) { c.dbscan.eps = v; });
        opt(app, "--dbscan-min-pts", dbscan_min_pts_, "core point neighbor count",
            [](PipelineConfig& c, int v) { c.dbscan.min_pts = v; });
        opt(app, "--dbscan-min-cluster", dbscan_min_cluster_, "minimum cluster size",
            [](PipelineConfig& c, int v) { c.dbscan.min_cluster_size = v; });
        opt(app, "--dbscan-range", dbscan_range_, "clustering range cutoff, m",
            [](PipelineConfig& c, double v) { c.dbscan.max_range = v; });

        opt(app, "--mad-n", mad_n_, "inlier band half-width, MADs",
            [](PipelineConfig& c, double v) { c.mad.n = v; });
        opt(app, "--mad-class", mad_classes_, "2D class treated as dynamic (repeatable)",
            [](PipelineConfig& c, const std::vector<std::string>& v) {
                c.mad.dynamic_classes = v;
            });

        opt(app, "--ensemble-iou", ensemble_iou_, "mutual-match IOU threshold",
            [](PipelineConfig& c, double v) { c.ensemble.iou_threshold = v; });

        opt(app, "--t-sim", t_sim_, "association similarity threshold",
            [](PipelineConfig& c, double v) { c.tracker.t_sim = v; });
        opt(app, "--birth-hits", birth_hits_, "consecutive hits to confirm a track",
            [](PipelineConfig& c, int v) { c.tracker.birth_hits = v; });
        opt(app, "--death-misses", death_misses_, "consecutive misses to drop a track",
            [](PipelineConfig& c, int v) { c.tracker.death_misses = v; });
        opt(app, "--history", history_, "history length, frames",
            [](PipelineConfig& c, int v) { c.tracker.history = v; });
        opt(app, "--k-v", k_v_, "velocity estimation span, frames",
            [](PipelineConfig& c, int v) { c.tracker.k_v = v; });
        opt(app, "--dims-alpha", dims_alpha_, "dims smoothing factor",
            [](PipelineConfig& c, double v) { c.tracker.dims_alpha = v; });
        opt(app, "--association", association_, "feature | center_distance",
            [](PipelineConfig& c, const std::string& v) {
                if (v == "feature")
                    c.tracker.association = TrackerConfig::Association::Feature;
                else if (v == "center_distance")
                    c.tracker.association = TrackerConfig::Association::CenterDistance;
                else
                    throw CLI::ValidationError("--association", "must be feature or center_distance");
            });
        opt(app, "--motion", motion_, "const_accel | const_vel",
            [](PipelineConfig& c, const std::string& v) {
                if (v == "const_accel")
                    c.tracker.motion = TrackerConfig::Motion::ConstAccel;
                else if (v == "const_vel")
                    c.tracker.motion = TrackerConfig::Motion::ConstVel;
                else
                    throw CLI::ValidationError("--motion", "must be const_accel or const_vel");
            });
        opt(app, "--center-gate", center_gate_, "center-distance association gate, m",
            [](PipelineConfig& c, double v) { c.tracker.center_gate = v; });

        opt(app, "--t-vel", t_vel_, "dynamic speed gate, m/s",
            [](PipelineConfig& c, double v) { c.identify.t_vel = v; });
        opt(app, "--t-vote", t_vote_, "per-point vote speed threshold, m/s",
            [](PipelineConfig& c, double v) { c.identify.t_vote = v; });
        opt(app, "--t-ratio", t_ratio_, "dynamic vote ratio threshold",
            [](PipelineConfig& c, double v) { c.identify.t_ratio = v; });
        opt(app, "--k-back", k_back_, "voting look-back, frames",
            [](PipelineConfig& c, int v) { c.identify.k_back = v; });
        opt(app, "--min-valid", min_valid_, "minimum valid points for voting",
            [](PipelineConfig& c, int v) { c.identify.min_valid = v; });
        opt(app, "--hysteresis", hysteresis_, "frames to flip a label",
            [](PipelineConfig& c, int v) { c.identify.hysteresis = v; });
        flag(app, "--no-visibility-filter", "let out-of-view history points vote",
             [](PipelineConfig& c) { c.identify.visibility_filter = false; });
        flag(app, "--no-point-voting", "classify by the speed gate alone",
             [](PipelineConfig& c) { c.identify.point_voting = false; });

        opt(app, "--match-iou", match_iou_, "evaluation match IOU",
            [](PipelineConfig& c, double v) { c.eval.match_iou = v; });
        opt(app, "--skip-frames", skip_frames_, "warm-up frames excluded from scoring",
            [](PipelineConfig& c, int v) { c.eval.skip_frames = v; });
        opt(app, "--min-visibility", min_visibility_, "visibility floor for scored truth",
            [](PipelineConfig& c, double v) { c.eval.min_visibility = v; });
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config_path_.empty()) cfg = pipelineConfigFromJson(readTextFile(config_path_), cfg);
        for (const auto& apply : appliers_) apply(cfg);
        return cfg;
    }

private:
    template <typename T, typename F>
    void opt(CLI::App* app, const std::string& name, T& holder, const std::string& desc, F apply) {
        CLI::Option* o = app->add_option(name, holder, desc);
        appliers_.push_back([o, &holder, apply](PipelineConfig& c) {
            if (o->count() > 0) apply(c, holder);
        });
    }

    template <typename F>
    void flag(CLI::App* app, const std::string& name, const std::string& desc, F apply) {
        CLI::Option* o = app->add_flag(name, desc);
        appliers_.push_back([o, apply](PipelineConfig& c) {
            if (o->count() > 0) apply(c);
        });
    }

    std::string config_path_;
    double udepth_bin_{}, udepth_range_{}, dbscan_voxel_{}, dbscan_eps_{}, dbscan_range_{};
    double mad_n_{}, ensemble_iou_{}, t_sim_{}, dims_alpha_{}, center_gate_{};
    double t_vel_{}, t_vote_{}, t_ratio_{}, match_iou_{}, min_visibility_{};
    int udepth_count_{}, udepth_min_width_{}, dbscan_min_pts_{}, dbscan_min_cluster_{};
    int birth_hits_{}, death_misses_{}, history_{}, k_v_{}, k_back_{}, min_valid_{};
    int hysteresis_{}, skip_frames_{};
    std::vector<std::string> mad_classes_;
    std::string association_, motion_;
    std::vector<std::function<void(PipelineConfig&)>> appliers_;
};

void printEvalSummary(const EvalResult& e) {
    std::printf("frames scored        %d\n", e.frames_scored);
    std::printf("coverage             %.3f (%d/%d)\n", e.coverage, e.matched_samples,
                e.truth_dynamic_samples);
    std::printf("pos rmse / mae       %.4f / %.4f m\n", e.pos_rmse, e.pos_mae);
    std::printf("vel rmse / mae       %.4f / %.4f m/s\n", e.vel_rmse, e.vel_mae);
    std::printf("fp rate              %.4f (%d/%d)\n", e.fp_rate, e.misdetections,
                e.dynamic_reports);
    std::printf("id switches          %d\n", e.id_switches);
}

void printTimingSummary(const TimingSummary& t) {
    std::printf("frames               %d\n", t.frames);
    std::printf("total ms             mean %.3f  median %.3f  max %.3f\n", t.mean_total_ms,
                t.median_total_ms, t.max_total_ms);
    std::printf("stage means ms       udepth %.3f  dbscan %.3f  madlift %.3f  ensemble %.3f  "
                "track %.3f  identify %.3f\n",
                t.mean_udepth_ms, t.mean_dbscan_ms, t.mean_madlift_ms, t.mean_ensemble_ms,
                t.mean_track_ms, t.mean_identify_ms);
}

int cmdGen(const std::string& preset_name, const std::string& scene_path, const std::string& out,
           std::optional<std::uint64_t> seed, bool list) {
    if (list) {
        for (const auto& n : presetNames()) std::printf("%s\n", n.c_str());
        return 0;
    }
    ScenePreset preset;
    if (!preset_name.empty()) {
        auto p = presetByName(preset_name, seed.value_or(0));
        if (!p) {
            std::fprintf(stderr, "error: unknown preset '%s' (try --list)\n", preset_name.c_str());
            return 1;
        }
        preset = *p;
    } else if (!scene_path.empty()) {
        preset = sceneFromJson(readTextFile(scene_path));
    } else {
        std::fprintf(stderr, "error: gen needs --preset or --scene\n");
        return 1;
    }
    if (out.empty()) {
        std::fprintf(stderr, "error: gen needs --out\n");
        return 1;
    }
    if (seed) preset.script.seed = *seed;
    const Sequence seq = generateSequence(preset.script, preset.intr, out);
    std::printf("%s: %d frames (%.2f s at %g Hz) -> %s\n", preset.name.c_str(), seq.frameCount(),
                preset.script.duration, preset.script.frame_rate, out.c_str());
    return 0;
}

int cmdRun(const std::string& seq_dir, const std::string& out_dir, const ConfigArgs& cargs,
           bool dump_config) {
    const PipelineConfig cfg = cargs.resolve();
    if (dump_config) {
        std::fputs(pipelineConfigToJson(cfg).c_str(), stdout);
        return 0;
    }
    const Sequence seq = openSequence(seq_dir);
    const RunResult res = runSequence(seq, cfg);
    const TimingSummary timing = summarizeTiming(res.timing);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        writeTrackOutputs(fs::path(out_dir) / "tracks.txt", res.frames);
        writeTextFile((fs::path(out_dir) / "report.json").string(),
                      runReportToJson(res.eval, timing));
    }
    printTimingSummary(timing);
    if (res.eval) printEvalSummary(*res.eval);
    if (!out_dir.empty()) std::printf("wrote %s/tracks.txt and report.json\n", out_dir.c_str());
    return 0;
}

int cmdEval(const std::string& seq_dir, const std::string& tracks_path, const std::string& out,
            const ConfigArgs& cargs) {
    const PipelineConfig cfg = cargs.resolve();
    const Sequence seq = openSequence(seq_dir);
    if (!seq.has_truth) {
        std::fprintf(stderr, "error: sequence %s has no truth file\n", seq_dir.c_str());
        return 1;
    }
    const auto flat = readTrackOutputs(tracks_path);
    const auto frames = alignSnapshots(flat, seq.timestamps);
    const EvalResult e = evaluate(frames, seq.truth, cfg.eval);
    printEvalSummary(e);
    const std::string report = evalResultToJson(e);
    if (!out.empty())
        writeTextFile(out, report);
    else
        std::fputs(report.c_str(), stdout);
    return 0;
}

int cmdAblate(const std::string& seq_dir, const std::string& out, const ConfigArgs& cargs) {
    const PipelineConfig cfg = cargs.resolve();
    const Sequence seq = openSequence(seq_dir);
    if (!seq.has_truth) {
        std::fprintf(stderr, "error: sequence %s has no truth file\n", seq_dir.c_str());
        return 1;
    }
    const auto rows = runAblation(seq, standardAblation(cfg));
    std::printf("%-18s %9s %9s %9s %8s %9s %10s\n", "variant", "pos_rmse", "vel_rmse", "fp_rate",
                "id_sw", "coverage", "median_ms");
    for (const auto& r : rows) {
        std::printf("%-18s %9.4f %9.4f %9.4f %8d %9.3f %10.3f\n", r.name.c_str(), r.eval.pos_rmse,
                    r.eval.vel_rmse, r.eval.fp_rate, r.eval.id_switches, r.eval.coverage,
                    r.timing.median_total_ms);
    }
    if (!out.empty()) writeTextFile(out, ablationToJson(rows));
    return 0;
}

int cmdBench(const std::string& seq_dir, const std::string& preset_name, const std::string& out,
             const ConfigArgs& cargs) {
    const PipelineConfig cfg = cargs.resolve();
    std::vector<StageTiming> timing;
    if (!seq_dir.empty()) {
        const Sequence seq = openSequence(seq_dir);
        timing = runSequence(seq, cfg).timing;
    } else {
        auto p = presetByName(preset_name.empty() ? "benchmark5" : preset_name, 0);
        if (!p) {
            std::fprintf(stderr, "error: unknown preset '%s'\n", preset_name.c_str());
            return 1;
        }
        timing = runScript(p->script, p->intr, cfg).timing;
    }
    const TimingSummary t = summarizeTiming(timing);
    printTimingSummary(t);
    if (!out.empty()) writeTextFile(out, timingSummaryToJson(t));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D dynamic obstacle detection and tracking on RGB-D sequences"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "render a synthetic scene to a sequence directory");
    std::string gen_preset, gen_scene, gen_out;
    std::optional<std::uint64_t> gen_seed;
    bool gen_list = false;
    gen->add_option("--preset", gen_preset, "bundled scene name (see --list)");
    gen->add_option("--scene", gen_scene, "scene script JSON")->check(CLI::ExistingFile);
    gen->add_option("--out,-o", gen_out, "output sequence directory");
    gen->add_option("--seed", gen_seed, "override the scene seed");
    gen->add_flag("--list", gen_list, "list bundled scene names");

    // run
    auto* run = app.add_subcommand("run", "process a sequence directory");
    std::string run_seq, run_out;
    bool run_dump = false;
    run->add_option("--seq,-s", run_seq, "sequence directory")->check(CLI::ExistingDirectory);
    run->add_option("--out,-o", run_out, "directory for tracks.txt and report.json");
    run->add_flag("--dump-config", run_dump, "print the resolved config and exit");
    ConfigArgs run_cfg;
    run_cfg.attach(run);

    // eval
    auto* eval = app.add_subcommand("eval", "score a tracks file against sequence truth");
    std::string eval_seq, eval_tracks, eval_out;
    eval->add_option("--seq,-s", eval_seq, "sequence directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval->add_option("--tracks,-t", eval_tracks, "tracks.txt from run")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--out,-o", eval_out, "write the JSON report here instead of stdout");
    ConfigArgs eval_cfg;
    eval_cfg.attach(eval);

    // ablate
    auto* ablate = app.add_subcommand("ablate", "compare detector and tracker variants");
    std::string ablate_seq, ablate_out;
    ablate->add_option("--seq,-s", ablate_seq, "sequence directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    ablate->add_option("--out,-o", ablate_out, "write the JSON table here");
    ConfigArgs ablate_cfg;
    ablate_cfg.attach(ablate);

    // bench
    auto* bench = app.add_subcommand("bench", "per-stage compute timing");
    std::string bench_seq, bench_preset, bench_out;
    bench->add_option("--seq,-s", bench_seq, "sequence directory")->check(CLI::ExistingDirectory);
    bench->add_option("--preset", bench_preset, "bundled scene to render and time");
    bench->add_option("--out,-o", bench_out, "write the JSON report here");
    ConfigArgs bench_cfg;
    bench_cfg.attach(bench);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmdGen(gen_preset, gen_scene, gen_out, gen_seed, gen_list);
        if (run->parsed()) {
            if (run_seq.empty() && !run_dump) {
                std::fprintf(stderr, "error: run needs --seq\n");
                return 1;
            }
            return cmdRun(run_seq, run_out, run_cfg, run_dump);
        }
        if (eval->parsed()) return cmdEval(eval_seq, eval_tracks, eval_out, eval_cfg);
        if (ablate->parsed()) return cmdAblate(ablate_seq, ablate_out, ablate_cfg);
        if (bench->parsed()) return cmdBench(bench_seq, bench_preset, bench_out, bench_cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
