#include "dodt/config_io.hpp"

#include <array>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace dodt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("config: " + msg); }

void checkKeys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known) fail("unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
void get(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void getVec3(const json& j, const char* key, Vec3& out) {
    if (auto it = j.find(key); it != j.end()) {
        const auto a = it->get<std::array<double, 3>>();
        out = Vec3(a[0], a[1], a[2]);
    }
}

void getVec6(const json& j, const char* key, Vec6& out) {
    if (auto it = j.find(key); it != j.end()) {
        const auto a = it->get<std::array<double, 6>>();
        for (int i = 0; i < 6; ++i) out(i) = a[i];
    }
}

json arr(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json arr(const Vec6& v) {
    json a = json::array();
    for (int i = 0; i < 6; ++i) a.push_back(v(i));
    return a;
}

// ---- pipeline config ----

json flagsToJson(const PipelineFlags& f) {
    return {{"udepth", f.enable_udepth},
            {"dbscan", f.enable_dbscan},
            {"madlift", f.enable_madlift},
            {"ensemble", f.enable_ensemble}};
}

void flagsFromJson(const json& j, PipelineFlags& f) {
    checkKeys(j, "flags", {"udepth", "dbscan", "madlift", "ensemble"});
    get(j, "udepth", f.enable_udepth);
    get(j, "dbscan", f.enable_dbscan);
    get(j, "madlift", f.enable_madlift);
    get(j, "ensemble", f.enable_ensemble);
}

json udepthToJson(const UdepthConfig& c) {
    return {{"bin_size", c.bin_size},
            {"count_threshold", c.count_threshold},
            {"min_width", c.min_width},
            {"min_pixels_per_row", c.min_pixels_per_row},
            {"range_max", c.range_max},
            {"resample_stride", c.resample_stride}};
}

void udepthFromJson(const json& j, UdepthConfig& c) {
    checkKeys(j, "udepth", {"bin_size", "count_threshold", "min_width", "min_pixels_per_row",
                            "range_max", "resample_stride"});
    get(j, "bin_size", c.bin_size);
    get(j, "count_threshold", c.count_threshold);
    get(j, "min_width", c.min_width);
    get(j, "min_pixels_per_row", c.min_pixels_per_row);
    get(j, "range_max", c.range_max);
    get(j, "resample_stride", c.resample_stride);
}

json dbscanToJson(const DbscanConfig& c) {
    return {{"voxel_size", c.voxel_size},
            {"min_points_per_voxel", c.min_points_per_voxel},
            {"eps", c.eps},
            {"min_pts", c.min_pts},
            {"min_cluster_size", c.min_cluster_size},
            {"max_range", c.max_range},
            {"stride", c.stride},
            {"min_box_dim", c.min_box_dim}};
}

void dbscanFromJson(const json& j, DbscanConfig& c) {
    checkKeys(j, "dbscan", {"voxel_size", "min_points_per_voxel", "eps", "min_pts",
                            "min_cluster_size", "max_range", "stride", "min_box_dim"});
    get(j, "voxel_size", c.voxel_size);
    get(j, "min_points_per_voxel", c.min_points_per_voxel);
    get(j, "eps", c.eps);
    get(j, "min_pts", c.min_pts);
    get(j, "min_cluster_size", c.min_cluster_size);
    get(j, "max_range", c.max_range);
    get(j, "stride", c.stride);
    get(j, "min_box_dim", c.min_box_dim);
}

json madToJson(const MadConfig& c) {
    return {{"n", c.n},
            {"min_thickness", c.min_thickness},
            {"dynamic_classes", c.dynamic_classes},
            {"subsample_area", c.subsample_area},
            {"cloud_stride", c.cloud_stride}};
}

void madFromJson(const json& j, MadConfig& c) {
    checkKeys(j, "mad",
              {"n", "min_thickness", "dynamic_classes", "subsample_area", "cloud_stride"});
    get(j, "n", c.n);
    get(j, "min_thickness", c.min_thickness);
    get(j, "dynamic_classes", c.dynamic_classes);
    get(j, "subsample_area", c.subsample_area);
    get(j, "cloud_stride", c.cloud_stride);
}

const char* toString(TrackerConfig::Association a) {
    return a == TrackerConfig::Association::Feature ? "feature" : "center_distance";
}

const char* toString(TrackerConfig::Motion m) {
    return m == TrackerConfig::Motion::ConstAccel ? "const_accel" : "const_vel";
}

json trackerToJson(const TrackerConfig& c) {
    return {{"dt", c.dt},
            {"t_sim", c.t_sim},
            {"scales",
             {{"pos", c.scales.pos},
              {"dim", c.scales.dim},
              {"len", c.scales.len},
              {"std_dev", c.scales.std_dev}}},
            {"k_v", c.k_v},
            {"q_diag", arr(c.q_diag)},
            {"r_diag", arr(c.r_diag)},
            {"initial_cov", c.initial_cov},
            {"birth_hits", c.birth_hits},
            {"death_misses", c.death_misses},
            {"history", c.history},
            {"dims_alpha", c.dims_alpha},
            {"association", toString(c.association)},
            {"motion", toString(c.motion)},
            {"center_gate", c.center_gate}};
}

void trackerFromJson(const json& j, TrackerConfig& c) {
    checkKeys(j, "tracker",
              {"dt", "t_sim", "scales", "k_v", "q_diag", "r_diag", "initial_cov", "birth_hits",
               "death_misses", "history", "dims_alpha", "association", "motion", "center_gate"});
    get(j, "dt", c.dt);
    get(j, "t_sim", c.t_sim);
    if (auto it = j.find("scales"); it != j.end()) {
        checkKeys(*it, "tracker.scales", {"pos", "dim", "len", "std_dev"});
        get(*it, "pos", c.scales.pos);
        get(*it, "dim", c.scales.dim);
        get(*it, "len", c.scales.len);
        get(*it, "std_dev", c.scales.std_dev);
    }
    get(j, "k_v", c.k_v);
    getVec6(j, "q_diag", c.q_diag);
    getVec6(j, "r_diag", c.r_diag);
    get(j, "initial_cov", c.initial_cov);
    get(j, "birth_hits", c.birth_hits);
    get(j, "death_misses", c.death_misses);
    get(j, "history", c.history);
    get(j, "dims_alpha", c.dims_alpha);
    if (auto it = j.find("association"); it != j.end()) {
        const auto s = it->get<std::string>();
        if (s == "feature")
            c.association = TrackerConfig::Association::Feature;
        else if (s == "center_distance")
            c.association = TrackerConfig::Association::CenterDistance;
        else
            fail("association must be 'feature' or 'center_distance', got '" + s + "'");
    }
    if (auto it = j.find("motion"); it != j.end()) {
        const auto s = it->get<std::string>();
        if (s == "const_accel")
            c.motion = TrackerConfig::Motion::ConstAccel;
        else if (s == "const_vel")
            c.motion = TrackerConfig::Motion::ConstVel;
        else
            fail("motion must be 'const_accel' or 'const_vel', got '" + s + "'");
    }
    get(j, "center_gate", c.center_gate);
}

json identifyToJson(const IdentifyConfig& c) {
    return {{"t_vel", c.t_vel},
            {"t_vote", c.t_vote},
            {"t_ratio", c.t_ratio},
            {"k_back", c.k_back},
            {"min_valid", c.min_valid},
            {"hysteresis", c.hysteresis},
            {"nn_max_dist", c.nn_max_dist},
            {"occlusion_slack", c.occlusion_slack},
            {"visibility_filter", c.visibility_filter},
            {"point_voting", c.point_voting}};
}

void identifyFromJson(const json& j, IdentifyConfig& c) {
    checkKeys(j, "identify",
              {"t_vel", "t_vote", "t_ratio", "k_back", "min_valid", "hysteresis", "nn_max_dist",
               "occlusion_slack", "visibility_filter", "point_voting"});
    get(j, "t_vel", c.t_vel);
    get(j, "t_vote", c.t_vote);
    get(j, "t_ratio", c.t_ratio);
    get(j, "k_back", c.k_back);
    get(j, "min_valid", c.min_valid);
    get(j, "hysteresis", c.hysteresis);
    get(j, "nn_max_dist", c.nn_max_dist);
    get(j, "occlusion_slack", c.occlusion_slack);
    get(j, "visibility_filter", c.visibility_filter);
    get(j, "point_voting", c.point_voting);
}

json evalCfgToJson(const EvalConfig& c) {
    return {{"match_iou", c.match_iou},
            {"skip_frames", c.skip_frames},
            {"min_visibility", c.min_visibility}};
}

void evalCfgFromJson(const json& j, EvalConfig& c) {
    checkKeys(j, "eval", {"match_iou", "skip_frames", "min_visibility"});
    get(j, "match_iou", c.match_iou);
    get(j, "skip_frames", c.skip_frames);
    get(j, "min_visibility", c.min_visibility);
}

// ---- scenes ----

json trajectoryToJson(const Trajectory& t) {
    if (t.kind == Trajectory::Kind::Orbit) {
        return {{"kind", "orbit"},
                {"center", arr(t.center)},
                {"radius", t.radius},
                {"angular_velocity", t.angular_velocity}};
    }
    if (t.kind == Trajectory::Kind::Piecewise) {
        json phases = json::array();
        for (const auto& ph : t.phases)
            phases.push_back({{"duration", ph.duration}, {"acceleration", arr(ph.acceleration)}});
        return {{"kind", "piecewise"},
                {"p0", arr(t.p0)},
                {"velocity", arr(t.velocity)},
                {"phases", std::move(phases)}};
    }
    json j = {{"kind", "analytic"}, {"p0", arr(t.p0)}};
    if (t.velocity != Vec3::Zero()) j["velocity"] = arr(t.velocity);
    if (t.acceleration != Vec3::Zero()) j["acceleration"] = arr(t.acceleration);
    if (t.amplitude != Vec3::Zero()) {
        j["amplitude"] = arr(t.amplitude);
        j["frequency"] = t.frequency;
        j["phase"] = t.phase;
    }
    return j;
}

Trajectory trajectoryFromJson(const json& j) {
    checkKeys(j, "trajectory",
              {"kind", "p0", "velocity", "acceleration", "amplitude", "frequency", "phase",
               "center", "radius", "angular_velocity", "phases"});
    Trajectory t;
    std::string kind = "analytic";
    get(j, "kind", kind);
    if (kind == "orbit") {
        t.kind = Trajectory::Kind::Orbit;
        getVec3(j, "center", t.center);
        get(j, "radius", t.radius);
        get(j, "angular_velocity", t.angular_velocity);
    } else if (kind == "piecewise") {
        t.kind = Trajectory::Kind::Piecewise;
        getVec3(j, "p0", t.p0);
        getVec3(j, "velocity", t.velocity);
        if (auto it = j.find("phases"); it != j.end()) {
            if (!it->is_array()) fail("trajectory phases must be an array");
            for (const auto& pj : *it) {
                checkKeys(pj, "trajectory phase", {"duration", "acceleration"});
                TrajectoryPhase ph;
                get(pj, "duration", ph.duration);
                getVec3(pj, "acceleration", ph.acceleration);
                t.phases.push_back(ph);
            }
        }
    } else if (kind == "analytic") {
        t.kind = Trajectory::Kind::Analytic;
        getVec3(j, "p0", t.p0);
        getVec3(j, "velocity", t.velocity);
        getVec3(j, "acceleration", t.acceleration);
        getVec3(j, "amplitude", t.amplitude);
        get(j, "frequency", t.frequency);
        get(j, "phase", t.phase);
    } else {
        fail("trajectory kind must be 'analytic', 'orbit', or 'piecewise', got '" + kind + "'");
    }
    return t;
}

json intrinsicsToJson(const CameraIntrinsics& c) {
    return {{"fx", c.fx},
            {"fy", c.fy},
            {"cx", c.cx},
            {"cy", c.cy},
            {"width", c.width},
            {"height", c.height},
            {"depth_scale", c.depth_scale},
            {"depth_min", c.depth_min},
            {"depth_max", c.depth_max}};
}

CameraIntrinsics intrinsicsFromJson(const json& j) {
    checkKeys(j, "intrinsics",
              {"fx", "fy", "cx", "cy", "width", "height", "depth_scale", "depth_min", "depth_max"});
    CameraIntrinsics c;
    get(j, "fx", c.fx);
    get(j, "fy", c.fy);
    get(j, "cx", c.cx);
    get(j, "cy", c.cy);
    get(j, "width", c.width);
    get(j, "height", c.height);
    get(j, "depth_scale", c.depth_scale);
    get(j, "depth_min", c.depth_min);
    get(j, "depth_max", c.depth_max);
    return c;
}

json evalToJsonObj(const EvalResult& r) {
    return {{"frames_scored", r.frames_scored},
            {"truth_dynamic_samples", r.truth_dynamic_samples},
            {"matched_samples", r.matched_samples},
            {"coverage", r.coverage},
            {"pos_rmse", r.pos_rmse},
            {"pos_mae", r.pos_mae},
            {"vel_rmse", r.vel_rmse},
            {"vel_mae", r.vel_mae},
            {"dynamic_reports", r.dynamic_reports},
            {"misdetections", r.misdetections},
            {"fp_rate", r.fp_rate},
            {"id_switches", r.id_switches}};
}

json timingToJsonObj(const TimingSummary& t) {
    return {{"frames", t.frames},
            {"mean_total_ms", t.mean_total_ms},
            {"median_total_ms", t.median_total_ms},
            {"max_total_ms", t.max_total_ms},
            {"mean_udepth_ms", t.mean_udepth_ms},
            {"mean_dbscan_ms", t.mean_dbscan_ms},
            {"mean_madlift_ms", t.mean_madlift_ms},
            {"mean_ensemble_ms", t.mean_ensemble_ms},
            {"mean_track_ms", t.mean_track_ms},
            {"mean_identify_ms", t.mean_identify_ms}};
}

}  // namespace

std::string pipelineConfigToJson(const PipelineConfig& cfg) {
    json j = {{"flags", flagsToJson(cfg.flags)},     {"udepth", udepthToJson(cfg.udepth)},
              {"dbscan", dbscanToJson(cfg.dbscan)},  {"mad", madToJson(cfg.mad)},
              {"ensemble", {{"iou_threshold", cfg.ensemble.iou_threshold}}},
              {"tracker", trackerToJson(cfg.tracker)}, {"identify", identifyToJson(cfg.identify)},
              {"eval", evalCfgToJson(cfg.eval)}};
    return j.dump(2) + "\n";
}

PipelineConfig pipelineConfigFromJson(const std::string& text, PipelineConfig base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(e.what());
    }
    checkKeys(j, "config",
              {"flags", "udepth", "dbscan", "mad", "ensemble", "tracker", "identify", "eval"});
    try {
        if (auto it = j.find("flags"); it != j.end()) flagsFromJson(*it, base.flags);
        if (auto it = j.find("udepth"); it != j.end()) udepthFromJson(*it, base.udepth);
        if (auto it = j.find("dbscan"); it != j.end()) dbscanFromJson(*it, base.dbscan);
        if (auto it = j.find("mad"); it != j.end()) madFromJson(*it, base.mad);
        if (auto it = j.find("ensemble"); it != j.end()) {
            checkKeys(*it, "ensemble", {"iou_threshold"});
            get(*it, "iou_threshold", base.ensemble.iou_threshold);
        }
        if (auto it = j.find("tracker"); it != j.end()) trackerFromJson(*it, base.tracker);
        if (auto it = j.find("identify"); it != j.end()) identifyFromJson(*it, base.identify);
        if (auto it = j.find("eval"); it != j.end()) evalCfgFromJson(*it, base.eval);
    } catch (const json::exception& e) {
        fail(e.what());
    }
    return base;
}

std::string sceneToJson(const ScenePreset& preset) {
    const SceneScript& s = preset.script;
    json j;
    j["name"] = preset.name;
    j["duration"] = s.duration;
    j["frame_rate"] = s.frame_rate;
    j["seed"] = s.seed;
    j["camera"] = {{"position", trajectoryToJson(s.camera.position)},
                   {"yaw", s.camera.yaw},
                   {"yaw_rate", s.camera.yaw_rate},
                   {"pitch", s.camera.pitch}};
    j["noise"] = {{"depth_sigma_frac", s.noise.depth_sigma_frac},
                  {"blob_rate", s.noise.blob_rate},
                  {"blob_depth_min", s.noise.blob_depth_min},
                  {"blob_depth_max", s.noise.blob_depth_max},
                  {"blob_life_min", s.noise.blob_life_min},
                  {"blob_life_max", s.noise.blob_life_max},
                  {"blob_width_frac_min", s.noise.blob_width_frac_min},
                  {"blob_width_frac_max", s.noise.blob_width_frac_max},
                  {"blob_height_frac_min", s.noise.blob_height_frac_min},
                  {"blob_height_frac_max", s.noise.blob_height_frac_max},
                  {"blob_drift_min", s.noise.blob_drift_min},
                  {"blob_drift_max", s.noise.blob_drift_max}};
    j["det2d"] = {{"emit", s.det2d.emit},
                  {"jitter_px", s.det2d.jitter_px},
                  {"dropout", s.det2d.dropout}};
    j["objects"] = json::array();
    for (const SceneObject& o : s.objects) {
        j["objects"].push_back({{"shape", o.shape == ShapeKind::Box ? "box" : "cylinder"},
                                {"dims", arr(o.dims)},
                                {"trajectory", trajectoryToJson(o.trajectory)},
                                {"dynamic", o.dynamic},
                                {"label", o.label}});
    }
    j["intrinsics"] = intrinsicsToJson(preset.intr);
    return j.dump(2) + "\n";
}

ScenePreset sceneFromJson(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(e.what());
    }
    checkKeys(j, "scene",
              {"name", "duration", "frame_rate", "seed", "camera", "noise", "det2d", "objects",
               "intrinsics"});
    ScenePreset p;
    p.name = "scene";
    try {
        get(j, "name", p.name);
        get(j, "duration", p.script.duration);
        get(j, "frame_rate", p.script.frame_rate);
        get(j, "seed", p.script.seed);
        if (auto it = j.find("camera"); it != j.end()) {
            checkKeys(*it, "camera", {"position", "yaw", "yaw_rate", "pitch"});
            if (auto pt = it->find("position"); pt != it->end())
                p.script.camera.position = trajectoryFromJson(*pt);
            get(*it, "yaw", p.script.camera.yaw);
            get(*it, "yaw_rate", p.script.camera.yaw_rate);
            get(*it, "pitch", p.script.camera.pitch);
        }
        if (auto it = j.find("noise"); it != j.end()) {
            checkKeys(*it, "noise",
                      {"depth_sigma_frac", "blob_rate", "blob_depth_min", "blob_depth_max",
                       "blob_life_min", "blob_life_max", "blob_width_frac_min",
                       "blob_width_frac_max", "blob_height_frac_min", "blob_height_frac_max",
                       "blob_drift_min", "blob_drift_max"});
            NoiseModel& n = p.script.noise;
            get(*it, "depth_sigma_frac", n.depth_sigma_frac);
            get(*it, "blob_rate", n.blob_rate);
            get(*it, "blob_depth_min", n.blob_depth_min);
            get(*it, "blob_depth_max", n.blob_depth_max);
            get(*it, "blob_life_min", n.blob_life_min);
            get(*it, "blob_life_max", n.blob_life_max);
            get(*it, "blob_width_frac_min", n.blob_width_frac_min);
            get(*it, "blob_width_frac_max", n.blob_width_frac_max);
            get(*it, "blob_height_frac_min", n.blob_height_frac_min);
            get(*it, "blob_height_frac_max", n.blob_height_frac_max);
            get(*it, "blob_drift_min", n.blob_drift_min);
            get(*it, "blob_drift_max", n.blob_drift_max);
        }
        if (auto it = j.find("det2d"); it != j.end()) {
            checkKeys(*it, "det2d", {"emit", "jitter_px", "dropout"});
            get(*it, "emit", p.script.det2d.emit);
            get(*it, "jitter_px", p.script.det2d.jitter_px);
            get(*it, "dropout", p.script.det2d.dropout);
        }
        if (auto it = j.find("objects"); it != j.end()) {
            if (!it->is_array()) fail("objects must be an array");
            for (const json& jo : *it) {
                checkKeys(jo, "object", {"shape", "dims", "trajectory", "dynamic", "label"});
                SceneObject o;
                std::string shape = "box";
                get(jo, "shape", shape);
                if (shape == "box")
                    o.shape = ShapeKind::Box;
                else if (shape == "cylinder")
                    o.shape = ShapeKind::Cylinder;
                else
                    fail("shape must be 'box' or 'cylinder', got '" + shape + "'");
                getVec3(jo, "dims", o.dims);
                if (auto t = jo.find("trajectory"); t != jo.end())
                    o.trajectory = trajectoryFromJson(*t);
                get(jo, "dynamic", o.dynamic);
                get(jo, "label", o.label);
                p.script.objects.push_back(std::move(o));
            }
        }
        if (auto it = j.find("intrinsics"); it != j.end()) p.intr = intrinsicsFromJson(*it);
    } catch (const json::exception& e) {
        fail(e.what());
    }
    return p;
}

std::string evalResultToJson(const EvalResult& r) { return evalToJsonObj(r).dump(2) + "\n"; }

std::string timingSummaryToJson(const TimingSummary& t) { return timingToJsonObj(t).dump(2) + "\n"; }

std::string ablationToJson(const std::vector<AblationRow>& rows) {
    json j = json::array();
    for (const AblationRow& r : rows) {
        j.push_back({{"variant", r.name},
                     {"eval", evalToJsonObj(r.eval)},
                     {"timing", timingToJsonObj(r.timing)}});
    }
    return j.dump(2) + "\n";
}

std::string runReportToJson(const std::optional<EvalResult>& eval, const TimingSummary& timing) {
    json j;
    j["timing"] = timingToJsonObj(timing);
    if (eval) j["eval"] = evalToJsonObj(*eval);
    return j.dump(2) + "\n";
}

std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeTextFile(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open " + path + " for writing");
    out << text;
    if (!out) fail("write failed for " + path);
}

}  // namespace dodt
