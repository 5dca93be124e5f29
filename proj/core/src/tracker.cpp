#include "dodt/tracker.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dodt {

const char* toString(ObstacleClass c) {
    switch (c) {
        case ObstacleClass::Static: return "static";
        case ObstacleClass::Dynamic: return "dynamic";
        default: return "unknown";
    }
}

ObstacleClass obstacleClassFromString(const std::string& s) {
    if (s == "static") return ObstacleClass::Static;
    if (s == "dynamic") return ObstacleClass::Dynamic;
    return ObstacleClass::Unknown;
}

FeatureVector extractFeature(const AABB3D& box, const PointCloud& points) {
    FeatureVector f;
    f.pos = box.center;
    f.dim = box.dims;
    f.len = static_cast<double>(points.size());
    if (!points.empty()) {
        Vec3 mean = Vec3::Zero();
        for (const auto& p : points) mean += p;
        mean /= static_cast<double>(points.size());
        Vec3 var = Vec3::Zero();
        for (const auto& p : points) var += (p - mean).cwiseProduct(p - mean);
        var /= static_cast<double>(points.size());
        f.std_dev = var.cwiseSqrt();
    }
    return f;
}

double similarity(const FeatureVector& a, const FeatureVector& b, const FeatureScales& scales) {
    double d2 = 0;
    d2 += ((a.pos - b.pos) / scales.pos).squaredNorm();
    d2 += ((a.dim - b.dim) / scales.dim).squaredNorm();
    const double dl = (a.len - b.len) / scales.len;
    d2 += dl * dl;
    d2 += ((a.std_dev - b.std_dev) / scales.std_dev).squaredNorm();
    return std::exp(-d2);
}

Mat6 accelTransition(double dt) {
    Mat6 A = Mat6::Identity();
    A(0, 2) = dt;
    A(1, 3) = dt;
    A(2, 4) = dt;
    A(3, 5) = dt;
    A(0, 4) = 0.5 * dt * dt;
    A(1, 5) = 0.5 * dt * dt;
    return A;
}

void kfPredict(KalmanState& s, const Mat6& A, const Mat6& Q) {
    s.x = A * s.x;
    s.P = A * s.P * A.transpose() + Q;
}

void kfUpdate(KalmanState& s, const Vec6& z, const Mat6& R) {
    Mat6 S = s.P + R;  // H = I
    Eigen::LDLT<Mat6> ldlt(S);
    if (ldlt.info() != Eigen::Success) {
        S += 1e-9 * Mat6::Identity();
        ldlt.compute(S);
    }
    // K = P S^-1, computed via S^T K^T = P^T with S symmetric
    const Mat6 K = ldlt.solve(s.P).transpose();
    s.x += K * (z - s.x);
    s.P = (Mat6::Identity() - K) * s.P;
    s.P = 0.5 * (s.P + s.P.transpose()).eval();
}

MeasuredKinematics measureKinematics(std::span<const Eigen::Vector2d> positions_newest_first,
                                     double dt, int k_v) {
    MeasuredKinematics m;
    if (k_v < 1 || dt <= 0) return m;
    const auto n = static_cast<int>(positions_newest_first.size());
    const double span = k_v * dt;
    if (n >= k_v + 1) {
        m.velocity = (positions_newest_first[0] - positions_newest_first[k_v]) / span;
    }
    if (n >= 2 * k_v + 1) {
        const Eigen::Vector2d v_prev =
            (positions_newest_first[k_v] - positions_newest_first[2 * k_v]) / span;
        m.acceleration = (m.velocity - v_prev) / span;
    }
    return m;
}

namespace {

struct Candidate {
    double score;  // similarity (higher better) or distance (lower better)
    int track;
    int detection;
};

AssociationResult greedyAssign(std::vector<Candidate>& cands, bool higher_better,
                               int n_tracks, int n_dets) {
    if (higher_better) {
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.track != b.track) return a.track < b.track;
            return a.detection < b.detection;
        });
    } else {
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            if (a.score != b.score) return a.score < b.score;
            if (a.track != b.track) return a.track < b.track;
            return a.detection < b.detection;
        });
    }
    AssociationResult res;
    std::vector<char> track_used(n_tracks, 0), det_used(n_dets, 0);
    for (const auto& c : cands) {
        if (track_used[c.track] || det_used[c.detection]) continue;
        track_used[c.track] = 1;
        det_used[c.detection] = 1;
        res.matches.emplace_back(c.track, c.detection);
    }
    for (int i = 0; i < n_tracks; ++i)
        if (!track_used[i]) res.unmatched_tracks.push_back(i);
    for (int j = 0; j < n_dets; ++j)
        if (!det_used[j]) res.unmatched_detections.push_back(j);
    return res;
}

}  // namespace

AssociationResult associate(std::span<const TrackedObstacle> tracks,
                            std::span<const Detection3D> detections, const TrackerConfig& cfg) {
    const int nt = static_cast<int>(tracks.size());
    const int nd = static_cast<int>(detections.size());
    std::vector<Candidate> cands;
    cands.reserve(static_cast<size_t>(nt) * nd);

    if (cfg.association == TrackerConfig::Association::Feature) {
        std::vector<FeatureVector> det_features(detections.size());
        for (int j = 0; j < nd; ++j)
            det_features[j] = extractFeature(detections[j].box, detections[j].points);
        for (int i = 0; i < nt; ++i) {
            FeatureVector tf = tracks[i].feature;
            tf.pos = tracks[i].center();  // predicted position, not last seen
            for (int j = 0; j < nd; ++j) {
                const double sim = similarity(tf, det_features[j], cfg.scales);
                if (sim > cfg.t_sim) cands.push_back({sim, i, j});
            }
        }
        return greedyAssign(cands, true, nt, nd);
    }

    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nd; ++j) {
            const double dist = (tracks[i].last_detected_center - detections[j].box.center).norm();
            if (dist < cfg.center_gate) cands.push_back({dist, i, j});
        }
    }
    return greedyAssign(cands, false, nt, nd);
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg) {
    if (cfg_.dt <= 0) throw std::invalid_argument("tracker dt must be positive");
    if (cfg_.k_v < 1) throw std::invalid_argument("k_v must be >= 1");
    A_ = accelTransition(cfg_.dt);
    Q_ = cfg_.q_diag.asDiagonal();
    R_ = cfg_.r_diag.asDiagonal();
    P0_ = cfg_.initial_cov * Mat6::Identity();
    if (cfg_.motion == TrackerConfig::Motion::ConstVel) {
        // Freeze the acceleration states: nothing feeds them (A decoupled,
        // Q = 0, P0 = 0) and the huge R keeps the gain rows at zero.
        A_(0, 4) = A_(1, 5) = A_(2, 4) = A_(3, 5) = 0;
        Q_(4, 4) = Q_(5, 5) = 0;
        R_(4, 4) = R_(5, 5) = 1e12;
        P0_(4, 4) = P0_(5, 5) = 0;
    }
}

TrackedObstacle Tracker::makeTrack(double timestamp, Detection3D&& det) {
    TrackedObstacle t;
    t.id = next_id_++;
    t.state.x.setZero();
    t.state.x(0) = det.box.center.x();
    t.state.x(1) = det.box.center.y();
    t.state.P = P0_;
    t.z_center = det.box.center.z();
    t.dims = det.box.dims;
    t.feature = extractFeature(det.box, det.points);
    t.cloud = std::make_shared<const PointCloud>(std::move(det.points));
    t.history.push_front({timestamp, det.box.center, det.box, false});
    t.cloud_history.push_front(t.cloud);
    t.hits = 1;
    t.misses = 0;
    t.confirmed = cfg_.birth_hits <= 1;
    t.dynamic_override = det.dynamic_hint;
    t.last_detected_center = det.box.center;
    return t;
}

void Tracker::applyDetection(TrackedObstacle& t, double timestamp, Detection3D&& det) {
    // Measured kinematics from detected centers only: the walk stops at the
    // first coasted entry, because differencing across a coast would feed the
    // filter its own extrapolation back as evidence (after a long coast that
    // turns a small reacquisition offset into a huge velocity measurement).
    std::vector<Eigen::Vector2d> centers;
    centers.reserve(static_cast<size_t>(2 * cfg_.k_v) + 1);
    centers.emplace_back(det.box.center.x(), det.box.center.y());
    for (const auto& h : t.history) {
        if (h.coasted) break;
        if (static_cast<int>(centers.size()) > 2 * cfg_.k_v) break;
        centers.emplace_back(h.position.x(), h.position.y());
    }
    const MeasuredKinematics mk = measureKinematics(centers, cfg_.dt, cfg_.k_v);

    // Until the span refills with fresh detections the differenced components
    // are unobservable; report them at effectively infinite variance rather
    // than as a fabricated zero (same freeze idiom the CV mode uses).
    Mat6 R = R_;
    const int n = static_cast<int>(centers.size());
    if (n < cfg_.k_v + 1) R(2, 2) = R(3, 3) = 1e12;
    if (n < 2 * cfg_.k_v + 1) R(4, 4) = R(5, 5) = 1e12;

    Vec6 z;
    z << det.box.center.x(), det.box.center.y(), mk.velocity.x(), mk.velocity.y(),
        mk.acceleration.x(), mk.acceleration.y();
    kfUpdate(t.state, z, R);

    const double a = cfg_.dims_alpha;
    t.z_center = a * t.z_center + (1 - a) * det.box.center.z();
    t.dims = a * t.dims + (1 - a) * det.box.dims;
    t.feature = extractFeature(det.box, det.points);
    t.cloud = std::make_shared<const PointCloud>(std::move(det.points));
    t.dynamic_override = t.dynamic_override || det.dynamic_hint;
    t.last_detected_center = det.box.center;

    t.history.push_front({timestamp, det.box.center, det.box, false});
    t.cloud_history.push_front(t.cloud);
    t.hits += 1;
    t.misses = 0;
    if (t.hits >= cfg_.birth_hits) t.confirmed = true;
}

void Tracker::step(double timestamp, std::vector<Detection3D> detections) {
    for (auto& t : tracks_) kfPredict(t.state, A_, Q_);

    const AssociationResult assoc = associate(tracks_, detections, cfg_);

    for (const auto& [ti, di] : assoc.matches)
        applyDetection(tracks_[ti], timestamp, std::move(detections[di]));

    for (int ti : assoc.unmatched_tracks) {
        auto& t = tracks_[ti];
        t.misses += 1;
        t.hits = 0;
        t.history.push_front({timestamp, t.center(), t.box(), true});
        t.cloud_history.push_front(t.cloud);
    }

    for (auto& t : tracks_) {
        while (static_cast<int>(t.history.size()) > cfg_.history) t.history.pop_back();
        while (static_cast<int>(t.cloud_history.size()) > cfg_.history) t.cloud_history.pop_back();
    }

    std::erase_if(tracks_, [this](const TrackedObstacle& t) {
        return t.misses >= cfg_.death_misses;
    });

    for (int di : assoc.unmatched_detections)
        tracks_.push_back(makeTrack(timestamp, std::move(detections[di])));
}

std::vector<TrackSnapshot> Tracker::confirmedSnapshots(double timestamp) const {
    std::vector<TrackSnapshot> out;
    for (const auto& t : tracks_) {
        if (!t.confirmed || t.misses > 0) continue;
        TrackSnapshot s;
        s.timestamp = timestamp;
        s.id = t.id;
        s.label = t.label;
        s.center = t.center();
        s.dims = t.dims;
        s.velocity = t.velocityXY();
        out.push_back(s);
    }
    return out;
}

}  // namespace dodt
