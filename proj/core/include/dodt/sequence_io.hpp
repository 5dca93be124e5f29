#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dodt/geometry.hpp"
#include "dodt/madlift.hpp"
#include "dodt/scene.hpp"
#include "dodt/tracker.hpp"

namespace dodt {

// On-disk sequence layout:
//   meta            key-value text: width height fx fy cx cy depth_scale
//                   depth_min depth_max frame_rate
//   poses           CSV per frame: timestamp, translation xyz, rotation row-major
//   depth/NNNNNN    16-bit binary PGM (P5, maxval 65535, big-endian)
//   det2d/NNNNNN    optional, one detection per line: u_min u_max v_min v_max label conf
//   truth           optional, one object per line:
//                   frame timestamp obj cx cy cz dx dy dz vx vy vz dynamic visibility label

struct SequenceMeta {
    CameraIntrinsics intr;
    double frame_rate{30};
};

std::string frameName(int index);  // zero-padded, 6 digits

void writeDepthPgm(const std::filesystem::path& path, const DepthImage& img);
DepthImage readDepthPgm(const std::filesystem::path& path);

void writeMeta(const std::filesystem::path& path, const SequenceMeta& meta);
SequenceMeta readMeta(const std::filesystem::path& path);

void writePoses(const std::filesystem::path& path, const std::vector<double>& timestamps,
                const std::vector<Pose>& poses);
void readPoses(const std::filesystem::path& path, std::vector<double>& timestamps,
               std::vector<Pose>& poses);

void writeDet2d(const std::filesystem::path& path, const std::vector<Box2D>& boxes);
std::vector<Detection2D> readDet2d(const std::filesystem::path& path);

void writeTruth(const std::filesystem::path& path, const std::vector<GroundTruthFrame>& truth);
std::vector<GroundTruthFrame> readTruth(const std::filesystem::path& path);

// One line per (frame, track): timestamp id class center xyz dims xyz velocity xy
void writeTrackOutputs(const std::filesystem::path& path,
                       const std::vector<std::vector<TrackSnapshot>>& frames);
std::vector<TrackSnapshot> readTrackOutputs(const std::filesystem::path& path);

// Group flat snapshots into per-frame bins by matching timestamps (text
// round-trips lose precision, hence the tolerance). Unmatched snapshots throw.
std::vector<std::vector<TrackSnapshot>> alignSnapshots(const std::vector<TrackSnapshot>& flat,
                                                       const std::vector<double>& timestamps,
                                                       double tol = 1e-4);

struct Sequence {
    std::filesystem::path dir;
    SequenceMeta meta;
    std::vector<double> timestamps;
    std::vector<Pose> poses;
    bool has_det2d{false};
    bool has_truth{false};
    std::vector<GroundTruthFrame> truth;

    int frameCount() const { return static_cast<int>(timestamps.size()); }
    DepthImage loadDepth(int frame) const;
    std::vector<Detection2D> loadDet2d(int frame) const;
};

Sequence openSequence(const std::filesystem::path& dir);

// Render every frame of the script to dir (meta, poses, depth, truth, and
// det2d when the script emits it). Overwrites existing files.
Sequence generateSequence(const SceneScript& script, const CameraIntrinsics& intr,
                          const std::filesystem::path& dir);

}  // namespace dodt
