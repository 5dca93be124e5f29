#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dodt/geometry.hpp"
#include "dodt/pipeline.hpp"
#include "dodt/scene.hpp"

namespace dodt {

// A scene script plus the camera it was sized for and the pipeline config the
// scene was tuned against (defaults unless the scene needs specific settings,
// e.g. a longer coast allowance for occlusion scenes). These are the reference
// scenes used by the test suite, the evaluation harness, and the benchmark.
struct ScenePreset {
    std::string name;
    SceneScript script;
    CameraIntrinsics intr;
    PipelineConfig config;
};

// 1 m cube 2.5 m ahead, camera pitched down so the top face is visible and
// the depth histogram spans the cube's true extent. Noiseless.
ScenePreset singleCube();

// Two laterally separated cubes at equal depth.
ScenePreset twoCubes();

// Thin walker board approaching head-on at 1 m/s, 30 Hz, constant velocity.
// noise_frac = 0 gives the noiseless tracking-accuracy scene.
ScenePreset headOnWalker(double noise_frac = 0.0);

// Person walking a lane behind two free-standing wall panels while the
// camera pans to keep the lane in view. The first occlusion is long enough
// that the person reappears far outside a fixed center-distance gate; the
// second covers an acceleration burst that only a constant-acceleration
// coast primed before the gap can follow. The association ablation scene.
ScenePreset personPassingWall();

// Camera translating along a corridor wall; the wall slides through the
// sensor range so its visible window moves at camera speed while the wall
// itself stands still. Sensor range deliberately equals the detector range.
ScenePreset wallApproach();

// Static boxes and a cylinder, static camera, 50 frames.
ScenePreset staticBoxes(double noise_frac = 0.0);

// Thin person-labeled board at 5 m, sensor range 8 m, 2D boxes emitted. The
// dense detectors cut off at 3 m and must stay silent.
ScenePreset farPerson();

// 30 s cluttered room at 15 Hz: two static boxes, an orbiting walker, a far
// back wall, 1% depth noise and blob artifacts. Seed selects the variant.
ScenePreset cluttered(std::uint64_t seed);

// 640x480, five objects in range, 1% noise: the performance scene.
ScenePreset benchmark5();

std::vector<std::string> presetNames();
std::optional<ScenePreset> presetByName(const std::string& name, std::uint64_t seed = 0);

}  // namespace dodt
