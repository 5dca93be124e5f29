#pragma once

#include <span>
#include <string>
#include <vector>

#include "dodt/geometry.hpp"

namespace dodt {

// Detector-agnostic 3D detection as the tracker consumes it.
struct Detection3D {
    AABB3D box;
    PointCloud points;
    std::string class_label;
    bool dynamic_hint{false};
};

struct EnsembleConfig {
    double iou_threshold{0.25};
};

struct BestMatch {
    double score{0.0};
    int index{-1};
};

// Highest-IOU candidate, or index -1 when the list is empty (score 0).
BestMatch findBestIouMatch(const AABB3D& box, std::span<const Detection3D> candidates);

// Componentwise max of dims, mean of centers.
AABB3D fuseBoxes(const AABB3D& a, const AABB3D& b);

// Mutual-best-IOU fusion: a pair is emitted only when each box is the other's
// best match and both scores clear the threshold. Unmatched boxes from either
// list are dropped; that is what suppresses single-detector false positives.
// Fused detections keep b's cloud when it has one, else a's.
std::vector<Detection3D> ensemblePair(std::span<const Detection3D> list_a,
                                      std::span<const Detection3D> list_b,
                                      const EnsembleConfig& cfg);

// Second-stage merge of an auxiliary classed detector into the primary list.
// Matching auxiliary boxes fuse in place and donate their class label;
// unmatched auxiliary boxes are appended only when their class is dynamic.
// Unmatched primary boxes survive: the auxiliary detector must not veto the
// primary one.
std::vector<Detection3D> ensembleCascade(std::vector<Detection3D> primary,
                                         std::span<const Detection3D> aux,
                                         const EnsembleConfig& cfg);

}  // namespace dodt
