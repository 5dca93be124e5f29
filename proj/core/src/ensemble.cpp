#include "dodt/ensemble.hpp"

#include <algorithm>

namespace dodt {

BestMatch findBestIouMatch(const AABB3D& box, std::span<const Detection3D> candidates) {
    BestMatch best;
    for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
        const double s = iou3d(box, candidates[i].box);
        if (s > best.score) {
            best.score = s;
            best.index = i;
        }
    }
    return best;
}

AABB3D fuseBoxes(const AABB3D& a, const AABB3D& b) {
    AABB3D out;
    out.center = 0.5 * (a.center + b.center);
    out.dims = a.dims.cwiseMax(b.dims);
    return out;
}

std::vector<Detection3D> ensemblePair(std::span<const Detection3D> list_a,
                                      std::span<const Detection3D> list_b,
                                      const EnsembleConfig& cfg) {
    std::vector<Detection3D> out;
    for (int i = 0; i < static_cast<int>(list_a.size()); ++i) {
        const BestMatch fwd = findBestIouMatch(list_a[i].box, list_b);
        if (fwd.index < 0 || fwd.score <= cfg.iou_threshold) continue;
        const BestMatch rev = findBestIouMatch(list_b[fwd.index].box, list_a);
        if (rev.index != i || rev.score <= cfg.iou_threshold) continue;

        const Detection3D& a = list_a[i];
        const Detection3D& b = list_b[fwd.index];
        Detection3D fused;
        fused.box = fuseBoxes(a.box, b.box);
        fused.points = !b.points.empty() ? b.points : a.points;
        fused.class_label = !b.class_label.empty() ? b.class_label : a.class_label;
        fused.dynamic_hint = a.dynamic_hint || b.dynamic_hint;
        out.push_back(std::move(fused));
    }
    return out;
}

std::vector<Detection3D> ensembleCascade(std::vector<Detection3D> primary,
                                         std::span<const Detection3D> aux,
                                         const EnsembleConfig& cfg) {
    std::vector<bool> taken(primary.size(), false);
    for (const Detection3D& ax : aux) {
        BestMatch best;
        for (int i = 0; i < static_cast<int>(primary.size()); ++i) {
            if (taken[i]) continue;
            const double s = iou3d(ax.box, primary[i].box);
            if (s > best.score) {
                best.score = s;
                best.index = i;
            }
        }
        if (best.index >= 0 && best.score > cfg.iou_threshold) {
            Detection3D& p = primary[best.index];
            p.box = fuseBoxes(p.box, ax.box);
            if (!ax.class_label.empty()) p.class_label = ax.class_label;
            p.dynamic_hint = p.dynamic_hint || ax.dynamic_hint;
            if (p.points.empty()) p.points = ax.points;
            taken[best.index] = true;
        } else if (ax.dynamic_hint) {
            primary.push_back(ax);
        }
    }
    return primary;
}

}  // namespace dodt
