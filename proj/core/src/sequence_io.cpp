#include "dodt/sequence_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dodt {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

std::ifstream openIn(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(path, mode);
    if (!f) fail(path, "cannot open for reading");
    return f;
}

std::ofstream openOut(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) fail(path, "cannot open for writing");
    return f;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

std::string frameName(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", index);
    return buf;
}

void writeDepthPgm(const fs::path& path, const DepthImage& img) {
    auto f = openOut(path, std::ios::binary);
    f << "P5\n" << img.width << " " << img.height << "\n65535\n";
    std::vector<unsigned char> buf(static_cast<size_t>(img.width) * img.height * 2);
    for (size_t i = 0; i < img.data.size(); ++i) {
        buf[2 * i] = static_cast<unsigned char>(img.data[i] >> 8);
        buf[2 * i + 1] = static_cast<unsigned char>(img.data[i] & 0xff);
    }
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) fail(path, "write failed");
}

DepthImage readDepthPgm(const fs::path& path) {
    auto f = openIn(path, std::ios::binary);
    std::string magic;
    int width = 0, height = 0, maxval = 0;
    f >> magic >> width >> height >> maxval;
    if (magic != "P5") fail(path, "not a P5 PGM");
    if (width <= 0 || height <= 0) fail(path, "bad dimensions");
    if (maxval < 256 || maxval > 65535) fail(path, "expected 16-bit maxval");
    f.get();  // single whitespace after maxval
    DepthImage img;
    img.width = width;
    img.height = height;
    img.data.resize(static_cast<size_t>(width) * height);
    std::vector<unsigned char> buf(img.data.size() * 2);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size())) fail(path, "truncated pixel data");
    for (size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    return img;
}

void writeMeta(const fs::path& path, const SequenceMeta& meta) {
    auto f = openOut(path);
    f << "width " << meta.intr.width << "\n";
    f << "height " << meta.intr.height << "\n";
    f << "fx " << fmt("%.9g", meta.intr.fx) << "\n";
    f << "fy " << fmt("%.9g", meta.intr.fy) << "\n";
    f << "cx " << fmt("%.9g", meta.intr.cx) << "\n";
    f << "cy " << fmt("%.9g", meta.intr.cy) << "\n";
    f << "depth_scale " << fmt("%.9g", meta.intr.depth_scale) << "\n";
    f << "depth_min " << fmt("%.9g", meta.intr.depth_min) << "\n";
    f << "depth_max " << fmt("%.9g", meta.intr.depth_max) << "\n";
    f << "frame_rate " << fmt("%.9g", meta.frame_rate) << "\n";
}

SequenceMeta readMeta(const fs::path& path) {
    auto f = openIn(path);
    std::map<std::string, double> kv;
    std::string key;
    double value;
    while (f >> key >> value) kv[key] = value;
    auto need = [&](const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end()) fail(path, "missing key " + k);
        return it->second;
    };
    SequenceMeta m;
    m.intr.width = static_cast<int>(need("width"));
    m.intr.height = static_cast<int>(need("height"));
    m.intr.fx = need("fx");
    m.intr.fy = need("fy");
    m.intr.cx = need("cx");
    m.intr.cy = need("cy");
    m.intr.depth_scale = need("depth_scale");
    m.intr.depth_min = need("depth_min");
    m.intr.depth_max = need("depth_max");
    m.frame_rate = need("frame_rate");
    m.intr.validate();
    if (m.frame_rate <= 0) fail(path, "frame_rate must be positive");
    return m;
}

void writePoses(const fs::path& path, const std::vector<double>& timestamps,
                const std::vector<Pose>& poses) {
    if (timestamps.size() != poses.size())
        throw std::invalid_argument("writePoses: size mismatch");
    auto f = openOut(path);
    for (size_t i = 0; i < poses.size(); ++i) {
        f << fmt("%.6f", timestamps[i]);
        const auto& p = poses[i];
        for (int k = 0; k < 3; ++k) f << "," << fmt("%.9g", p.translation[k]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) f << "," << fmt("%.9g", p.rotation(r, c));
        f << "\n";
    }
}

void readPoses(const fs::path& path, std::vector<double>& timestamps, std::vector<Pose>& poses) {
    auto f = openIn(path);
    timestamps.clear();
    poses.clear();
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t;
        Pose p;
        if (!(ss >> t)) fail(path, "bad pose line: " + line);
        for (int k = 0; k < 3; ++k) ss >> p.translation[k];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) ss >> p.rotation(r, c);
        if (!ss) fail(path, "bad pose line: " + line);
        timestamps.push_back(t);
        poses.push_back(p);
    }
}

void writeDet2d(const fs::path& path, const std::vector<Box2D>& boxes) {
    auto f = openOut(path);
    for (const auto& b : boxes) {
        f << b.u_min << " " << b.u_max << " " << b.v_min << " " << b.v_max << " "
          << (b.label.empty() ? "obstacle" : b.label) << " " << fmt("%.6f", b.confidence) << "\n";
    }
}

std::vector<Detection2D> readDet2d(const fs::path& path) {
    auto f = openIn(path);
    std::vector<Detection2D> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        Detection2D d;
        if (!(ss >> d.u_min >> d.u_max >> d.v_min >> d.v_max >> d.class_label >> d.confidence))
            fail(path, "bad detection line: " + line);
        out.push_back(d);
    }
    return out;
}

void writeTruth(const fs::path& path, const std::vector<GroundTruthFrame>& truth) {
    auto f = openOut(path);
    for (size_t fi = 0; fi < truth.size(); ++fi) {
        const auto& frame = truth[fi];
        for (size_t oi = 0; oi < frame.objects.size(); ++oi) {
            const auto& o = frame.objects[oi];
            f << fi << " " << fmt("%.6f", frame.timestamp) << " " << oi;
            for (int k = 0; k < 3; ++k) f << " " << fmt("%.9g", o.box.center[k]);
            for (int k = 0; k < 3; ++k) f << " " << fmt("%.9g", o.box.dims[k]);
            for (int k = 0; k < 3; ++k) f << " " << fmt("%.9g", o.velocity[k]);
            f << " " << (o.dynamic ? 1 : 0) << " " << fmt("%.6f", o.visibility) << " "
              << (o.label.empty() ? "obstacle" : o.label) << "\n";
        }
    }
}

std::vector<GroundTruthFrame> readTruth(const fs::path& path) {
    auto f = openIn(path);
    std::vector<GroundTruthFrame> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        size_t fi, oi;
        double ts;
        TruthObject o;
        int dynamic;
        if (!(ss >> fi >> ts >> oi >> o.box.center.x() >> o.box.center.y() >> o.box.center.z() >>
              o.box.dims.x() >> o.box.dims.y() >> o.box.dims.z() >> o.velocity.x() >>
              o.velocity.y() >> o.velocity.z() >> dynamic >> o.visibility >> o.label))
            fail(path, "bad truth line: " + line);
        o.dynamic = dynamic != 0;
        if (out.size() <= fi) out.resize(fi + 1);
        out[fi].timestamp = ts;
        if (out[fi].objects.size() <= oi) out[fi].objects.resize(oi + 1);
        out[fi].objects[oi] = o;
    }
    return out;
}

void writeTrackOutputs(const fs::path& path,
                       const std::vector<std::vector<TrackSnapshot>>& frames) {
    auto f = openOut(path);
    for (const auto& frame : frames) {
        for (const auto& s : frame) {
            f << fmt("%.6f", s.timestamp) << " " << s.id << " " << toString(s.label);
            for (int k = 0; k < 3; ++k) f << " " << fmt("%.6f", s.center[k]);
            for (int k = 0; k < 3; ++k) f << " " << fmt("%.6f", s.dims[k]);
            f << " " << fmt("%.6f", s.velocity.x()) << " " << fmt("%.6f", s.velocity.y()) << "\n";
        }
    }
}

std::vector<TrackSnapshot> readTrackOutputs(const fs::path& path) {
    auto f = openIn(path);
    std::vector<TrackSnapshot> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        TrackSnapshot s;
        std::string cls;
        if (!(ss >> s.timestamp >> s.id >> cls >> s.center.x() >> s.center.y() >> s.center.z() >>
              s.dims.x() >> s.dims.y() >> s.dims.z() >> s.velocity.x() >> s.velocity.y()))
            fail(path, "bad output line: " + line);
        s.label = obstacleClassFromString(cls);
        out.push_back(s);
    }
    return out;
}

std::vector<std::vector<TrackSnapshot>> alignSnapshots(const std::vector<TrackSnapshot>& flat,
                                                       const std::vector<double>& timestamps,
                                                       double tol) {
    std::vector<std::vector<TrackSnapshot>> frames(timestamps.size());
    for (const auto& s : flat) {
        int best = -1;
        double best_d = tol;
        for (size_t i = 0; i < timestamps.size(); ++i) {
            const double d = std::abs(timestamps[i] - s.timestamp);
            if (d <= best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        if (best < 0)
            throw std::runtime_error("snapshot timestamp " + fmt("%.6f", s.timestamp) +
                                     " matches no frame");
        frames[static_cast<size_t>(best)].push_back(s);
    }
    return frames;
}

DepthImage Sequence::loadDepth(int frame) const {
    return readDepthPgm(dir / "depth" / frameName(frame));
}

std::vector<Detection2D> Sequence::loadDet2d(int frame) const {
    const fs::path p = dir / "det2d" / frameName(frame);
    if (!fs::exists(p)) return {};
    return readDet2d(p);
}

Sequence openSequence(const fs::path& dir) {
    Sequence seq;
    seq.dir = dir;
    seq.meta = readMeta(dir / "meta");
    readPoses(dir / "poses", seq.timestamps, seq.poses);
    if (seq.timestamps.empty()) fail(dir / "poses", "no frames");
    seq.has_det2d = fs::is_directory(dir / "det2d");
    seq.has_truth = fs::exists(dir / "truth");
    if (seq.has_truth) {
        seq.truth = readTruth(dir / "truth");
        if (seq.truth.size() != seq.timestamps.size())
            fail(dir / "truth", "frame count differs from poses");
    }
    return seq;
}

Sequence generateSequence(const SceneScript& script, const CameraIntrinsics& intr,
                          const fs::path& dir) {
    script.validate();
    intr.validate();
    fs::create_directories(dir / "depth");
    const bool emit_det = script.det2d.emit;
    if (emit_det) fs::create_directories(dir / "det2d");

    const int n = script.frameCount();
    std::vector<double> timestamps(n);
    std::vector<Pose> poses(n);
    std::vector<GroundTruthFrame> truth(n);
    for (int i = 0; i < n; ++i) {
        const double t = script.timeOfFrame(i);
        timestamps[i] = t;
        poses[i] = script.camera.poseAt(t);
        auto [depth, gt] = renderFrame(script, t, intr);
        writeDepthPgm(dir / "depth" / frameName(i), depth);
        truth[i] = std::move(gt);
        if (emit_det) {
            const auto boxes =
                (script.det2d.jitter_px > 0 || script.det2d.dropout > 0)
                    ? renderDetections2dDegraded(script, t, intr)
                    : renderDetections2d(script, t, intr);
            writeDet2d(dir / "det2d" / frameName(i), boxes);
        }
    }
    writeMeta(dir / "meta", {intr, script.frame_rate});
    writePoses(dir / "poses", timestamps, poses);
    writeTruth(dir / "truth", truth);
    return openSequence(dir);
}

}  // namespace dodt
