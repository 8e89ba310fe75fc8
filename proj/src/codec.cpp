#include "stamr/codec.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace stamr {

std::vector<Frame> all_frames() {
    std::vector<Frame> out;
    out.reserve(24);
    for (int i = 0; i < Rotation::count(); ++i) out.push_back(Frame{Rotation::from_id(i)});
    return out;
}

std::string Encoding::serialize() const {
    std::ostringstream out;
    out << X << " " << Y << " " << Z << "|" << dir_bits;
    for (const auto& r : occ_rows) out << "|" << r;
    return out.str();
}

int zigzag_index(int x, int y, int X) { return y * X + (y % 2 == 0 ? x : X - 1 - x); }

void zigzag_cell(int i, int X, int& x, int& y) {
    y = i / X;
    int xs = i % X;
    x = (y % 2 == 0) ? xs : X - 1 - xs;
}

Encoding encode_frame(const Shape& s, const Frame& f) {
    Shape placed = s.rotated(f.rotation).normalized();
    Vec3 d = min_bbox(placed).dims();
    Encoding e;
    e.X = d.x;
    e.Y = d.y;
    e.Z = d.z;
    e.dir_bits.assign(static_cast<size_t>(d.x) * d.y, '0');
    for (int y = 0; y < d.y; ++y)
        for (int x = 0; x < d.x; ++x)
            e.dir_bits[static_cast<size_t>(zigzag_index(x, y, d.x))] = (y % 2 == 0) ? '0' : '1';
    e.occ_rows.assign(static_cast<size_t>(d.z), std::string(static_cast<size_t>(d.x) * d.y, '0'));
    for (Vec3 v : placed.voxels())
        e.occ_rows[static_cast<size_t>(v.z)][static_cast<size_t>(zigzag_index(v.x, v.y, d.x))] = '1';
    return e;
}

std::vector<Encoding> enumerate_encodings(const Shape& s) {
    std::vector<Encoding> out;
    std::set<std::string> seen;
    for (const Frame& f : all_frames()) {
        Encoding e = encode_frame(s, f);
        if (seen.insert(e.serialize()).second) out.push_back(std::move(e));
    }
    return out;
}

Encoding canonical_encoding(const Shape& s) {
    auto encs = enumerate_encodings(s);
    return *std::min_element(encs.begin(), encs.end());
}

int infer_width(const std::string& dir_bits) {
    if (dir_bits.empty()) throw std::runtime_error("empty direction row");
    if (dir_bits[0] != '0') throw std::runtime_error("direction row must start with 0");
    size_t X = dir_bits.find('1');
    if (X == std::string::npos) X = dir_bits.size();
    if (dir_bits.size() % X != 0)
        throw std::runtime_error("direction row length is not a multiple of the leading block");
    size_t blocks = dir_bits.size() / X;
    for (size_t j = 0; j < blocks; ++j) {
        char expect = (j % 2 == 0) ? '0' : '1';
        for (size_t k = 0; k < X; ++k)
            if (dir_bits[j * X + k] != expect)
                throw std::runtime_error("direction row is not an alternating block pattern");
    }
    return static_cast<int>(X);
}

void validate_encoding(const Encoding& e) {
    if (e.X < 1 || e.Y < 1 || e.Z < 1) throw std::runtime_error("encoding dims must be >= 1");
    size_t row = static_cast<size_t>(e.X) * static_cast<size_t>(e.Y);
    if (e.dir_bits.size() != row) throw std::runtime_error("direction row length != X*Y");
    if (infer_width(e.dir_bits) != e.X)
        throw std::runtime_error("direction row width disagrees with X");
    if (e.dir_bits.size() / static_cast<size_t>(e.X) != static_cast<size_t>(e.Y))
        throw std::runtime_error("direction row block count disagrees with Y");
    if (e.occ_rows.size() != static_cast<size_t>(e.Z))
        throw std::runtime_error("occupancy row count != Z");
    for (size_t z = 0; z < e.occ_rows.size(); ++z) {
        if (e.occ_rows[z].size() != row)
            throw std::runtime_error("occupancy row " + std::to_string(z) + " length != X*Y");
        for (char c : e.occ_rows[z])
            if (c != '0' && c != '1')
                throw std::runtime_error("occupancy row " + std::to_string(z) + " has non-bit chars");
    }
}

Shape decode(const Encoding& e) {
    validate_encoding(e);
    VoxelSet cells;
    for (int z = 0; z < e.Z; ++z)
        for (int i = 0; i < e.X * e.Y; ++i)
            if (e.occ_rows[static_cast<size_t>(z)][static_cast<size_t>(i)] == '1') {
                int x, y;
                zigzag_cell(i, e.X, x, y);
                cells.insert({x, y, z});
            }
    if (cells.empty()) throw std::runtime_error("encoding decodes to an empty voxel set");
    if (!is_connected(cells)) throw std::runtime_error("encoding decodes to a disconnected voxel set");
    return Shape(std::move(cells));
}

std::vector<ScheduleAction> decode_schedule(const Encoding& e) {
    validate_encoding(e);
    std::vector<ScheduleAction> out;
    auto occ = [&](int x, int y, int z) {
        return e.occ_rows[static_cast<size_t>(z)][static_cast<size_t>(zigzag_index(x, y, e.X))] == '1';
    };
    for (int z = 0; z < e.Z; ++z) {
        for (int i = 0; i < e.X * e.Y; ++i) {
            int x, y;
            zigzag_cell(i, e.X, x, y);
            if (z > 0 && !occ(x, y, z - 1))
                out.push_back({ScheduleAction::Op::Remove, {x, y, z - 1}});
            out.push_back({ScheduleAction::Op::Place,
                           {x, y, z},
                           occ(x, y, z) ? CellKind::ShapeCell : CellKind::FillerCell});
        }
    }
    // Final zig-zag pass over the last slice.
    for (int i = 0; i < e.X * e.Y; ++i) {
        int x, y;
        zigzag_cell(i, e.X, x, y);
        if (!occ(x, y, e.Z - 1)) out.push_back({ScheduleAction::Op::Remove, {x, y, e.Z - 1}});
    }
    return out;
}

namespace {

// Incremental view of the present voxels with a virtual base node.
struct PresentGraph {
    int X, Y;
    std::map<Vec3, CellKind> present;

    bool base_adjacent(Vec3 v) const { return v.z == 0 || v.y == Y - 1; }

    // Every shape voxel with z < below_z must reach BASE through present voxels.
    bool shape_connected_to_base(int below_z, Vec3* orphan) const {
        std::set<Vec3> reached;
        std::queue<Vec3> q;
        for (const auto& [v, k] : present)
            if (base_adjacent(v)) {
                reached.insert(v);
                q.push(v);
            }
        while (!q.empty()) {
            Vec3 v = q.front();
            q.pop();
            for (Face f : all_faces()) {
                Vec3 u = v + unit(f);
                if (present.count(u) && !reached.count(u)) {
                    reached.insert(u);
                    q.push(u);
                }
            }
        }
        for (const auto& [v, k] : present)
            if (k == CellKind::ShapeCell && v.z < below_z && !reached.count(v)) {
                if (orphan) *orphan = v;
                return false;
            }
        return true;
    }
};

}  // namespace

ScheduleReport check_schedule_connectivity(const Encoding& e) {
    auto schedule = decode_schedule(e);
    ScheduleReport report;
    PresentGraph g{e.X, e.Y, {}};
    for (size_t i = 0; i < schedule.size(); ++i) {
        const ScheduleAction& a = schedule[i];
        if (a.op == ScheduleAction::Op::Place) {
            g.present[a.at] = a.kind;
            ++report.places;
        } else {
            auto it = g.present.find(a.at);
            if (it == g.present.end() || it->second != CellKind::FillerCell)
                throw std::logic_error("schedule removes a non-present or non-filler cell");
            g.present.erase(it);
            ++report.removes;
            // A removal at z always prepares slice z+1 (the final pass
            // prepares the virtual slice Z), so slices 0..z are "below".
            int below = a.at.z + 1;
            Vec3 orphan;
            if (!g.shape_connected_to_base(below, &orphan))
                report.violations.push_back({static_cast<int>(i), a.at, orphan});
        }
    }
    return report;
}

Encoding parse_encoding(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    int lineno = 0;
    std::vector<int> linenos;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comment
        size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        std::istringstream ss(line);
        std::string tok, joined;
        while (ss >> tok) {
            if (!joined.empty()) joined += " ";
            joined += tok;
        }
        if (joined.empty()) continue;
        lines.push_back(joined);
        linenos.push_back(lineno);
    }
    if (lines.size() < 2) throw std::runtime_error("encoding file too short");
    Encoding e;
    {
        std::istringstream ss(lines[0]);
        if (!(ss >> e.X >> e.Y >> e.Z))
            throw std::runtime_error("line " + std::to_string(linenos[0]) + ": expected `X Y Z`");
    }
    e.dir_bits = lines[1];
    if (lines.size() != static_cast<size_t>(e.Z) + 2)
        throw std::runtime_error("expected " + std::to_string(e.Z) + " occupancy rows, found " +
                                 std::to_string(lines.size() - 2));
    for (int z = 0; z < e.Z; ++z) {
        const std::string& row = lines[static_cast<size_t>(z) + 2];
        if (row.size() != static_cast<size_t>(e.X) * static_cast<size_t>(e.Y))
            throw std::runtime_error("line " + std::to_string(linenos[static_cast<size_t>(z) + 2]) +
                                     ": occupancy row " + std::to_string(z) + " has length " +
                                     std::to_string(row.size()) + ", expected " +
                                     std::to_string(e.X * e.Y));
        e.occ_rows.push_back(row);
    }
    validate_encoding(e);
    return e;
}

Encoding parse_encoding_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open encoding file " + path);
    return parse_encoding(in);
}

std::string encoding_to_text(const Encoding& e) {
    std::ostringstream out;
    out << e.X << " " << e.Y << " " << e.Z << "\n" << e.dir_bits << "\n";
    for (const auto& r : e.occ_rows) out << r << "\n";
    return out.str();
}

}  // namespace stamr
