#include "stamr/shape.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stamr {

Shape::Shape(VoxelSet voxels) : voxels_(std::move(voxels)) {
    if (voxels_.empty()) throw std::invalid_argument("shape must be non-empty");
    if (!is_connected(voxels_)) throw std::invalid_argument("shape must be 6-connected");
}

std::optional<Shape> Shape::try_make(VoxelSet voxels) {
    if (voxels.empty() || !is_connected(voxels)) return std::nullopt;
    return Shape(std::move(voxels));
}

Shape Shape::translated(Vec3 t) const {
    VoxelSet out;
    for (Vec3 v : voxels_) out.insert(v + t);
    return Shape(std::move(out));
}

Shape Shape::rotated(Rotation r) const {
    VoxelSet out;
    for (Vec3 v : voxels_) out.insert(r.rotate_vec(v));
    return Shape(std::move(out));
}

Shape Shape::normalized() const {
    BBox b = min_bbox(*this);
    return translated(-b.min);
}

bool is_connected(const VoxelSet& voxels) {
    if (voxels.empty()) throw std::invalid_argument("is_connected: empty voxel set");
    std::set<Vec3> seen;
    std::queue<Vec3> q;
    q.push(*voxels.begin());
    seen.insert(*voxels.begin());
    while (!q.empty()) {
        Vec3 v = q.front();
        q.pop();
        for (Face f : all_faces()) {
            Vec3 u = v + unit(f);
            if (voxels.count(u) && !seen.count(u)) {
                seen.insert(u);
                q.push(u);
            }
        }
    }
    return seen.size() == voxels.size();
}

BBox min_bbox(const Shape& s) {
    Vec3 lo = *s.voxels().begin(), hi = lo;
    for (Vec3 v : s.voxels()) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        lo.z = std::min(lo.z, v.z);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
        hi.z = std::max(hi.z, v.z);
    }
    return {lo, hi};
}

bool congruent(const Shape& a, const Shape& b) {
    if (a.size() != b.size()) return false;
    Shape nb = b.normalized();
    Vec3 db = min_bbox(nb).dims();
    for (int ri = 0; ri < Rotation::count(); ++ri) {
        Shape ra = a.rotated(Rotation::from_id(ri)).normalized();
        if (min_bbox(ra).dims() != db) continue;
        if (ra == nb) return true;
    }
    return false;
}

const char* neighborhood_class_name(NeighborhoodClass c) {
    switch (c) {
        case NeighborhoodClass::One: return "1";
        case NeighborhoodClass::TwoCollinear: return "2-collinear";
        case NeighborhoodClass::TwoBent: return "2-bent";
        case NeighborhoodClass::ThreeCollinearPlus: return "3-collinear+1";
        case NeighborhoodClass::ThreeCorner: return "3-corner";
        case NeighborhoodClass::FourPlanar: return "4-planar";
        case NeighborhoodClass::FourTripodPlus: return "4-tripod+1";
        case NeighborhoodClass::Five: return "5";
        case NeighborhoodClass::Six: return "6";
    }
    return "?";
}

NeighborhoodClass neighborhood_class(const Shape& s, Vec3 p) {
    if (!s.contains(p)) throw std::invalid_argument("neighborhood_class: point not in shape");
    if (s.size() < 2) throw std::invalid_argument("neighborhood_class: shape must have >= 2 voxels");
    std::set<Face> dirs;
    for (Face f : all_faces())
        if (s.contains(p + unit(f))) dirs.insert(f);
    int n = static_cast<int>(dirs.size());
    auto has_opposite_pair = [&] {
        for (Face f : dirs)
            if (dirs.count(opposite(f))) return true;
        return false;
    };
    switch (n) {
        case 1: return NeighborhoodClass::One;
        case 2: return has_opposite_pair() ? NeighborhoodClass::TwoCollinear : NeighborhoodClass::TwoBent;
        case 3: return has_opposite_pair() ? NeighborhoodClass::ThreeCollinearPlus : NeighborhoodClass::ThreeCorner;
        case 4: {
            // Complement has 2 directions: opposite pair -> planar, bent -> tripod+1.
            std::set<Face> rest;
            for (Face f : all_faces())
                if (!dirs.count(f)) rest.insert(f);
            Face f0 = *rest.begin();
            bool planar = rest.count(opposite(f0)) > 0;
            return planar ? NeighborhoodClass::FourPlanar : NeighborhoodClass::FourTripodPlus;
        }
        case 5: return NeighborhoodClass::Five;
        case 6: return NeighborhoodClass::Six;
        default: throw std::invalid_argument("neighborhood_class: isolated point in shape");
    }
}

namespace {

// Flood fill over the complement of s restricted to `box`, from `start`.
VoxelSet flood_empty(const Shape& s, const BBox& box, const std::vector<Vec3>& starts) {
    VoxelSet seen;
    std::queue<Vec3> q;
    for (Vec3 v : starts) {
        if (!box.contains(v) || s.contains(v) || seen.count(v)) continue;
        seen.insert(v);
        q.push(v);
    }
    while (!q.empty()) {
        Vec3 v = q.front();
        q.pop();
        for (Face f : all_faces()) {
            Vec3 u = v + unit(f);
            if (!box.contains(u) || s.contains(u) || seen.count(u)) continue;
            seen.insert(u);
            q.push(u);
        }
    }
    return seen;
}

std::vector<VoxelSet> components(const VoxelSet& cells) {
    std::vector<VoxelSet> out;
    VoxelSet left = cells;
    while (!left.empty()) {
        VoxelSet comp;
        std::queue<Vec3> q;
        Vec3 s0 = *left.begin();
        q.push(s0);
        comp.insert(s0);
        left.erase(s0);
        while (!q.empty()) {
            Vec3 v = q.front();
            q.pop();
            for (Face f : all_faces()) {
                Vec3 u = v + unit(f);
                if (left.count(u)) {
                    left.erase(u);
                    comp.insert(u);
                    q.push(u);
                }
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace

std::vector<VoxelSet> enclosed_cavities(const Shape& s) {
    BBox b = min_bbox(s);
    BBox ext{{b.min.x - 1, b.min.y - 1, b.min.z - 1}, {b.max.x + 1, b.max.y + 1, b.max.z + 1}};
    VoxelSet outside = flood_empty(s, ext, {ext.min});
    VoxelSet inside_unreached;
    for (int x = b.min.x; x <= b.max.x; ++x)
        for (int y = b.min.y; y <= b.max.y; ++y)
            for (int z = b.min.z; z <= b.max.z; ++z) {
                Vec3 v{x, y, z};
                if (!s.contains(v) && !outside.count(v)) inside_unreached.insert(v);
            }
    return components(inside_unreached);
}

VoxelSet BentCavity::cells() const {
    VoxelSet out = line_visible;
    out.insert(hidden.begin(), hidden.end());
    return out;
}

std::vector<BentCavity> bent_cavities(const Shape& s) {
    BBox b = min_bbox(s);
    // Empty cells inside the min bbox, grouped into components within the box.
    VoxelSet empties;
    for (int x = b.min.x; x <= b.max.x; ++x)
        for (int y = b.min.y; y <= b.max.y; ++y)
            for (int z = b.min.z; z <= b.max.z; ++z)
                if (!s.contains({x, y, z})) empties.insert({x, y, z});

    // Enclosed cells are classified by enclosed_cavities, never here.
    VoxelSet enclosed;
    for (const auto& cav : enclosed_cavities(s))
        enclosed.insert(cav.begin(), cav.end());

    auto visible = [&](Vec3 c) {
        for (Face f : all_faces()) {
            Vec3 step = unit(f);
            Vec3 v = c;
            bool clear = true;
            while (b.contains(v)) {
                if (s.contains(v)) {
                    clear = false;
                    break;
                }
                v = v + step;
            }
            if (clear) return true;
        }
        return false;
    };

    std::vector<BentCavity> out;
    for (const auto& comp : components(empties)) {
        bool is_enclosed = true;
        for (Vec3 v : comp)
            if (!enclosed.count(v)) {
                is_enclosed = false;
                break;
            }
        if (is_enclosed) continue;
        BentCavity bc;
        for (Vec3 v : comp) (visible(v) ? bc.line_visible : bc.hidden).insert(v);
        if (!bc.line_visible.empty() && !bc.hidden.empty()) out.push_back(std::move(bc));
    }
    return out;
}

Shape random_connected_shape(std::uint64_t seed, Vec3 box_dims, int target_size) {
    std::int64_t volume = static_cast<std::int64_t>(box_dims.x) * box_dims.y * box_dims.z;
    if (box_dims.x < 1 || box_dims.y < 1 || box_dims.z < 1)
        throw std::invalid_argument("random_connected_shape: bad box");
    if (target_size < 1 || target_size > volume)
        throw std::invalid_argument("random_connected_shape: impossible size");
    std::mt19937_64 rng(seed);
    BBox box{{0, 0, 0}, {box_dims.x - 1, box_dims.y - 1, box_dims.z - 1}};
    Vec3 start{static_cast<int>(rng() % static_cast<std::uint64_t>(box_dims.x)),
               static_cast<int>(rng() % static_cast<std::uint64_t>(box_dims.y)),
               static_cast<int>(rng() % static_cast<std::uint64_t>(box_dims.z))};
    VoxelSet cells{start};
    std::vector<Vec3> frontier;
    auto grow_frontier = [&](Vec3 v) {
        for (Face f : all_faces()) {
            Vec3 u = v + unit(f);
            if (box.contains(u) && !cells.count(u)) frontier.push_back(u);
        }
    };
    grow_frontier(start);
    while (static_cast<int>(cells.size()) < target_size) {
        // frontier may hold duplicates/now-filled cells; resample until fresh
        size_t k = rng() % frontier.size();
        Vec3 pick = frontier[k];
        frontier[k] = frontier.back();
        frontier.pop_back();
        if (cells.count(pick)) continue;
        cells.insert(pick);
        grow_frontier(pick);
    }
    return Shape(std::move(cells));
}

Shape parse_shape(std::istream& in) {
    VoxelSet cells;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (first[0] == '#') continue;
        int x, y, z;
        try {
            x = std::stoi(first);
        } catch (...) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": bad coordinate");
        }
        if (!(ss >> y >> z))
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected `x y z`");
        std::string trail;
        if (ss >> trail && trail[0] != '#')
            throw std::runtime_error("line " + std::to_string(lineno) + ": trailing tokens");
        if (!cells.insert({x, y, z}).second)
            throw std::runtime_error("line " + std::to_string(lineno) + ": duplicate voxel");
    }
    if (cells.empty()) throw std::runtime_error("shape file has no voxels");
    if (!is_connected(cells)) throw std::runtime_error("shape file is not 6-connected");
    return Shape(std::move(cells));
}

Shape parse_shape_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open shape file " + path);
    return parse_shape(in);
}

std::string serialize_shape(const Shape& s) {
    std::ostringstream out;
    for (Vec3 v : s.voxels()) out << v.x << " " << v.y << " " << v.z << "\n";
    return out.str();
}

std::string dump_voxels(const Shape& s) {
    BBox b = min_bbox(s);
    std::ostringstream out;
    for (int z = b.min.z; z <= b.max.z; ++z) {
        out << "z=" << z << "\n";
        for (int y = b.max.y; y >= b.min.y; --y) {
            for (int x = b.min.x; x <= b.max.x; ++x) out << (s.contains({x, y, z}) ? '#' : '.');
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace stamr
