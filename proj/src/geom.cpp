#include "stamr/geom.hpp"

#include <stdexcept>
#include <vector>

namespace stamr {

const char* face_name(Face f) {
    switch (f) {
        case Face::PX: return "+x";
        case Face::NX: return "-x";
        case Face::PY: return "+y";
        case Face::NY: return "-y";
        case Face::PZ: return "+z";
        case Face::NZ: return "-z";
    }
    return "?";
}

bool parse_face(const std::string& s, Face& out) {
    for (Face f : all_faces()) {
        if (s == face_name(f)) {
            out = f;
            return true;
        }
    }
    return false;
}

namespace {

struct RotEntry {
    Face fx, fy, fz;      // images of +x,+y,+z
    std::array<Face, 6> face_map;
};

Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

Face face_of(Vec3 v) {
    for (Face f : all_faces())
        if (unit(f) == v) return f;
    throw std::logic_error("face_of: not a unit axis vector");
}

struct RotTables {
    std::vector<RotEntry> entries;
    int compose[24][24];
    int inverse[24];

    RotTables() {
        for (Face fx : all_faces()) {
            for (Face fy : all_faces()) {
                Vec3 vx = unit(fx), vy = unit(fy);
                if (vx.x * vy.x + vx.y * vy.y + vx.z * vy.z != 0) continue;  // not orthogonal
                Vec3 vz = cross(vx, vy);  // det +1 by construction
                RotEntry e;
                e.fx = fx;
                e.fy = fy;
                e.fz = face_of(vz);
                for (Face f : all_faces()) {
                    Vec3 u = unit(f);
                    Vec3 img = {vx.x * u.x + vy.x * u.y + vz.x * u.z,
                                vx.y * u.x + vy.y * u.y + vz.y * u.z,
                                vx.z * u.x + vy.z * u.y + vz.z * u.z};
                    e.face_map[static_cast<int>(f)] = face_of(img);
                }
                entries.push_back(e);
            }
        }
        if (entries.size() != 24) throw std::logic_error("rotation enumeration broken");
        for (int a = 0; a < 24; ++a) {
            for (int b = 0; b < 24; ++b) {
                Face ix = entries[a].face_map[static_cast<int>(entries[b].fx)];
                Face iy = entries[a].face_map[static_cast<int>(entries[b].fy)];
                compose[a][b] = find(ix, iy);
            }
        }
        for (int a = 0; a < 24; ++a) {
            for (int b = 0; b < 24; ++b) {
                if (compose[a][b] == 0) {
                    inverse[a] = b;
                    break;
                }
            }
        }
    }

    int find(Face fx, Face fy) const {
        for (int i = 0; i < static_cast<int>(entries.size()); ++i)
            if (entries[i].fx == fx && entries[i].fy == fy) return i;
        throw std::logic_error("rotation lookup failed");
    }
};

const RotTables& tables() {
    static const RotTables t;
    return t;
}

}  // namespace

Rotation Rotation::from_id(int id) {
    if (id < 0 || id >= 24) throw std::out_of_range("rotation id must be in 0..23");
    return Rotation(id);
}

Rotation Rotation::about_z() { return Rotation(tables().find(Face::PY, Face::NX)); }
Rotation Rotation::about_x() { return Rotation(tables().find(Face::PX, Face::PZ)); }
Rotation Rotation::about_y() { return Rotation(tables().find(Face::NZ, Face::PY)); }

Face Rotation::rotate(Face f) const { return tables().entries[id_].face_map[static_cast<int>(f)]; }

Vec3 Rotation::rotate_vec(Vec3 v) const {
    const RotEntry& e = tables().entries[id_];
    Vec3 vx = unit(e.fx), vy = unit(e.fy), vz = unit(e.fz);
    return {vx.x * v.x + vy.x * v.y + vz.x * v.z,
            vx.y * v.x + vy.y * v.y + vz.y * v.z,
            vx.z * v.x + vy.z * v.y + vz.z * v.z};
}

Rotation compose(Rotation a, Rotation b) { return Rotation(tables().compose[a.id_][b.id_]); }

Rotation Rotation::inverse() const { return Rotation(tables().inverse[id_]); }

Face Rotation::image_x() const { return tables().entries[id_].fx; }
Face Rotation::image_y() const { return tables().entries[id_].fy; }
Face Rotation::image_z() const { return tables().entries[id_].fz; }

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace stamr
