#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

namespace stamr {

// Integer lattice point / offset.
struct Vec3 {
    int x = 0, y = 0, z = 0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    friend bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
    friend bool operator!=(Vec3 a, Vec3 b) { return !(a == b); }
    friend bool operator<(Vec3 a, Vec3 b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    }
};

inline std::ostream& operator<<(std::ostream& os, Vec3 v) {
    return os << "(" << v.x << "," << v.y << "," << v.z << ")";
}

// The 6 axis directions of a unit cube face. Opposite faces differ in the low bit.
enum class Face : std::uint8_t { PX = 0, NX = 1, PY = 2, NY = 3, PZ = 4, NZ = 5 };

constexpr int kNumFaces = 6;

constexpr Face opposite(Face f) { return static_cast<Face>(static_cast<int>(f) ^ 1); }

constexpr Vec3 unit(Face f) {
    switch (f) {
        case Face::PX: return {1, 0, 0};
        case Face::NX: return {-1, 0, 0};
        case Face::PY: return {0, 1, 0};
        case Face::NY: return {0, -1, 0};
        case Face::PZ: return {0, 0, 1};
        case Face::NZ: return {0, 0, -1};
    }
    return {0, 0, 0};
}

const char* face_name(Face f);
bool parse_face(const std::string& s, Face& out);

inline std::array<Face, 6> all_faces() {
    return {Face::PX, Face::NX, Face::PY, Face::NY, Face::PZ, Face::NZ};
}

// One of the 24 orientation-preserving rotations of the cube, stored as the
// images of the +x,+y,+z unit vectors (a signed axis permutation with det +1).
//
// Ids are assigned by enumerating image pairs (fx, fy) in face order
// PX,NX,PY,NY,PZ,NZ and taking fz = fx x fy; id 0 is the identity. The full
// table is printed by `stamr rotations` and listed in the README so scenario
// files are reproducible.
class Rotation {
  public:
    Rotation() = default;  // identity

    static Rotation identity() { return Rotation(0); }
    static Rotation from_id(int id);
    static Rotation about_z();  // 90 deg about +z, right-hand rule: +x -> +y
    static Rotation about_x();  // 90 deg about +x: +y -> +z
    static Rotation about_y();  // 90 deg about +y: +z -> +x
    static constexpr int count() { return 24; }

    int id() const { return id_; }

    Face rotate(Face f) const;
    Vec3 rotate_vec(Vec3 v) const;

    // compose(a, b) applies b first, then a.
    friend Rotation compose(Rotation a, Rotation b);
    Rotation inverse() const;

    friend bool operator==(Rotation a, Rotation b) { return a.id_ == b.id_; }
    friend bool operator!=(Rotation a, Rotation b) { return a.id_ != b.id_; }

    // Images of +x, +y, +z.
    Face image_x() const;
    Face image_y() const;
    Face image_z() const;

  private:
    explicit Rotation(int id) : id_(id) {}
    int id_ = 0;
};

std::uint64_t fnv1a64(const std::string& s);
std::string hex16(std::uint64_t h);

}  // namespace stamr
