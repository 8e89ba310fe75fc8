#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stamr/geom.hpp"

namespace stamr {

using VoxelSet = std::set<Vec3>;

// A finite, non-empty, 6-connected set of voxels. Equality of shapes is up to
// rotation and translation (no reflections; tiles are chiral), see congruent().
class Shape {
  public:
    // Throws std::invalid_argument when empty or disconnected.
    explicit Shape(VoxelSet voxels);

    static std::optional<Shape> try_make(VoxelSet voxels);

    const VoxelSet& voxels() const { return voxels_; }
    int size() const { return static_cast<int>(voxels_.size()); }
    bool contains(Vec3 p) const { return voxels_.count(p) > 0; }

    Shape translated(Vec3 t) const;
    Shape rotated(Rotation r) const;
    // Translated so the min bounding box corner is the origin.
    Shape normalized() const;

    friend bool operator==(const Shape& a, const Shape& b) { return a.voxels_ == b.voxels_; }

  private:
    VoxelSet voxels_;
};

struct BBox {
    Vec3 min, max;  // inclusive
    Vec3 dims() const { return {max.x - min.x + 1, max.y - min.y + 1, max.z - min.z + 1}; }
    bool contains(Vec3 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }
    std::int64_t volume() const {
        Vec3 d = dims();
        return static_cast<std::int64_t>(d.x) * d.y * d.z;
    }
};

bool is_connected(const VoxelSet& voxels);  // throws on empty
BBox min_bbox(const Shape& s);

// Equivalence up to the 24 rotations plus translation.
bool congruent(const Shape& a, const Shape& b);

// Classes of occupied-neighbor patterns up to rotation (9 in total:
// 1 with one point, 2 with two, 2 with three, 2 with four, 1 with five,
// 1 with six).
enum class NeighborhoodClass {
    One,
    TwoCollinear,
    TwoBent,
    ThreeCollinearPlus,
    ThreeCorner,
    FourPlanar,
    FourTripodPlus,
    Five,
    Six,
};

const char* neighborhood_class_name(NeighborhoodClass c);

// Throws std::invalid_argument when p is not in s or s is a singleton.
NeighborhoodClass neighborhood_class(const Shape& s, Vec3 p);

// Empty regions with no path to infinity.
std::vector<VoxelSet> enclosed_cavities(const Shape& s);

struct BentCavity {
    VoxelSet line_visible;  // reachable by an axis ray of empty cells from the bbox boundary
    VoxelSet hidden;
    VoxelSet cells() const;
};

// Empty components inside the min bounding box (excluding enclosed cavities)
// that contain both line-visible and hidden cells. Visibility is along axis
// rays: a cell is visible when, in some axis direction, every cell from it to
// the bounding box boundary is empty.
std::vector<BentCavity> bent_cavities(const Shape& s);

// Seeded randomized growth inside a box; reproducible per seed.
// Throws std::invalid_argument when target_size is not in [1, volume].
Shape random_connected_shape(std::uint64_t seed, Vec3 box_dims, int target_size);

// One `x y z` triple per line, '#' comments, duplicates rejected.
Shape parse_shape(std::istream& in);
Shape parse_shape_file(const std::string& path);
std::string serialize_shape(const Shape& s);

// Layer-by-layer ASCII slices ('#' voxel, '.' empty), z ascending.
std::string dump_voxels(const Shape& s);

}  // namespace stamr
