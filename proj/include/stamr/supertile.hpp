#pragma once

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stamr/tile.hpp"

namespace stamr {

enum class RotationMode { StamR, Stam };

const char* rotation_mode_name(RotationMode m);
bool parse_rotation_mode(const std::string& s, RotationMode& out);

struct PlacedTile {
    TileInstance instance;
    Rotation rotation;
};

// A bond between complementary on-glues on abutting faces, keyed from the
// endpoint with the smaller lattice point: the glue `label` sits on tile `at`
// with its face pointing along `dir` (one of +x,+y,+z); the partner glue is
// complement(label) at `at + dir`.
struct Bond {
    Vec3 at;
    Face dir = Face::PX;
    std::string label;

    friend bool operator<(const Bond& a, const Bond& b) {
        if (a.at != b.at) return a.at < b.at;
        if (a.dir != b.dir) return static_cast<int>(a.dir) < static_cast<int>(b.dir);
        return a.label < b.label;
    }
    friend bool operator==(const Bond& a, const Bond& b) {
        return a.at == b.at && a.dir == b.dir && a.label == b.label;
    }
};

// A glue slot of a placed tile, addressed in world coordinates.
struct WorldGlue {
    Vec3 at;
    Face world_face = Face::PX;
    int flat_index = -1;   // into the instance's glue_states
    const GlueSpec* spec = nullptr;
};

// A connected placement of rotated tile instances with a bond set. The unit
// of combination, splitting, and canonicalization. Positions are significant
// only up to the motions of the rotation mode; use canonical_form for
// identity.
class Supertile {
  public:
    explicit Supertile(const Tileset* ts) : tileset_(ts) {}

    const Tileset& tileset() const { return *tileset_; }

    void place(Vec3 p, PlacedTile t);
    bool occupied(Vec3 p) const { return placements_.count(p) > 0; }
    int size() const { return static_cast<int>(placements_.size()); }

    const std::map<Vec3, PlacedTile>& placements() const { return placements_; }
    std::map<Vec3, PlacedTile>& placements() { return placements_; }
    const std::set<Bond>& bonds() const { return bonds_; }

    void add_bond(const Bond& b) { bonds_.insert(b); }
    void remove_bond(const Bond& b) { bonds_.erase(b); }
    bool has_bond(const Bond& b) const { return bonds_.count(b) > 0; }

    // All glues of the tile at p, mapped to world faces.
    std::vector<WorldGlue> world_glues(Vec3 p) const;
    // The glue with the given label on the given world face of the tile at p.
    std::optional<WorldGlue> find_world_glue(Vec3 p, Face world_face,
                                             const std::string& label) const;
    GlueState glue_state(const WorldGlue& g) const;
    void set_glue_state(const WorldGlue& g, GlueState st);

    // Unbonded complementary on/on pairs on abutting faces within this
    // supertile (step kind 2 candidates).
    std::vector<Bond> formable_internal_bonds() const;

    // Sum of bond strengths between the tiles at a and b (adjacent points).
    int bond_strength_between(Vec3 a, Vec3 b) const;

    bool bond_graph_connected() const;

    // Sanity checks used by tests and debug builds: bonds reference existing
    // complementary on-glues of equal strength, pending/completed disjoint,
    // connectivity. Throws std::logic_error on violation.
    void check_invariants() const;

    Supertile translated(Vec3 t) const;
    Supertile rotated(Rotation r) const;

  private:
    const Tileset* tileset_;
    std::map<Vec3, PlacedTile> placements_;
    std::set<Bond> bonds_;
};

// ---- formable bonds between two supertiles ----

struct BondCandidate {
    Bond bond;       // in the merged frame (a fixed, b placed at r,t)
    int strength = 0;
    bool from_a = false;  // true when the smaller endpoint belongs to a
};

struct FormableResult {
    std::vector<BondCandidate> candidates;
    int total_strength = 0;
};

// Bond candidates between a and b.rotated(r).translated(t); nullopt when the
// placements overlap (a rejected placement, not a fault).
std::optional<FormableResult> formable_bonds(const Supertile& a, const Supertile& b, Rotation r,
                                             Vec3 t);

// ---- stability ----

constexpr int kInfiniteCut = std::numeric_limits<int>::max();

// Global minimum cut weight of the bond graph; singletons have no cut and
// report kInfiniteCut. A disconnected bond graph reports 0.
int min_cut_weight(const Supertile& s);

inline bool is_tau_stable(const Supertile& s, int tau) { return min_cut_weight(s) >= tau; }

// One side of a minimum cut, both sides connected. Only valid when the
// supertile has >= 2 tiles. Deterministic for a given supertile.
std::vector<Vec3> min_cut_side(const Supertile& s);

// All bipartitions (A, B) with both sides connected in the bond graph and cut
// weight < tau; A is the side not containing the smallest placed point, so
// each bipartition appears once. Exponential; intended for small supertiles
// (exhaustive exploration and oracles).
std::vector<std::pair<std::vector<Vec3>, int>> connected_bipartitions_below(const Supertile& s,
                                                                            int tau);

// Bond key after applying rotation r then translation t to the whole
// placement (the key point and orientation are re-normalized).
Bond transform_bond(const Bond& b, Rotation r, Vec3 t);

// Split s into (side, rest). The bond set is partitioned; cut bonds are
// dropped. Instances keep their pending/completed sets.
std::pair<Supertile, Supertile> split_along(const Supertile& s, const std::vector<Vec3>& side);

// ---- canonical form ----

// Deterministic serialization minimized over the motions of the mode:
// translations and, in StamR mode, the 24 rotations. Tiles serialize in the
// world frame (face -> glue/state map, pending and completed signals as
// world-frame descriptors), so instances that differ only by a
// glue-layout-preserving spin compare equal.
std::string canonical_form(const Supertile& s, RotationMode mode);

// The supertile moved into the pose whose serialization is canonical_form;
// equivalent supertiles map to identical placements. Optionally returns the
// form itself (saves recomputing it).
Supertile canonical_pose(const Supertile& s, RotationMode mode, std::string* form_out = nullptr);

std::uint64_t canonical_hash(const Supertile& s, RotationMode mode);

// Serialization of the current placement without motion minimization
// (used for combine-action dedup keys; extra lines may be appended).
std::string frame_serialization(const Supertile& s);

}  // namespace stamr
