#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stamr/shape.hpp"

namespace stamr {

// One of the 24 reading frames of a shape: the rotation that brings the
// chosen bounding-box corner to the origin with x the row direction, y the
// row-stacking direction within a slice, and z the slice direction.
struct Frame {
    Rotation rotation;
};

std::vector<Frame> all_frames();  // the 24 frames

// Bit conventions (fixed for file compatibility): occupancy 1 = shape voxel,
// 0 = empty/filler; direction 0 = row grows +x, 1 = row grows -x. The
// direction row consists of Y constant blocks of length X; block j has value
// j mod 2 (row 0 grows '+').
struct Encoding {
    int X = 0, Y = 0, Z = 0;
    std::string dir_bits;               // length X*Y
    std::vector<std::string> occ_rows;  // Z rows, each length X*Y

    std::string serialize() const;  // "X Y Z|dir|occ0|occ1|..."
    friend bool operator==(const Encoding& a, const Encoding& b) {
        return a.X == b.X && a.Y == b.Y && a.Z == b.Z && a.dir_bits == b.dir_bits &&
               a.occ_rows == b.occ_rows;
    }
    friend bool operator<(const Encoding& a, const Encoding& b) {
        return a.serialize() < b.serialize();
    }
};

// Serpentine serialization index of cell (x, y) in an X-wide slice.
int zigzag_index(int x, int y, int X);
// Inverse: cell (x, y) of serial index i.
void zigzag_cell(int i, int X, int& x, int& y);

Encoding encode_frame(const Shape& s, const Frame& f);

// The encoding function: the deduplicated encodings over all 24 frames.
// Symmetric shapes produce fewer than 24.
std::vector<Encoding> enumerate_encodings(const Shape& s);

// Lexicographic minimum of the serializations (deterministic tie-break).
Encoding canonical_encoding(const Shape& s);

// The decoding function. Throws std::runtime_error on malformed direction
// rows, inconsistent row lengths, or a disconnected/empty result.
Shape decode(const Encoding& e);

// Leading run of 0s; validates the full alternating-block pattern.
// Throws std::runtime_error when the row does not start with 0 or does not
// consist of alternating constant blocks.
int infer_width(const std::string& dir_bits);

// Structural validation of an encoding (dims, row lengths, dir pattern).
void validate_encoding(const Encoding& e);

// ---- decode schedule (slice-by-slice placement and filler removal) ----

enum class CellKind { ShapeCell, FillerCell };

struct ScheduleAction {
    enum class Op { Place, Remove } op;
    Vec3 at;
    CellKind kind = CellKind::ShapeCell;  // Place only
};

// For z = 0..Z-1, visit cells in serialized order; before a placement at
// (x,y,z) with z>0, a filler at (x,y,z-1) is removed first; after the last
// slice, a final zig-zag pass removes the fillers remaining in slice Z-1.
std::vector<ScheduleAction> decode_schedule(const Encoding& e);

struct ConnectivityViolation {
    int action_index = 0;  // index into the schedule
    Vec3 removed;          // the removal that disconnected something
    Vec3 orphaned;         // a shape voxel no longer connected to the base
};

struct ScheduleReport {
    std::vector<ConnectivityViolation> violations;
    int places = 0, removes = 0;
    bool ok() const { return violations.empty(); }
};

// Simulates the schedule over the present-voxel graph plus a virtual BASE
// node adjacent to every present voxel with z == 0 (the base) and every
// present voxel with y == Y-1 (the backing/ceiling). After every removal,
// every shape voxel in slices strictly below the slice under construction
// must remain connected to BASE.
ScheduleReport check_schedule_connectivity(const Encoding& e);

// ---- text round trip (.enc files) ----
// Line 1: `X Y Z`; line 2: dir bits; lines 3..Z+2: occupancy rows; '#' comments.
Encoding parse_encoding(std::istream& in);
Encoding parse_encoding_file(const std::string& path);
std::string encoding_to_text(const Encoding& e);

}  // namespace stamr
