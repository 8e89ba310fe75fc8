#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stamr/geom.hpp"

namespace stamr {

// A glue is on, latent, or off. The only valid transitions are
// on -> off and latent -> on/off; everything else is a no-op.
enum class GlueState : std::uint8_t { On = 0, Latent = 1, Off = 2 };

enum class GlueAction : std::uint8_t { On = 0, Off = 1 };

const char* glue_state_name(GlueState s);
const char* glue_action_name(GlueAction a);

// l <-> l*. Labels match [A-Za-z0-9_]+ optionally suffixed with '*'.
std::string complement_label(const std::string& label);
bool labels_complementary(const std::string& a, const std::string& b);
// Label with any trailing '*' stripped; l and l* share a family (and a strength).
std::string label_family(const std::string& label);
bool valid_label(const std::string& label);

bool transition_legal(GlueState from, GlueAction to);

// One glue slot on a tile face. A face may carry several glues (distinct
// labels); the pair (face, label) identifies a glue within a tile type.
struct GlueSpec {
    std::string label;
    int strength = 1;
    GlueState initial_state = GlueState::On;
};

// Fires when the source glue forms a bond; targets a glue on the same tile.
struct Signal {
    Face src_face = Face::PX;
    std::string src_label;
    Face tgt_face = Face::PX;
    std::string tgt_label;
    GlueAction action = GlueAction::On;
};

struct TileType {
    std::string name;
    std::vector<GlueSpec> faces[kNumFaces];
    std::vector<Signal> signals;

    // Flat glue index: faces in order PX..NZ, glues in declaration order.
    int glue_count() const;
    int glue_index(Face f, const std::string& label) const;  // -1 when absent
    const GlueSpec& glue_at(int flat_index, Face* face_out = nullptr) const;

    void add_glue(Face f, const std::string& label, int strength, GlueState st);
    void add_signal(Face sf, const std::string& sl, Face tf, const std::string& tl, GlueAction a);
};

// Checks structural validity: labels well formed, no duplicate label on one
// face, signals reference existing glues. Throws std::runtime_error.
void validate_tile_type(const TileType& t);

class Tileset {
  public:
    int add(TileType t);  // validates, checks label-family strength consistency
    int index_of(const std::string& name) const;  // -1 when absent
    const TileType& operator[](int i) const { return types_.at(static_cast<size_t>(i)); }
    int size() const { return static_cast<int>(types_.size()); }

    // Strength registered for a label family, or -1.
    int family_strength(const std::string& label) const;

    const std::vector<TileType>& types() const { return types_; }

  private:
    std::vector<TileType> types_;
    std::map<std::string, int> by_name_;
    std::map<std::string, int> family_strength_;
};

// Text format, one directive per line, '#' comments:
//   tile <name>
//     face <+x|-x|+y|-y|+z|-z> glue <label> strength <int> state <on|latent|off>
//     signal <face> <label> -> <face> <label> <on|off>
//   end
Tileset parse_tileset(std::istream& in);
Tileset parse_tileset_file(const std::string& path);
std::string serialize_tileset(const Tileset& ts);

// A live tile: per-glue states plus pending/completed signal bookkeeping.
// Signals are tracked by index into the type's signal list; a completed
// signal never re-enters the pending set.
struct TileInstance {
    int type = -1;
    std::vector<GlueState> glue_states;   // parallel to flat glue index
    std::set<int> pending;                // signal indices
    std::set<int> completed;
    std::uint64_t instance_id = 0;        // debug identity, not part of equality

    static TileInstance of_type(const Tileset& ts, int type_index);
};

std::uint64_t next_instance_id();

}  // namespace stamr
