#include "stamr/tile.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stamr {

const char* glue_state_name(GlueState s) {
    switch (s) {
        case GlueState::On: return "on";
        case GlueState::Latent: return "latent";
        case GlueState::Off: return "off";
    }
    return "?";
}

const char* glue_action_name(GlueAction a) { return a == GlueAction::On ? "on" : "off"; }

std::string complement_label(const std::string& label) {
    if (label.empty()) throw std::invalid_argument("empty glue label");
    if (label.back() == '*') return label.substr(0, label.size() - 1);
    return label + "*";
}

bool labels_complementary(const std::string& a, const std::string& b) {
    return complement_label(a) == b;
}

std::string label_family(const std::string& label) {
    if (!label.empty() && label.back() == '*') return label.substr(0, label.size() - 1);
    return label;
}

bool valid_label(const std::string& label) {
    if (label.empty()) return false;
    size_t n = label.size();
    if (label.back() == '*') {
        if (n == 1) return false;
        --n;
    }
    for (size_t i = 0; i < n; ++i) {
        char c = label[i];
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

bool transition_legal(GlueState from, GlueAction to) {
    if (from == GlueState::On && to == GlueAction::Off) return true;
    if (from == GlueState::Latent) return true;  // latent -> on or off
    return false;
}

int TileType::glue_count() const {
    int n = 0;
    for (const auto& fs : faces) n += static_cast<int>(fs.size());
    return n;
}

int TileType::glue_index(Face f, const std::string& label) const {
    int base = 0;
    for (int fi = 0; fi < kNumFaces; ++fi) {
        if (fi == static_cast<int>(f)) {
            for (size_t k = 0; k < faces[fi].size(); ++k)
                if (faces[fi][k].label == label) return base + static_cast<int>(k);
            return -1;
        }
        base += static_cast<int>(faces[fi].size());
    }
    return -1;
}

const GlueSpec& TileType::glue_at(int flat_index, Face* face_out) const {
    int base = 0;
    for (int fi = 0; fi < kNumFaces; ++fi) {
        int n = static_cast<int>(faces[fi].size());
        if (flat_index < base + n) {
            if (face_out) *face_out = static_cast<Face>(fi);
            return faces[fi][static_cast<size_t>(flat_index - base)];
        }
        base += n;
    }
    throw std::out_of_range("glue flat index");
}

void TileType::add_glue(Face f, const std::string& label, int strength, GlueState st) {
    faces[static_cast<int>(f)].push_back(GlueSpec{label, strength, st});
}

void TileType::add_signal(Face sf, const std::string& sl, Face tf, const std::string& tl,
                          GlueAction a) {
    signals.push_back(Signal{sf, sl, tf, tl, a});
}

void validate_tile_type(const TileType& t) {
    if (t.name.empty()) throw std::runtime_error("tile type with empty name");
    for (int fi = 0; fi < kNumFaces; ++fi) {
        std::set<std::string> seen;
        for (const auto& g : t.faces[fi]) {
            if (!valid_label(g.label))
                throw std::runtime_error("tile " + t.name + ": bad glue label '" + g.label + "'");
            if (g.strength <= 0)
                throw std::runtime_error("tile " + t.name + ": glue " + g.label +
                                         " has non-positive strength");
            if (!seen.insert(g.label).second)
                throw std::runtime_error("tile " + t.name + ": duplicate glue " + g.label +
                                         " on face " + face_name(static_cast<Face>(fi)));
        }
    }
    for (const auto& s : t.signals) {
        if (t.glue_index(s.src_face, s.src_label) < 0)
            throw std::runtime_error("tile " + t.name + ": signal source " + s.src_label + "@" +
                                     face_name(s.src_face) + " not a glue of this tile");
        if (t.glue_index(s.tgt_face, s.tgt_label) < 0)
            throw std::runtime_error("tile " + t.name + ": signal target " + s.tgt_label + "@" +
                                     face_name(s.tgt_face) + " not a glue of this tile");
    }
}

int Tileset::add(TileType t) {
    validate_tile_type(t);
    if (by_name_.count(t.name)) throw std::runtime_error("duplicate tile type " + t.name);
    // All glues sharing a label family must agree on strength across the set.
    std::map<std::string, int> local;
    for (int fi = 0; fi < kNumFaces; ++fi)
        for (const auto& g : t.faces[fi]) {
            std::string fam = label_family(g.label);
            auto it = family_strength_.find(fam);
            if (it != family_strength_.end() && it->second != g.strength)
                throw std::runtime_error("glue family " + fam + " declared with strength " +
                                         std::to_string(g.strength) + " but already has strength " +
                                         std::to_string(it->second));
            auto lt = local.find(fam);
            if (lt != local.end() && lt->second != g.strength)
                throw std::runtime_error("glue family " + fam +
                                         " declared with conflicting strengths on tile " + t.name);
            local[fam] = g.strength;
        }
    for (const auto& [fam, str] : local) family_strength_[fam] = str;
    int idx = static_cast<int>(types_.size());
    by_name_[t.name] = idx;
    types_.push_back(std::move(t));
    return idx;
}

int Tileset::index_of(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
}

int Tileset::family_strength(const std::string& label) const {
    auto it = family_strength_.find(label_family(label));
    return it == family_strength_.end() ? -1 : it->second;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        if (!tok.empty() && tok[0] == '#') break;
        out.push_back(tok);
    }
    return out;
}

[[noreturn]] void parse_fail(int lineno, const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
}

GlueState parse_state(const std::string& s, int lineno) {
    if (s == "on") return GlueState::On;
    if (s == "latent") return GlueState::Latent;
    if (s == "off") return GlueState::Off;
    parse_fail(lineno, "unknown glue state '" + s + "'");
}

}  // namespace

Tileset parse_tileset(std::istream& in) {
    Tileset ts;
    std::string line;
    int lineno = 0;
    bool in_tile = false;
    TileType cur;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokenize(line);
        if (tok.empty()) continue;
        if (tok[0] == "tile") {
            if (in_tile) parse_fail(lineno, "nested tile block");
            if (tok.size() != 2) parse_fail(lineno, "expected: tile <name>");
            cur = TileType{};
            cur.name = tok[1];
            in_tile = true;
        } else if (tok[0] == "face") {
            if (!in_tile) parse_fail(lineno, "face outside tile block");
            if (tok.size() != 8 || tok[2] != "glue" || tok[4] != "strength" || tok[6] != "state")
                parse_fail(lineno, "expected: face <f> glue <label> strength <int> state <s>");
            Face f;
            if (!parse_face(tok[1], f)) parse_fail(lineno, "bad face '" + tok[1] + "'");
            if (!valid_label(tok[3])) parse_fail(lineno, "bad glue label '" + tok[3] + "'");
            int str = 0;
            try {
                str = std::stoi(tok[5]);
            } catch (...) {
                parse_fail(lineno, "bad strength '" + tok[5] + "'");
            }
            cur.add_glue(f, tok[3], str, parse_state(tok[7], lineno));
        } else if (tok[0] == "signal") {
            if (!in_tile) parse_fail(lineno, "signal outside tile block");
            if (tok.size() != 7 || tok[3] != "->")
                parse_fail(lineno, "expected: signal <face> <label> -> <face> <label> <on|off>");
            Face sf, tf;
            if (!parse_face(tok[1], sf)) parse_fail(lineno, "bad face '" + tok[1] + "'");
            if (!parse_face(tok[4], tf)) parse_fail(lineno, "bad face '" + tok[4] + "'");
            GlueAction a;
            if (tok[6] == "on")
                a = GlueAction::On;
            else if (tok[6] == "off")
                a = GlueAction::Off;
            else
                parse_fail(lineno, "bad signal action '" + tok[6] + "'");
            cur.add_signal(sf, tok[2], tf, tok[5], a);
        } else if (tok[0] == "end") {
            if (!in_tile) parse_fail(lineno, "end outside tile block");
            try {
                ts.add(std::move(cur));
            } catch (const std::exception& e) {
                parse_fail(lineno, e.what());
            }
            in_tile = false;
        } else {
            parse_fail(lineno, "unknown directive '" + tok[0] + "'");
        }
    }
    if (in_tile) throw std::runtime_error("unterminated tile block (missing 'end')");
    return ts;
}

Tileset parse_tileset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tileset file " + path);
    return parse_tileset(in);
}

std::string serialize_tileset(const Tileset& ts) {
    std::ostringstream out;
    for (const auto& t : ts.types()) {
        out << "tile " << t.name << "\n";
        for (int fi = 0; fi < kNumFaces; ++fi)
            for (const auto& g : t.faces[fi])
                out << "  face " << face_name(static_cast<Face>(fi)) << " glue " << g.label
                    << " strength " << g.strength << " state " << glue_state_name(g.initial_state)
                    << "\n";
        for (const auto& s : t.signals)
            out << "  signal " << face_name(s.src_face) << " " << s.src_label << " -> "
                << face_name(s.tgt_face) << " " << s.tgt_label << " "
                << glue_action_name(s.action) << "\n";
        out << "end\n";
    }
    return out.str();
}

TileInstance TileInstance::of_type(const Tileset& ts, int type_index) {
    TileInstance inst;
    inst.type = type_index;
    const TileType& t = ts[type_index];
    inst.glue_states.reserve(static_cast<size_t>(t.glue_count()));
    for (int fi = 0; fi < kNumFaces; ++fi)
        for (const auto& g : t.faces[fi]) inst.glue_states.push_back(g.initial_state);
    inst.instance_id = next_instance_id();
    return inst;
}

std::uint64_t next_instance_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace stamr
