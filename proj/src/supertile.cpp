#include "stamr/supertile.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace stamr {

const char* rotation_mode_name(RotationMode m) { return m == RotationMode::StamR ? "stam_r" : "stam"; }

bool parse_rotation_mode(const std::string& s, RotationMode& out) {
    if (s == "stam_r") {
        out = RotationMode::StamR;
        return true;
    }
    if (s == "stam") {
        out = RotationMode::Stam;
        return true;
    }
    return false;
}

void Supertile::place(Vec3 p, PlacedTile t) {
    if (placements_.count(p)) throw std::logic_error("placement collision");
    placements_.emplace(p, std::move(t));
}

std::vector<WorldGlue> Supertile::world_glues(Vec3 p) const {
    std::vector<WorldGlue> out;
    auto it = placements_.find(p);
    if (it == placements_.end()) return out;
    const PlacedTile& pt = it->second;
    const TileType& type = (*tileset_)[pt.instance.type];
    int flat = 0;
    for (int fi = 0; fi < kNumFaces; ++fi) {
        Face wf = pt.rotation.rotate(static_cast<Face>(fi));
        for (const auto& g : type.faces[fi]) {
            out.push_back(WorldGlue{p, wf, flat, &g});
            ++flat;
        }
    }
    return out;
}

std::optional<WorldGlue> Supertile::find_world_glue(Vec3 p, Face world_face,
                                                    const std::string& label) const {
    auto it = placements_.find(p);
    if (it == placements_.end()) return std::nullopt;
    const PlacedTile& pt = it->second;
    Face local = pt.rotation.inverse().rotate(world_face);
    const TileType& type = (*tileset_)[pt.instance.type];
    int flat = type.glue_index(local, label);
    if (flat < 0) return std::nullopt;
    Face dummy;
    return WorldGlue{p, world_face, flat, &type.glue_at(flat, &dummy)};
}

GlueState Supertile::glue_state(const WorldGlue& g) const {
    return placements_.at(g.at).instance.glue_states.at(static_cast<size_t>(g.flat_index));
}

void Supertile::set_glue_state(const WorldGlue& g, GlueState st) {
    placements_.at(g.at).instance.glue_states.at(static_cast<size_t>(g.flat_index)) = st;
}

std::vector<Bond> Supertile::formable_internal_bonds() const {
    std::vector<Bond> out;
    for (const auto& [p, pt] : placements_) {
        for (Face dir : {Face::PX, Face::PY, Face::PZ}) {
            Vec3 q = p + unit(dir);
            if (!placements_.count(q)) continue;
            for (const WorldGlue& ga : world_glues(p)) {
                if (ga.world_face != dir || glue_state(ga) != GlueState::On) continue;
                auto gb = find_world_glue(q, opposite(dir), complement_label(ga.spec->label));
                if (!gb || glue_state(*gb) != GlueState::On) continue;
                if (gb->spec->strength != ga.spec->strength) continue;
                Bond b{p, dir, ga.spec->label};
                if (!has_bond(b)) out.push_back(b);
            }
        }
    }
    return out;
}

int Supertile::bond_strength_between(Vec3 a, Vec3 b) const {
    if (b < a) std::swap(a, b);
    Vec3 d = b - a;
    Face dir;
    if (d == Vec3{1, 0, 0})
        dir = Face::PX;
    else if (d == Vec3{0, 1, 0})
        dir = Face::PY;
    else if (d == Vec3{0, 0, 1})
        dir = Face::PZ;
    else
        return 0;
    int total = 0;
    for (const auto& bond : bonds_) {
        if (bond.at == a && bond.dir == dir) {
            auto g = find_world_glue(a, dir, bond.label);
            total += g ? g->spec->strength : 0;
        }
    }
    return total;
}

namespace {

// Adjacency of the bond graph: indexed points plus summed edge weights.
struct BondGraph {
    std::vector<Vec3> points;
    std::map<Vec3, int> index;
    std::vector<std::vector<int>> w;  // dense, symmetric

    explicit BondGraph(const Supertile& s) {
        for (const auto& [p, pt] : s.placements()) {
            index[p] = static_cast<int>(points.size());
            points.push_back(p);
        }
        int n = static_cast<int>(points.size());
        w.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 0));
        for (const auto& b : s.bonds()) {
            auto g = s.find_world_glue(b.at, b.dir, b.label);
            int str = g ? g->spec->strength : 0;
            int i = index.at(b.at);
            int j = index.at(b.at + unit(b.dir));
            w[static_cast<size_t>(i)][static_cast<size_t>(j)] += str;
            w[static_cast<size_t>(j)][static_cast<size_t>(i)] += str;
        }
    }

    std::vector<int> component_of(int start) const {
        int n = static_cast<int>(points.size());
        std::vector<bool> seen(static_cast<size_t>(n), false);
        std::vector<int> out;
        std::queue<int> q;
        q.push(start);
        seen[static_cast<size_t>(start)] = true;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            out.push_back(v);
            for (int u = 0; u < n; ++u)
                if (w[static_cast<size_t>(v)][static_cast<size_t>(u)] > 0 && !seen[static_cast<size_t>(u)]) {
                    seen[static_cast<size_t>(u)] = true;
                    q.push(u);
                }
        }
        return out;
    }

    bool subset_connected(const std::vector<int>& verts) const {
        if (verts.empty()) return false;
        std::set<int> in(verts.begin(), verts.end());
        std::set<int> seen;
        std::queue<int> q;
        q.push(verts[0]);
        seen.insert(verts[0]);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int u : in)
                if (!seen.count(u) && w[static_cast<size_t>(v)][static_cast<size_t>(u)] > 0) {
                    seen.insert(u);
                    q.push(u);
                }
        }
        return seen.size() == in.size();
    }
};

// Stoer-Wagner global minimum cut; returns {weight, one side}. Assumes the
// graph is connected and has >= 2 vertices.
std::pair<int, std::vector<int>> stoer_wagner(const BondGraph& g) {
    int n = static_cast<int>(g.points.size());
    std::vector<std::vector<int>> w = g.w;
    // merged[i] = original vertices currently contracted into i
    std::vector<std::vector<int>> merged(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) merged[static_cast<size_t>(i)] = {i};
    std::vector<int> active(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) active[static_cast<size_t>(i)] = i;

    int best = std::numeric_limits<int>::max();
    std::vector<int> best_side;

    while (active.size() > 1) {
        std::vector<int> order;
        std::vector<int> weight(static_cast<size_t>(n), 0);
        std::vector<bool> added(static_cast<size_t>(n), false);
        for (size_t k = 0; k < active.size(); ++k) {
            int sel = -1;
            for (int v : active)
                if (!added[static_cast<size_t>(v)] && (sel == -1 || weight[static_cast<size_t>(v)] > weight[static_cast<size_t>(sel)]))
                    sel = v;
            added[static_cast<size_t>(sel)] = true;
            order.push_back(sel);
            for (int v : active)
                if (!added[static_cast<size_t>(v)]) weight[static_cast<size_t>(v)] += w[static_cast<size_t>(sel)][static_cast<size_t>(v)];
        }
        int t = order.back();
        int s = order[order.size() - 2];
        int cut = weight[static_cast<size_t>(t)];
        if (cut < best) {
            best = cut;
            best_side = merged[static_cast<size_t>(t)];
        }
        // contract t into s
        for (int v : active) {
            if (v == s || v == t) continue;
            w[static_cast<size_t>(s)][static_cast<size_t>(v)] += w[static_cast<size_t>(t)][static_cast<size_t>(v)];
            w[static_cast<size_t>(v)][static_cast<size_t>(s)] = w[static_cast<size_t>(s)][static_cast<size_t>(v)];
        }
        merged[static_cast<size_t>(s)].insert(merged[static_cast<size_t>(s)].end(), merged[static_cast<size_t>(t)].begin(),
                                              merged[static_cast<size_t>(t)].end());
        active.erase(std::find(active.begin(), active.end(), t));
    }
    return {best, best_side};
}

}  // namespace

bool Supertile::bond_graph_connected() const {
    if (placements_.size() <= 1) return true;
    BondGraph g(*this);
    return g.component_of(0).size() == placements_.size();
}

int min_cut_weight(const Supertile& s) {
    if (s.size() <= 1) return kInfiniteCut;
    BondGraph g(s);
    if (g.component_of(0).size() != g.points.size()) return 0;
    return stoer_wagner(g).first;
}

std::vector<Vec3> min_cut_side(const Supertile& s) {
    if (s.size() < 2) throw std::logic_error("min_cut_side on singleton");
    BondGraph g(s);
    auto comp = g.component_of(0);
    std::vector<int> side;
    if (comp.size() != g.points.size()) {
        side = comp;  // zero-weight separation first
    } else {
        side = stoer_wagner(g).second;
        // Refine to a side that is connected with a connected complement; a
        // component of a minimum cut side is itself a minimum cut side.
        if (!g.subset_connected(side)) {
            std::set<int> in(side.begin(), side.end());
            std::vector<int> comp_side;
            std::vector<bool> seen(g.points.size(), false);
            std::queue<int> q;
            q.push(side[0]);
            seen[static_cast<size_t>(side[0])] = true;
            while (!q.empty()) {
                int v = q.front();
                q.pop();
                comp_side.push_back(v);
                for (int u : in)
                    if (!seen[static_cast<size_t>(u)] && g.w[static_cast<size_t>(v)][static_cast<size_t>(u)] > 0) {
                        seen[static_cast<size_t>(u)] = true;
                        q.push(u);
                    }
            }
            side = comp_side;
        }
    }
    std::vector<Vec3> out;
    out.reserve(side.size());
    for (int i : side) out.push_back(g.points[static_cast<size_t>(i)]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<std::vector<Vec3>, int>> connected_bipartitions_below(const Supertile& s,
                                                                            int tau) {
    int n = s.size();
    if (n < 2) return {};
    if (n > 20) throw std::logic_error("connected_bipartitions_below: supertile too large");
    BondGraph g(s);
    std::vector<std::pair<std::vector<Vec3>, int>> out;
    // Vertex 0 stays on side B so each bipartition appears once.
    for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
        std::vector<int> a, b{0};
        for (int v = 1; v < n; ++v)
            ((mask >> (v - 1)) & 1u ? a : b).push_back(v);
        int cut = 0;
        for (int va : a)
            for (int vb : b) cut += g.w[static_cast<size_t>(va)][static_cast<size_t>(vb)];
        if (cut >= tau) continue;
        if (!g.subset_connected(a) || !g.subset_connected(b)) continue;
        std::vector<Vec3> pts;
        for (int v : a) pts.push_back(g.points[static_cast<size_t>(v)]);
        std::sort(pts.begin(), pts.end());
        out.emplace_back(std::move(pts), cut);
    }
    return out;
}

std::pair<Supertile, Supertile> split_along(const Supertile& s, const std::vector<Vec3>& side) {
    std::set<Vec3> in(side.begin(), side.end());
    Supertile a(&s.tileset()), b(&s.tileset());
    for (const auto& [p, pt] : s.placements()) (in.count(p) ? a : b).place(p, pt);
    for (const auto& bond : s.bonds()) {
        bool ia = in.count(bond.at) > 0;
        bool ib = in.count(bond.at + unit(bond.dir)) > 0;
        if (ia && ib)
            a.add_bond(bond);
        else if (!ia && !ib)
            b.add_bond(bond);
        // cut bonds are dropped
    }
    return {std::move(a), std::move(b)};
}

std::optional<FormableResult> formable_bonds(const Supertile& a, const Supertile& b, Rotation r,
                                             Vec3 t) {
    // Transformed placement of b.
    std::map<Vec3, Vec3> b_world;  // world point -> original point
    for (const auto& [p, pt] : b.placements()) {
        Vec3 wp = r.rotate_vec(p) + t;
        if (a.occupied(wp)) return std::nullopt;  // overlap: rejected placement
        b_world[wp] = p;
    }
    Supertile b2 = b.rotated(r).translated(t);
    FormableResult res;
    for (const auto& [p, pt] : a.placements()) {
        for (Face dir : all_faces()) {
            Vec3 q = p + unit(dir);
            if (!b_world.count(q)) continue;
            for (const WorldGlue& ga : a.world_glues(p)) {
                if (ga.world_face != dir || a.glue_state(ga) != GlueState::On) continue;
                auto gb = b2.find_world_glue(q, opposite(dir), complement_label(ga.spec->label));
                if (!gb || b2.glue_state(*gb) != GlueState::On) continue;
                if (gb->spec->strength != ga.spec->strength) continue;
                BondCandidate c;
                c.strength = ga.spec->strength;
                bool positive = static_cast<int>(dir) % 2 == 0;
                if (positive) {
                    c.bond = Bond{p, dir, ga.spec->label};
                    c.from_a = true;
                } else {
                    c.bond = Bond{q, opposite(dir), gb->spec->label};
                    c.from_a = false;
                }
                res.candidates.push_back(std::move(c));
                res.total_strength += ga.spec->strength;
            }
        }
    }
    return res;
}

Supertile Supertile::translated(Vec3 t) const {
    Supertile out(tileset_);
    for (const auto& [p, pt] : placements_) out.placements_.emplace(p + t, pt);
    for (const auto& b : bonds_) out.bonds_.insert(Bond{b.at + t, b.dir, b.label});
    return out;
}

Bond transform_bond(const Bond& b, Rotation r, Vec3 t) {
    Vec3 p = r.rotate_vec(b.at) + t;
    Face d = r.rotate(b.dir);
    if (static_cast<int>(d) % 2 == 0) return Bond{p, d, b.label};
    return Bond{p + unit(d), opposite(d), complement_label(b.label)};
}

Supertile Supertile::rotated(Rotation r) const {
    Supertile out(tileset_);
    for (const auto& [p, pt] : placements_) {
        PlacedTile np = pt;
        np.rotation = compose(r, pt.rotation);
        out.placements_.emplace(r.rotate_vec(p), std::move(np));
    }
    for (const auto& b : bonds_) out.bonds_.insert(transform_bond(b, r, {0, 0, 0}));
    return out;
}

void Supertile::check_invariants() const {
    for (const auto& b : bonds_) {
        Vec3 q = b.at + unit(b.dir);
        auto ga = find_world_glue(b.at, b.dir, b.label);
        auto gb = find_world_glue(q, opposite(b.dir), complement_label(b.label));
        if (!ga || !gb) throw std::logic_error("bond references missing glue");
        if (ga->spec->strength != gb->spec->strength)
            throw std::logic_error("bond with unequal strengths");
        if (glue_state(*ga) != GlueState::On || glue_state(*gb) != GlueState::On)
            throw std::logic_error("bond with non-on glue");
    }
    for (const auto& [p, pt] : placements_) {
        for (int idx : pt.instance.pending)
            if (pt.instance.completed.count(idx))
                throw std::logic_error("signal both pending and completed");
    }
    if (!bond_graph_connected()) throw std::logic_error("supertile not bond-connected");
}

namespace {

void append_instance(std::ostringstream& out, const Tileset& ts, const PlacedTile& pt) {
    const TileType& type = ts[pt.instance.type];
    out << "T" << type.name;
    // Glues per world face, sorted by label within a face.
    for (Face wf : all_faces()) {
        Face local = pt.rotation.inverse().rotate(wf);
        std::vector<std::string> entries;
        for (const auto& g : type.faces[static_cast<int>(local)]) {
            int gi = type.glue_index(local, g.label);
            GlueState st = pt.instance.glue_states.at(static_cast<size_t>(gi));
            entries.push_back(g.label + ":" + std::to_string(g.strength) + ":" +
                              std::to_string(static_cast<int>(st)));
        }
        std::sort(entries.begin(), entries.end());
        out << "|F" << static_cast<int>(wf) << "{";
        for (const auto& e : entries) out << e << ";";
        out << "}";
    }
    auto describe = [&](int sig_idx) {
        const Signal& s = type.signals.at(static_cast<size_t>(sig_idx));
        std::ostringstream d;
        d << static_cast<int>(pt.rotation.rotate(s.src_face)) << "," << s.src_label << ">"
          << static_cast<int>(pt.rotation.rotate(s.tgt_face)) << "," << s.tgt_label << ":"
          << glue_action_name(s.action);
        return d.str();
    };
    std::vector<std::string> pend, comp;
    for (int i : pt.instance.pending) pend.push_back(describe(i));
    for (int i : pt.instance.completed) comp.push_back(describe(i));
    std::sort(pend.begin(), pend.end());
    std::sort(comp.begin(), comp.end());
    out << "|P{";
    for (const auto& s : pend) out << s << ";";
    out << "}|C{";
    for (const auto& s : comp) out << s << ";";
    out << "}";
}

}  // namespace

std::string frame_serialization(const Supertile& s) {
    std::ostringstream out;
    for (const auto& [p, pt] : s.placements()) {
        out << "P" << p.x << "," << p.y << "," << p.z << " ";
        append_instance(out, s.tileset(), pt);
        out << "\n";
    }
    std::vector<std::string> bl;
    for (const auto& b : s.bonds()) {
        std::ostringstream bo;
        bo << "B" << b.at.x << "," << b.at.y << "," << b.at.z << "d" << static_cast<int>(b.dir)
           << ":" << b.label;
        bl.push_back(bo.str());
    }
    std::sort(bl.begin(), bl.end());
    for (const auto& b : bl) out << b << "\n";
    return out.str();
}

namespace {

Vec3 min_corner(const Supertile& s) {
    Vec3 m = s.placements().begin()->first;
    for (const auto& [p, pt] : s.placements()) {
        m.x = std::min(m.x, p.x);
        m.y = std::min(m.y, p.y);
        m.z = std::min(m.z, p.z);
    }
    return m;
}

}  // namespace

std::string canonical_form(const Supertile& s, RotationMode mode) {
    if (s.placements().empty()) return "";
    std::string best;
    int nrot = mode == RotationMode::StamR ? Rotation::count() : 1;
    for (int ri = 0; ri < nrot; ++ri) {
        Supertile r = s.rotated(Rotation::from_id(ri));
        std::string ser = frame_serialization(r.translated(-min_corner(r)));
        if (best.empty() || ser < best) best = std::move(ser);
    }
    return best;
}

Supertile canonical_pose(const Supertile& s, RotationMode mode, std::string* form_out) {
    if (s.placements().empty()) throw std::logic_error("canonical_pose of empty supertile");
    std::string best;
    int best_rot = 0;
    int nrot = mode == RotationMode::StamR ? Rotation::count() : 1;
    for (int ri = 0; ri < nrot; ++ri) {
        Supertile r = s.rotated(Rotation::from_id(ri));
        std::string ser = frame_serialization(r.translated(-min_corner(r)));
        if (best.empty() || ser < best) {
            best = std::move(ser);
            best_rot = ri;
        }
    }
    if (form_out) *form_out = best;
    Supertile r = s.rotated(Rotation::from_id(best_rot));
    return r.translated(-min_corner(r));
}

std::uint64_t canonical_hash(const Supertile& s, RotationMode mode) {
    return fnv1a64(canonical_form(s, mode));
}

}  // namespace stamr
