#include "stamr/engine.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace stamr {

namespace {

Count merge_counts(Count a, Count b) {
    if (a.infinite || b.infinite) return Count::inf();
    return Count::of(a.n + b.n);
}

Vec3 min_corner_of(const Supertile& s) {
    Vec3 m = s.placements().begin()->first;
    for (const auto& [p, pt] : s.placements()) {
        m.x = std::min(m.x, p.x);
        m.y = std::min(m.y, p.y);
        m.z = std::min(m.z, p.z);
    }
    return m;
}

// Signals whose source glue is (world_face, label) of the tile at `at`.
template <typename SetPicker>
void mark_signals_for_glue(const Tileset& ts, Supertile& st, Vec3 at, Face world_face,
                           const std::string& label, SetPicker pick) {
    PlacedTile& pt = st.placements().at(at);
    const TileType& type = ts[pt.instance.type];
    Face local = pt.rotation.inverse().rotate(world_face);
    for (size_t i = 0; i < type.signals.size(); ++i) {
        const Signal& s = type.signals[i];
        if (s.src_face != local || s.src_label != label) continue;
        int idx = static_cast<int>(i);
        if (pt.instance.pending.count(idx) || pt.instance.completed.count(idx)) continue;
        pick(pt.instance).insert(idx);
    }
}

void fire_bond_signals(const Tileset& ts, Supertile& st, const Bond& b) {
    auto to_pending = [](TileInstance& i) -> std::set<int>& { return i.pending; };
    mark_signals_for_glue(ts, st, b.at, b.dir, b.label, to_pending);
    mark_signals_for_glue(ts, st, b.at + unit(b.dir), opposite(b.dir), complement_label(b.label),
                          to_pending);
}

void complete_bond_signals(const Tileset& ts, Supertile& st, const Bond& b) {
    auto to_completed = [](TileInstance& i) -> std::set<int>& { return i.completed; };
    mark_signals_for_glue(ts, st, b.at, b.dir, b.label, to_completed);
    mark_signals_for_glue(ts, st, b.at + unit(b.dir), opposite(b.dir), complement_label(b.label),
                          to_completed);
}

}  // namespace

std::string SystemState::add(Supertile s, Count c) {
    std::string form;
    Supertile pose = canonical_pose(s, mode_, &form);
    auto it = entries_.find(form);
    if (it != entries_.end()) {
        it->second.count = merge_counts(it->second.count, c);
    } else {
        bool unstable = min_cut_weight(pose) < tau_;
        entries_.emplace(form, Entry{std::move(pose), c});
        if (unstable) unstable_.push_back(form);
    }
    return form;
}

bool SystemState::take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end() || !it->second.count.positive()) return false;
    if (it->second.count.infinite) return true;
    if (--it->second.count.n == 0) entries_.erase(it);
    return true;
}

void SystemState::pop_unstable_front() {
    if (!unstable_.empty()) unstable_.erase(unstable_.begin());
}

long long SystemState::total_tiles_finite() const {
    long long total = 0;
    for (const auto& [k, e] : entries_)
        if (!e.count.infinite) total += e.count.n * e.tile.size();
    return total;
}

// ---- combination enumeration ----

namespace {

struct Placement {
    Rotation rot;
    Vec3 trans;
    std::vector<BondCandidate> cross;
    int total = 0;
    std::string dedupe_key;
};

std::string placement_dedupe_key(const Supertile& a, const Supertile& b, Rotation r, Vec3 t,
                                 const std::vector<BondCandidate>& cross, RotationMode mode) {
    Supertile merged = a;
    Supertile bt = b.rotated(r).translated(t);
    for (const auto& [p, pt] : bt.placements()) merged.place(p, pt);
    for (const auto& bond : bt.bonds()) merged.add_bond(bond);
    int nrot = mode == RotationMode::StamR ? Rotation::count() : 1;
    std::string best;
    for (int ri = 0; ri < nrot; ++ri) {
        Rotation rr = Rotation::from_id(ri);
        Supertile m2 = merged.rotated(rr);
        Vec3 shift = -min_corner_of(m2);
        std::ostringstream out;
        out << frame_serialization(m2.translated(shift));
        std::vector<std::string> marks;
        for (const auto& c : cross) {
            Bond tb = transform_bond(c.bond, rr, shift);
            std::ostringstream mo;
            mo << "X" << tb.at.x << "," << tb.at.y << "," << tb.at.z << "d"
               << static_cast<int>(tb.dir) << ":" << tb.label;
            marks.push_back(mo.str());
        }
        std::sort(marks.begin(), marks.end());
        for (const auto& m : marks) out << m << "\n";
        std::string ser = out.str();
        if (best.empty() || ser < best) best = std::move(ser);
    }
    return best;
}

struct ExposedGlue {
    Vec3 at;
    Face face;
    std::string label;
    int strength;
};

// On-glues only; those are the only ones that can seed a combination.
std::vector<ExposedGlue> on_glues(const Supertile& s) {
    std::vector<ExposedGlue> out;
    for (const auto& [p, pt] : s.placements())
        for (const WorldGlue& g : s.world_glues(p))
            if (s.glue_state(g) == GlueState::On)
                out.push_back({p, g.world_face, g.spec->label, g.spec->strength});
    return out;
}

bool diffusion_path_exists(const Supertile& a, const Supertile& b, Rotation r, Vec3 t,
                           int arena_bound) {
    // BFS over unit translations of the rotated b, from the binding offset to
    // any position whose bounding box clears a's by more than one cell.
    std::vector<Vec3> b_cells;
    for (const auto& [p, pt] : b.placements()) b_cells.push_back(r.rotate_vec(p) + t);
    Vec3 alo = min_corner_of(a), ahi = alo;
    for (const auto& [p, pt] : a.placements()) {
        ahi.x = std::max(ahi.x, p.x);
        ahi.y = std::max(ahi.y, p.y);
        ahi.z = std::max(ahi.z, p.z);
    }
    auto clear_of_a = [&](Vec3 d) {
        for (Vec3 c : b_cells) {
            Vec3 w = c + d;
            if (w.x >= alo.x - 1 && w.x <= ahi.x + 1 && w.y >= alo.y - 1 && w.y <= ahi.y + 1 &&
                w.z >= alo.z - 1 && w.z <= ahi.z + 1)
                return false;
        }
        return true;
    };
    auto overlaps = [&](Vec3 d) {
        for (Vec3 c : b_cells)
            if (a.occupied(c + d)) return true;
        return false;
    };
    auto in_arena = [&](Vec3 d) {
        for (Vec3 c : b_cells) {
            Vec3 w = c + d;
            if (w.x < alo.x - arena_bound || w.x > ahi.x + arena_bound || w.y < alo.y - arena_bound ||
                w.y > ahi.y + arena_bound || w.z < alo.z - arena_bound || w.z > ahi.z + arena_bound)
                return false;
        }
        return true;
    };
    std::set<Vec3> seen;
    std::queue<Vec3> q;
    q.push({0, 0, 0});
    seen.insert({0, 0, 0});
    while (!q.empty()) {
        Vec3 d = q.front();
        q.pop();
        if (clear_of_a(d)) return true;
        for (Face f : all_faces()) {
            Vec3 nd = d + unit(f);
            if (seen.count(nd) || overlaps(nd)) continue;
            if (!in_arena(nd) && !clear_of_a(nd)) continue;
            seen.insert(nd);
            q.push(nd);
        }
    }
    return false;
}

std::vector<Placement> pair_placements(const Supertile& a, const Supertile& b, int tau,
                                       RotationMode mode, const CombineOptions& opts) {
    std::vector<Placement> out;
    std::set<std::string> dedupe;
    auto a_glues = on_glues(a);
    auto b_glues = on_glues(b);
    int nrot = mode == RotationMode::StamR ? Rotation::count() : 1;
    for (int ri = 0; ri < nrot; ++ri) {
        Rotation r = Rotation::from_id(ri);
        std::set<Vec3> tried;
        for (const auto& ga : a_glues) {
            for (const auto& gb : b_glues) {
                if (!labels_complementary(ga.label, gb.label) || ga.strength != gb.strength)
                    continue;
                // b's glue must end up on the face opposite ga's.
                if (r.rotate(gb.face) != opposite(ga.face)) continue;
                Vec3 t = ga.at + unit(ga.face) - r.rotate_vec(gb.at);
                if (!tried.insert(t).second) continue;
                auto fr = formable_bonds(a, b, r, t);
                if (!fr || fr->total_strength < tau) continue;
                if (opts.diffusion == DiffusionCheck::PathBfs &&
                    !diffusion_path_exists(a, b, r, t, opts.arena_bound))
                    continue;
                std::string key = placement_dedupe_key(a, b, r, t, fr->candidates, mode);
                if (!dedupe.insert(key).second) continue;
                out.push_back(Placement{r, t, std::move(fr->candidates), fr->total_strength,
                                        std::move(key)});
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Placement& x, const Placement& y) { return x.dedupe_key < y.dedupe_key; });
    return out;
}

}  // namespace

std::vector<CombineAction> enumerate_combinations(const SystemState& state, int size_bound,
                                                  const CombineOptions& opts) {
    std::vector<CombineAction> out;
    const auto& entries = state.supertiles();
    std::set<std::string> dedupe;
    for (auto ia = entries.begin(); ia != entries.end(); ++ia) {
        for (auto ib = ia; ib != entries.end(); ++ib) {
            if (ia == ib && !ia->second.count.available(2)) continue;
            const Supertile& A = ia->second.tile;
            const Supertile& B = ib->second.tile;
            if (size_bound > 0 && A.size() + B.size() > size_bound) continue;
            for (auto& pl : pair_placements(A, B, state.tau(), state.mode(), opts)) {
                if (!dedupe.insert(pl.dedupe_key).second) continue;
                out.push_back(CombineAction{ia->first, ib->first, pl.rot, pl.trans, pl.cross,
                                            pl.total, pl.dedupe_key});
            }
        }
    }
    return out;
}

std::vector<BondWithinAction> enumerate_bonds_within(const SystemState& state) {
    std::vector<BondWithinAction> out;
    for (const auto& [key, e] : state.supertiles())
        for (const Bond& b : e.tile.formable_internal_bonds()) out.push_back({key, b});
    return out;
}

std::vector<SignalAction> enumerate_signals(const SystemState& state) {
    std::vector<SignalAction> out;
    for (const auto& [key, e] : state.supertiles())
        for (const auto& [p, pt] : e.tile.placements())
            for (int idx : pt.instance.pending) out.push_back({key, p, idx});
    return out;
}

// ---- action application ----

namespace {

Supertile copy_with_fresh_ids(const Supertile& s) {
    Supertile out(&s.tileset());
    for (const auto& [p, pt] : s.placements()) {
        PlacedTile np = pt;
        np.instance.instance_id = next_instance_id();
        out.place(p, np);
    }
    for (const auto& b : s.bonds()) out.add_bond(b);
    return out;
}

}  // namespace

ApplyResult apply_combination(SystemState& state, const CombineAction& a, std::mt19937_64& rng,
                              BondPolicy policy) {
    ApplyResult res;
    if (!state.has(a.a_key) || !state.has(a.b_key)) return res;
    if (a.a_key == a.b_key) {
        if (!state.at(a.a_key).count.available(2)) return res;
    } else if (!state.at(a.a_key).count.positive() || !state.at(a.b_key).count.positive()) {
        return res;
    }
    const Supertile A = state.at(a.a_key).tile;  // copies: take() may erase entries
    const Supertile B = state.at(a.b_key).tile;

    Supertile merged = copy_with_fresh_ids(A);
    Supertile bt = copy_with_fresh_ids(B.rotated(a.rot).translated(a.trans));
    for (const auto& [p, pt] : bt.placements()) merged.place(p, pt);
    for (const auto& b : bt.bonds()) merged.add_bond(b);

    // Choose the bond subset.
    std::vector<size_t> chosen;
    if (policy == BondPolicy::All || a.cross.size() > 20) {
        for (size_t i = 0; i < a.cross.size(); ++i) chosen.push_back(i);
    } else {
        std::vector<std::uint32_t> valid;
        for (std::uint32_t mask = 1; mask < (1u << a.cross.size()); ++mask) {
            int total = 0;
            for (size_t i = 0; i < a.cross.size(); ++i)
                if (mask & (1u << i)) total += a.cross[i].strength;
            if (total >= state.tau()) valid.push_back(mask);
        }
        std::uint32_t mask = valid[static_cast<size_t>(rng() % valid.size())];
        for (size_t i = 0; i < a.cross.size(); ++i)
            if (mask & (1u << i)) chosen.push_back(i);
    }

    res.event.kind = TraceEvent::Kind::Combine;
    res.event.pre_a = hex16(fnv1a64(a.a_key));
    res.event.pre_b = hex16(fnv1a64(a.b_key));
    res.event.rot_id = a.rot.id();
    res.event.trans = a.trans;
    for (size_t i : chosen) {
        const Bond& b = a.cross[i].bond;
        merged.add_bond(b);
        fire_bond_signals(state.tileset(), merged, b);
        res.event.bond_labels.push_back(b.label);
    }

    state.take(a.a_key);
    state.take(a.b_key);
    res.product_key = state.add(std::move(merged), Count::of(1));
    res.event.post_a = hex16(fnv1a64(res.product_key));
    res.ok = true;
    return res;
}

ApplyResult apply_bond_within(SystemState& state, const BondWithinAction& a) {
    ApplyResult res;
    if (!state.has(a.key)) return res;
    Supertile s = state.at(a.key).tile;
    if (s.has_bond(a.bond)) return res;
    res.event.kind = TraceEvent::Kind::BondWithin;
    res.event.pre_a = hex16(fnv1a64(a.key));
    res.event.bond_labels.push_back(a.bond.label);
    s.add_bond(a.bond);
    fire_bond_signals(state.tileset(), s, a.bond);
    state.take(a.key);
    res.product_key = state.add(std::move(s), Count::of(1));
    res.event.post_a = hex16(fnv1a64(res.product_key));
    res.ok = true;
    return res;
}

ApplyResult apply_signal(SystemState& state, const SignalAction& a) {
    ApplyResult res;
    if (!state.has(a.key)) return res;
    Supertile s = state.at(a.key).tile;
    auto pit = s.placements().find(a.at);
    if (pit == s.placements().end()) return res;
    PlacedTile& pt = pit->second;
    if (!pt.instance.pending.count(a.signal_index)) return res;

    const TileType& type = state.tileset()[pt.instance.type];
    const Signal& sig = type.signals.at(static_cast<size_t>(a.signal_index));

    res.event.kind = TraceEvent::Kind::Signal;
    res.event.pre_a = hex16(fnv1a64(a.key));
    res.event.src_label = sig.src_label;
    res.event.tgt_label = sig.tgt_label;
    res.event.action = sig.action;
    res.event.instance_id = pt.instance.instance_id;
    res.event.signal_index = a.signal_index;

    pt.instance.pending.erase(a.signal_index);
    pt.instance.completed.insert(a.signal_index);

    int flat = type.glue_index(sig.tgt_face, sig.tgt_label);
    GlueState cur = pt.instance.glue_states.at(static_cast<size_t>(flat));
    if (transition_legal(cur, sig.action)) {
        GlueState next = sig.action == GlueAction::On ? GlueState::On : GlueState::Off;
        pt.instance.glue_states.at(static_cast<size_t>(flat)) = next;
        res.event.applied = true;
        if (cur == GlueState::On && next == GlueState::Off) {
            // A bond held by this glue no longer exists.
            Face wf = pt.rotation.rotate(sig.tgt_face);
            Bond b = static_cast<int>(wf) % 2 == 0
                         ? Bond{a.at, wf, sig.tgt_label}
                         : Bond{a.at + unit(wf), opposite(wf), complement_label(sig.tgt_label)};
            if (s.has_bond(b)) s.remove_bond(b);
        }
    }

    state.take(a.key);
    res.product_key = state.add(std::move(s), Count::of(1));
    res.event.post_a = hex16(fnv1a64(res.product_key));
    res.ok = true;
    return res;
}

ApplyResult apply_split(SystemState& state, const std::string& key, std::mt19937_64& rng) {
    ApplyResult res;
    if (!state.has(key)) return res;
    const Supertile s = state.at(key).tile;
    if (min_cut_weight(s) >= state.tau()) return res;  // stable: rejected

    std::vector<Vec3> side;
    int cut = 0;
    if (!s.bond_graph_connected()) {
        side = min_cut_side(s);  // zero-weight component separation
    } else {
        cut = min_cut_weight(s);
        if (s.size() <= 14) {
            auto all = connected_bipartitions_below(s, state.tau());
            std::vector<const std::vector<Vec3>*> mins;
            for (const auto& [pts, w] : all)
                if (w == cut) mins.push_back(&pts);
            side = *mins[static_cast<size_t>(rng() % mins.size())];
        } else {
            side = min_cut_side(s);
        }
    }

    auto [left, right] = split_along(s, side);
    res.event.kind = TraceEvent::Kind::Split;
    res.event.pre_a = hex16(fnv1a64(key));
    res.event.cut_weight = cut;
    state.take(key);
    std::string k1 = state.add(std::move(left), Count::of(1));
    std::string k2 = state.add(std::move(right), Count::of(1));
    res.event.post_a = hex16(fnv1a64(k1));
    res.event.post_b = hex16(fnv1a64(k2));
    res.product_key = k1;
    res.product_key2 = k2;
    res.ok = true;
    return res;
}

std::vector<std::vector<Supertile>> stabilize_exhaustive(const Supertile& s, int tau) {
    std::vector<std::vector<Supertile>> out;
    if (min_cut_weight(s) >= tau) {
        out.push_back({s});
        return out;
    }
    std::set<std::string> seen;  // dedupe outcomes by sorted canonical forms
    std::vector<std::pair<std::vector<Vec3>, int>> cuts;
    if (!s.bond_graph_connected()) {
        cuts.emplace_back(min_cut_side(s), 0);
    } else {
        cuts = connected_bipartitions_below(s, tau);
    }
    for (const auto& [side, w] : cuts) {
        auto [a, b] = split_along(s, side);
        for (auto& ra : stabilize_exhaustive(a, tau)) {
            for (auto& rb : stabilize_exhaustive(b, tau)) {
                std::vector<Supertile> combined;
                combined.reserve(ra.size() + rb.size());
                for (const auto& t : ra) combined.push_back(t);
                for (const auto& t : rb) combined.push_back(t);
                std::vector<std::string> forms;
                for (const auto& t : combined) forms.push_back(canonical_form(t, RotationMode::StamR));
                std::sort(forms.begin(), forms.end());
                std::string sig;
                for (const auto& f : forms) sig += f + "\x1e";
                if (seen.insert(sig).second) out.push_back(std::move(combined));
            }
        }
    }
    return out;
}

// ---- random runs ----

namespace {

void drain_splits(SystemState& state, std::mt19937_64& rng, std::vector<TraceEvent>& trace,
                  int step, std::map<std::string, Shape>* observed) {
    while (!state.unstable_queue().empty()) {
        std::string key = state.unstable_queue().front();
        if (!state.has(key)) {
            state.pop_unstable_front();
            continue;
        }
        ApplyResult r = apply_split(state, key, rng);
        if (!r.ok) {  // stable after all (merged back); drop from queue
            state.pop_unstable_front();
            continue;
        }
        r.event.step = step;
        trace.push_back(r.event);
        if (observed) {
            for (const std::string& h : {r.product_key, r.product_key2}) {
                if (state.has(h) && !observed->count(h))
                    observed->emplace(h, supertile_shape(state.at(h).tile));
            }
        }
        if (!state.has(key)) state.pop_unstable_front();
    }
}

}  // namespace

RunResult run_random(SystemState initial, const RunConfig& config) {
    RunResult res{std::move(initial), {}, false, 0, {}, {}};
    SystemState& state = res.state;
    std::mt19937_64 rng(config.seed);

    if (config.finite_count_c) {
        std::vector<std::string> keys;
        for (const auto& [k, e] : state.supertiles()) keys.push_back(k);
        for (const auto& k : keys) state.set_count(k, Count::of(*config.finite_count_c));
    }
    for (const auto& [k, e] : state.supertiles()) res.observed.emplace(k, supertile_shape(e.tile));

    CombineOptions copts{config.diffusion, config.arena_bound};
    drain_splits(state, rng, res.trace, 0, &res.observed);

    // Placement lists are a function of the pair of canonical supertiles, so
    // they are cached across steps.
    std::map<std::pair<std::string, std::string>, std::vector<Placement>> cache;
    auto placements_for = [&](const std::string& ka, const std::string& kb) -> const std::vector<Placement>& {
        auto key = std::make_pair(ka, kb);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, pair_placements(state.at(ka).tile, state.at(kb).tile,
                                                    state.tau(), state.mode(), copts))
                     .first;
        return it->second;
    };

    auto enumerate_all_combines = [&](std::vector<CombineAction>& out) {
        std::set<std::string> dedupe;
        const auto& entries = state.supertiles();
        for (auto ia = entries.begin(); ia != entries.end(); ++ia) {
            for (auto ib = ia; ib != entries.end(); ++ib) {
                if (ia == ib && !ia->second.count.available(2)) continue;
                for (const Placement& pl : placements_for(ia->first, ib->first)) {
                    if (!dedupe.insert(pl.dedupe_key).second) continue;
                    out.push_back(CombineAction{ia->first, ib->first, pl.rot, pl.trans, pl.cross,
                                                pl.total, pl.dedupe_key});
                }
            }
        }
    };

    while (res.steps < config.max_steps) {
        std::vector<CombineAction> combines;
        enumerate_all_combines(combines);
        std::vector<BondWithinAction> bonds = enumerate_bonds_within(state);
        std::vector<SignalAction> signals = enumerate_signals(state);

        std::vector<int> kinds;
        if (!combines.empty()) kinds.push_back(0);
        if (!bonds.empty()) kinds.push_back(1);
        if (!signals.empty()) kinds.push_back(2);
        if (kinds.empty()) {
            res.quiescent = true;
            break;
        }
        ++res.steps;
        int kind = kinds[static_cast<size_t>(rng() % kinds.size())];
        ApplyResult ar;
        if (kind == 0) {
            const CombineAction& a = combines[static_cast<size_t>(rng() % combines.size())];
            ar = apply_combination(state, a, rng, config.bond_policy);
        } else if (kind == 1) {
            const BondWithinAction& a = bonds[static_cast<size_t>(rng() % bonds.size())];
            ar = apply_bond_within(state, a);
        } else {
            const SignalAction& a = signals[static_cast<size_t>(rng() % signals.size())];
            ar = apply_signal(state, a);
        }
        if (!ar.ok) throw std::logic_error("enumerated action was stale");
        ar.event.step = res.steps;
        res.trace.push_back(ar.event);
        if (state.has(ar.product_key) && !res.observed.count(ar.product_key))
            res.observed.emplace(ar.product_key, supertile_shape(state.at(ar.product_key).tile));
        drain_splits(state, rng, res.trace, res.steps, &res.observed);
    }

    // Terminal flags for the final configuration.
    if (res.quiescent) {
        for (const auto& [k, e] : state.supertiles()) res.terminal_keys.insert(k);
    } else {
        std::set<std::string> involved;
        std::vector<CombineAction> combines;
        enumerate_all_combines(combines);
        for (const auto& a : combines) {
            involved.insert(a.a_key);
            involved.insert(a.b_key);
        }
        for (const auto& a : enumerate_bonds_within(state)) involved.insert(a.key);
        for (const auto& a : enumerate_signals(state)) involved.insert(a.key);
        for (const auto& [k, e] : state.supertiles())
            if (!involved.count(k)) res.terminal_keys.insert(k);
    }
    return res;
}

// ---- trace formatting ----

std::string TraceEvent::format() const {
    std::ostringstream out;
    out << "#" << step << " ";
    switch (kind) {
        case Kind::Combine: {
            out << "combine a=" << pre_a << " b=" << pre_b << " rot=" << rot_id << " t=" << trans
                << " bonds=[";
            for (size_t i = 0; i < bond_labels.size(); ++i)
                out << (i ? "," : "") << bond_labels[i];
            out << "] -> " << post_a;
            break;
        }
        case Kind::BondWithin:
            out << "bond s=" << pre_a << " label=" << (bond_labels.empty() ? "?" : bond_labels[0])
                << " -> " << post_a;
            break;
        case Kind::Signal:
            out << "signal s=" << pre_a << " idx=" << signal_index << " " << src_label << "->"
                << tgt_label << ":" << glue_action_name(action) << " applied=" << (applied ? 1 : 0)
                << " -> " << post_a;
            break;
        case Kind::Split:
            out << "split s=" << pre_a << " cut=" << cut_weight << " -> " << post_a << " + "
                << post_b;
            break;
    }
    return out.str();
}

std::string format_trace(const RunResult& r, const RunConfig& config) {
    std::ostringstream out;
    out << "seed=" << config.seed << " tau=" << r.state.tau()
        << " mode=" << rotation_mode_name(r.state.mode())
        << " policy=" << (config.bond_policy == BondPolicy::All ? "all" : "random") << "\n";
    for (const auto& e : r.trace) out << e.format() << "\n";
    out << (r.quiescent ? "quiescent" : "step-limit") << " steps=" << r.steps << "\n";
    for (const auto& [k, e] : r.state.supertiles())
        out << "final " << hex16(fnv1a64(k)) << " size=" << e.tile.size()
            << " count=" << e.count.str() << " terminal=" << (r.terminal_keys.count(k) ? 1 : 0)
            << "\n";
    return out.str();
}

// ---- exhaustive exploration ----

ProducibleReport enumerate_producibles(const SystemState& initial, int size_bound) {
    ProducibleReport rep;
    const Tileset& ts = initial.tileset();
    int tau = initial.tau();
    RotationMode mode = initial.mode();
    CombineOptions copts;

    std::vector<std::string> worklist;
    auto add_stable = [&](const Supertile& s) {
        if (size_bound > 0 && s.size() > size_bound) {
            rep.frontier.insert(canonical_form(s, mode));
            return;
        }
        std::string form;
        Supertile pose = canonical_pose(s, mode, &form);
        if (rep.producibles.count(form)) return;
        rep.producibles.emplace(form, std::move(pose));
        worklist.push_back(form);
    };
    auto add_any = [&](const Supertile& s) {
        if (min_cut_weight(s) >= tau) {
            add_stable(s);
            return;
        }
        for (const auto& outcome : stabilize_exhaustive(s, tau))
            for (const auto& part : outcome) add_stable(part);
    };

    for (const auto& [k, e] : initial.supertiles()) add_any(e.tile);

    std::map<std::pair<std::string, std::string>, std::vector<Placement>> cache;
    while (!worklist.empty()) {
        std::string key = worklist.back();
        worklist.pop_back();
        const Supertile A = rep.producibles.at(key);

        // Step kind 2: single bond formation.
        for (const Bond& b : A.formable_internal_bonds()) {
            Supertile s = A;
            s.add_bond(b);
            fire_bond_signals(ts, s, b);
            add_stable(s);  // adding a bond cannot destabilize
        }
        // Step kind 3: each pending signal.
        for (const auto& [p, pt] : A.placements()) {
            for (int idx : pt.instance.pending) {
                Supertile s = A;
                PlacedTile& mpt = s.placements().at(p);
                mpt.instance.pending.erase(idx);
                mpt.instance.completed.insert(idx);
                const TileType& type = ts[mpt.instance.type];
                const Signal& sig = type.signals.at(static_cast<size_t>(idx));
                int flat = type.glue_index(sig.tgt_face, sig.tgt_label);
                GlueState cur = mpt.instance.glue_states.at(static_cast<size_t>(flat));
                if (transition_legal(cur, sig.action)) {
                    GlueState next = sig.action == GlueAction::On ? GlueState::On : GlueState::Off;
                    mpt.instance.glue_states.at(static_cast<size_t>(flat)) = next;
                    if (cur == GlueState::On && next == GlueState::Off) {
                        Face wf = mpt.rotation.rotate(sig.tgt_face);
                        Bond b = static_cast<int>(wf) % 2 == 0
                                     ? Bond{p, wf, sig.tgt_label}
                                     : Bond{p + unit(wf), opposite(wf),
                                            complement_label(sig.tgt_label)};
                        if (s.has_bond(b)) s.remove_bond(b);
                    }
                }
                add_any(s);
            }
        }
        // Step kind 1: combine with every producible found so far (counts are
        // treated as unbounded).
        std::vector<std::string> partners;
        for (const auto& [k2, t2] : rep.producibles) partners.push_back(k2);
        for (const std::string& k2 : partners) {
            auto ck = std::make_pair(std::min(key, k2), std::max(key, k2));
            auto it = cache.find(ck);
            if (it == cache.end())
                it = cache.emplace(ck, pair_placements(rep.producibles.at(ck.first),
                                                       rep.producibles.at(ck.second), tau, mode,
                                                       copts))
                         .first;
            for (const Placement& pl : it->second) {
                const Supertile& PA = rep.producibles.at(ck.first);
                const Supertile& PB = rep.producibles.at(ck.second);
                if (pl.cross.size() > 16)
                    throw std::logic_error("too many bond candidates for subset enumeration");
                for (std::uint32_t mask = 1; mask < (1u << pl.cross.size()); ++mask) {
                    int total = 0;
                    for (size_t i = 0; i < pl.cross.size(); ++i)
                        if (mask & (1u << i)) total += pl.cross[i].strength;
                    if (total < tau) continue;
                    Supertile merged = PA;
                    Supertile bt = PB.rotated(pl.rot).translated(pl.trans);
                    for (const auto& [p, pt] : bt.placements()) merged.place(p, pt);
                    for (const auto& b : bt.bonds()) merged.add_bond(b);
                    for (size_t i = 0; i < pl.cross.size(); ++i) {
                        if (!(mask & (1u << i))) continue;
                        merged.add_bond(pl.cross[i].bond);
                        fire_bond_signals(ts, merged, pl.cross[i].bond);
                    }
                    add_stable(merged);
                }
            }
        }
    }

    // Terminal supertiles: no action involves them, against any producible.
    for (const auto& [key, s] : rep.producibles) {
        bool has_pending = false;
        for (const auto& [p, pt] : s.placements())
            if (!pt.instance.pending.empty()) has_pending = true;
        if (has_pending || !s.formable_internal_bonds().empty()) continue;
        bool can_combine = false;
        for (const auto& [k2, t2] : rep.producibles) {
            auto ck = std::make_pair(std::min(key, k2), std::max(key, k2));
            auto it = cache.find(ck);
            if (it == cache.end())
                it = cache.emplace(ck, pair_placements(rep.producibles.at(ck.first),
                                                       rep.producibles.at(ck.second),
                                                       tau, mode, copts))
                         .first;
            if (!it->second.empty()) {
                can_combine = true;
                break;
            }
        }
        if (!can_combine) rep.terminals.insert(key);
    }
    return rep;
}

// ---- finitely-completes probe ----

ProbeReport finitely_completes_probe(const SystemState& initial, const ProbeTargets& targets,
                                     long long c, int trials, std::uint64_t seed, int max_steps) {
    ProbeReport rep;
    rep.trials = trials;
    rep.note = "heuristic probe over seeded random runs; success is evidence, not proof";
    for (int i = 0; i < trials; ++i) {
        RunConfig cfg;
        cfg.seed = seed + static_cast<std::uint64_t>(i);
        cfg.max_steps = max_steps;
        cfg.finite_count_c = c;
        RunResult r = run_random(initial, cfg);
        bool ok = true;
        for (const auto& t : targets.canonicals)
            if (!r.observed.count(t)) ok = false;
        for (const auto& sh : targets.shapes) {
            bool found = false;
            for (const auto& [k, obs] : r.observed)
                if (congruent(obs, sh)) {
                    found = true;
                    break;
                }
            if (!found) ok = false;
        }
        rep.per_trial.push_back(ok);
        if (ok) ++rep.successes;
    }
    return rep;
}

// ---- scenarios ----

namespace {

Count parse_count_token(const std::string& tok, int lineno) {
    if (tok == "inf") return Count::inf();
    try {
        long long n = std::stoll(tok);
        if (n < 0) throw std::runtime_error("negative");
        return Count::of(n);
    } catch (...) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": bad count '" + tok + "'");
    }
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    std::string line;
    int lineno = 0;
    ScenarioAssembly* open = nullptr;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::vector<std::string> tok;
        std::string t;
        while (ss >> t) {
            if (t[0] == '#') break;
            tok.push_back(t);
        }
        if (tok.empty()) continue;
        auto fail = [&](const std::string& m) -> void {
            throw std::runtime_error("line " + std::to_string(lineno) + ": " + m);
        };
        if (tok[0] == "tau") {
            if (tok.size() != 2) fail("expected: tau <int>");
            sc.tau = std::stoi(tok[1]);
            if (sc.tau < 1) fail("tau must be positive");
        } else if (tok[0] == "mode") {
            if (tok.size() != 2 || !parse_rotation_mode(tok[1], sc.mode))
                fail("expected: mode <stam_r|stam>");
        } else if (tok[0] == "count") {
            if (tok.size() != 3) fail("expected: count <tile-name> <int|inf>");
            sc.singleton_counts[tok[1]] = parse_count_token(tok[2], lineno);
        } else if (tok[0] == "assembly") {
            if (open) fail("nested assembly block");
            if (tok.size() != 2) fail("expected: assembly <name>");
            sc.assemblies.push_back(ScenarioAssembly{tok[1], {}, Count::of(1)});
            open = &sc.assemblies.back();
        } else if (tok[0] == "at") {
            if (!open) fail("'at' outside assembly block");
            if (tok.size() != 8 || tok[4] != "tile" || tok[6] != "rot")
                fail("expected: at <x> <y> <z> tile <name> rot <0..23>");
            Vec3 p{std::stoi(tok[1]), std::stoi(tok[2]), std::stoi(tok[3])};
            int rot = std::stoi(tok[7]);
            if (rot < 0 || rot > 23) fail("rotation id out of range");
            open->tiles.emplace_back(p, tok[5], rot);
        } else if (tok[0] == "state") {
            // extension: per-instance glue state override
            if (!open) fail("'state' outside assembly block");
            if (tok.size() != 7) fail("expected: state <x> <y> <z> <face> <label> <on|latent|off>");
            Vec3 p{std::stoi(tok[1]), std::stoi(tok[2]), std::stoi(tok[3])};
            Face f;
            if (!parse_face(tok[4], f)) fail("bad face '" + tok[4] + "'");
            GlueState st;
            if (tok[6] == "on")
                st = GlueState::On;
            else if (tok[6] == "latent")
                st = GlueState::Latent;
            else if (tok[6] == "off")
                st = GlueState::Off;
            else
                fail("bad glue state '" + tok[6] + "'");
            open->overrides.emplace_back(p, f, tok[5], st);
        } else if (tok[0] == "end") {
            if (!open) fail("'end' outside assembly block");
            if (open->tiles.empty()) fail("empty assembly");
            open = nullptr;
        } else if (tok[0] == "count-assembly") {
            if (tok.size() != 3) fail("expected: count-assembly <name> <int|inf>");
            bool found = false;
            for (auto& a : sc.assemblies)
                if (a.name == tok[1]) {
                    a.count = parse_count_token(tok[2], lineno);
                    found = true;
                }
            if (!found) fail("unknown assembly '" + tok[1] + "'");
        } else {
            fail("unknown directive '" + tok[0] + "'");
        }
    }
    if (open) throw std::runtime_error("unterminated assembly block");
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    return parse_scenario(in);
}

void finalize_initial_supertile(Supertile& s) {
    for (const Bond& b : s.formable_internal_bonds()) {
        s.add_bond(b);
        complete_bond_signals(s.tileset(), s, b);
    }
}

SystemState build_initial_state(const Tileset& ts, const Scenario& sc) {
    SystemState state(&ts, sc.tau, sc.mode);
    for (const auto& [name, count] : sc.singleton_counts) {
        int idx = ts.index_of(name);
        if (idx < 0) throw std::runtime_error("unknown tile type '" + name + "' in count");
        if (!count.positive()) continue;
        Supertile s(&ts);
        s.place({0, 0, 0}, PlacedTile{TileInstance::of_type(ts, idx), Rotation::identity()});
        state.add(std::move(s), count);
    }
    for (const auto& a : sc.assemblies) {
        if (!a.count.positive()) continue;
        Supertile s(&ts);
        for (const auto& [p, name, rot] : a.tiles) {
            int idx = ts.index_of(name);
            if (idx < 0)
                throw std::runtime_error("unknown tile type '" + name + "' in assembly " + a.name);
            s.place(p, PlacedTile{TileInstance::of_type(ts, idx), Rotation::from_id(rot)});
        }
        for (const auto& [p, face, label, st] : a.overrides) {
            auto it = s.placements().find(p);
            if (it == s.placements().end())
                throw std::runtime_error("state override at unoccupied cell in assembly " + a.name);
            const TileType& type = ts[it->second.instance.type];
            int flat = type.glue_index(face, label);
            if (flat < 0)
                throw std::runtime_error("state override names missing glue " + label +
                                         " in assembly " + a.name);
            it->second.instance.glue_states.at(static_cast<size_t>(flat)) = st;
        }
        finalize_initial_supertile(s);
        if (min_cut_weight(s) < sc.tau && a.count.infinite)
            throw std::runtime_error("assembly " + a.name +
                                     " is not tau-stable; infinite count not allowed");
        if (!s.bond_graph_connected())
            throw std::runtime_error("assembly " + a.name + " is not bond-connected");
        state.add(std::move(s), a.count);
    }
    return state;
}

Shape supertile_shape(const Supertile& s) {
    VoxelSet cells;
    for (const auto& [p, pt] : s.placements()) cells.insert(p);
    return Shape(std::move(cells));
}

std::string short_hash(const Supertile& s, RotationMode mode) {
    return hex16(canonical_hash(s, mode));
}

}  // namespace stamr
