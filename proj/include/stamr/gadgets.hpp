#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stamr/engine.hpp"

namespace stamr {

// Expected-outcome predicate over a finished run, from a fixed catalog.
struct Expectation {
    enum class Kind {
        TerminalShapeEquals,  // some terminal supertile has this shape
        GlueStateEquals,      // every terminal instance of (type, face, label) is in `state`
        JunkSizeAtMost,       // every terminal without a protected type has size <= bound
        TraceOrder,           // every `after` event is preceded by `before_count` `before` events
        AllOf,
    } kind = Kind::AllOf;

    // TerminalShapeEquals
    std::optional<Shape> shape;

    // GlueStateEquals
    std::string type_name, glue_label;
    GlueState want_state = GlueState::On;

    // JunkSizeAtMost
    int bound = 0;
    std::vector<std::string> protected_types;

    // TraceOrder: glue-on events applied to `after_label` must come after
    // `before_count` bond-formation events carrying `before_label`.
    std::string after_label, before_label;
    int before_count = 0;

    std::vector<Expectation> children;  // AllOf

    static Expectation terminal_shape_equals(Shape s);
    static Expectation glue_state_equals(std::string type, std::string label, GlueState st);
    static Expectation junk_size_at_most(int bound, std::vector<std::string> protected_types);
    static Expectation trace_order(std::string after_label, std::string before_label,
                                   int before_count);
    static Expectation all_of(std::vector<Expectation> children);

    // True when the run satisfies the predicate; on failure `why` explains.
    bool eval(const RunResult& run, std::string* why = nullptr) const;
    std::string to_string() const;
};

// A self-contained, runnable realization of one signal-tile primitive: tile
// types, initial assemblies and counts, the binding threshold, and the
// expected outcome. Glue labels are namespaced per bundle so bundles compose
// without cross-talk.
struct GadgetBundle {
    std::string name;
    Tileset tiles;
    Scenario scenario;  // tau, mode, counts, assemblies
    Expectation expectation;
};

SystemState bundle_initial_state(const GadgetBundle& b);

enum class ScenarioOutcome { Pass, Fail, Inconclusive };

struct ScenarioResult {
    ScenarioOutcome outcome = ScenarioOutcome::Inconclusive;
    std::string why;
    RunResult run;
};

// Runs the bundle to quiescence (or max_steps) and evaluates the expectation.
// Non-quiescence is inconclusive, distinct from failure.
ScenarioResult run_scenario(const GadgetBundle& bundle, std::uint64_t seed, int max_steps);

// ---- uniformly covered host assemblies ----

struct ShapeTileOptions {
    std::string type_name = "host";
    std::string surface_label = "gx";       // strength-1 on-glue on every face
    std::string reinforcement_label;        // when set: latent posterior glue + arming signal
    std::string binding_prefix = "host_cb"; // strength-2 internal binding pair
};

// Adds one tile type to ts and appends the placements (plus the glue-state
// overrides that turn exposed binding glues off) to the assembly spec. The
// result is uniformly covered: every exposed face carries only the surface
// glue in the on state.
void add_uniform_assembly(Tileset& ts, ScenarioAssembly& spec, const Shape& s,
                          const ShapeTileOptions& opts = {});

// ---- the section-2.2 primitives ----

enum class DetectorArity { Single, Duple };

struct DetectorTrigger {
    Vec3 host_cell;      // tile of the host assembly presenting the glue
    Face host_face;      // face it presents the glue on
    std::string label;   // glue label on the host side (detector carries the complement)
    int strength = 1;
    std::string effect_label;  // latent glue on the host tile, activated on detection
    Face effect_face = Face::PZ;
};

struct DetectorOptions {
    bool self_dissolve = true;  // the detector turns its own glues off after detecting
};

// Detector gadget plus a host assembly exposing the trigger configuration.
// host_cells must contain every trigger cell and form a connected set; the
// builder glues adjacent host cells with unique strength-2 pairs.
// Preconditions: at least two triggers, total strength >= tau, every proper
// subset < tau. Violations throw std::invalid_argument.
GadgetBundle build_detector(DetectorArity arity, const std::vector<DetectorTrigger>& triggers,
                            const std::vector<Vec3>& host_cells, const DetectorOptions& opts = {});

// The two-diagonal-tile detection scenario: strength-1 `d` glues, activation
// of `x` glues on the detected tiles, detector left bound (no self-dissolve).
GadgetBundle fig2_detector_bundle();

enum class CornerDim { TwoD, ThreeD };

struct CornerGadgetOptions {
    // 3D only: after all three interior bonds are recorded, run the careful
    // dissolve (prior glues off; the 4-tile corner block stays bonded).
    bool dissolve_after_attach = false;
    // Glues activated on outward faces upon attachment (2D variant).
    std::vector<std::pair<int, std::string>> activations;  // (gadget tile index, label)
};

// 3 tiles (2x2 minus a corner) or 7 tiles (2x2x2 minus a corner) with unique
// strength-2 internal glues for piecewise self-assembly, binding a convex
// corner of a uniformly covered host via its surface glues. tau = 2.
GadgetBundle build_corner_gadget(CornerDim dim, const std::string& target_glue,
                                 const CornerGadgetOptions& opts = {});

// Filler tile family: the three prior-glue variants {gx*,gx*}, {gf*,gf*},
// {gx*,gf*} with sequential signaling (inputs reinforced to strength 2 before
// the gf outputs activate).
struct FillerBundleOptions {
    enum class Host { ConcaveCorner, Staircase } host = Host::ConcaveCorner;
};

GadgetBundle build_filler_bundle(const std::string& surface_glue, const std::string& filler_glue,
                                 const FillerBundleOptions& opts = {});

// Adds signals that turn every glue on every face off when the trigger glue
// bonds (tile dissolving). The trigger must exist on the tile.
TileType build_dissolve_glue(TileType tile, Face trigger_face, const std::string& trigger_label);

// A 1xN row of dissolvable tiles with a trigger tile that binds one end; the
// dissolve propagates tile to tile (each tile passes the signal on before
// releasing its own bonds) and the terminal state is all singletons.
GadgetBundle build_dissolve_row_bundle(int length = 3);

// Message following: a backbone of tiles along `path` (self-avoiding,
// z = 0, 6-connected steps) through which a `g` message propagates, followed
// by a `br` message that exits every tile on the side the g message exited.
GadgetBundle build_message_follower(const std::vector<Vec3>& path);

// Direction of the recorded exit at each path position, for trace oracles.
std::vector<Face> follower_exit_faces(const std::vector<Vec3>& path);

}  // namespace stamr
