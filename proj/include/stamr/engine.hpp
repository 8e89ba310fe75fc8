#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "stamr/shape.hpp"
#include "stamr/supertile.hpp"

namespace stamr {

struct Count {
    long long n = 0;
    bool infinite = false;

    static Count inf() { return Count{0, true}; }
    static Count of(long long k) { return Count{k, false}; }
    bool available(long long k) const { return infinite || n >= k; }
    void add(long long k) {
        if (!infinite) n += k;
    }
    void dec() {
        if (!infinite) --n;
    }
    bool positive() const { return infinite || n > 0; }
    std::string str() const { return infinite ? "inf" : std::to_string(n); }
};

// Multiset of canonical supertiles with counts, plus the binding threshold.
// Stored supertiles are tau-stable unless queued in `unstable`.
class SystemState {
  public:
    SystemState(const Tileset* ts, int tau, RotationMode mode)
        : tileset_(ts), tau_(tau), mode_(mode) {}

    const Tileset& tileset() const { return *tileset_; }
    int tau() const { return tau_; }
    RotationMode mode() const { return mode_; }

    struct Entry {
        Supertile tile;
        Count count;
    };

    const std::map<std::string, Entry>& supertiles() const { return entries_; }
    const std::vector<std::string>& unstable_queue() const { return unstable_; }

    // Canonicalizes, merges counts, and queues the supertile for splitting
    // when it is not tau-stable. Returns the canonical key.
    std::string add(Supertile s, Count c);
    // Decrement, dropping the entry at zero. Returns false when unavailable.
    bool take(const std::string& key);
    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const Entry& at(const std::string& key) const { return entries_.at(key); }
    void set_count(const std::string& key, Count c) { entries_.at(key).count = c; }
    void pop_unstable_front();

    long long total_tiles_finite() const;  // counting multiplicity, ignoring infinite pools

  private:
    const Tileset* tileset_;
    int tau_;
    RotationMode mode_;
    std::map<std::string, Entry> entries_;
    std::vector<std::string> unstable_;
};

// ---- actions (step kinds 1..4) ----

struct CombineAction {
    std::string a_key, b_key;
    Rotation rot;  // applied to b
    Vec3 trans;
    std::vector<BondCandidate> cross;  // candidates in the merged frame
    int total_strength = 0;
    std::string dedupe_key;  // canonical merged placement + cross set
};

struct BondWithinAction {
    std::string key;
    Bond bond;
};

struct SignalAction {
    std::string key;
    Vec3 at;
    int signal_index = 0;
};

enum class BondPolicy { All, RandomSubset };
enum class DiffusionCheck { PlacementOnly, PathBfs };
enum class SplitMode { MinCut, Exhaustive };

struct RunConfig {
    std::uint64_t seed = 0;
    int max_steps = 0;
    BondPolicy bond_policy = BondPolicy::All;
    DiffusionCheck diffusion = DiffusionCheck::PlacementOnly;
    int arena_bound = 6;  // path_bfs only
    std::optional<long long> finite_count_c;  // Def.-1 style count override
};

struct CombineOptions {
    DiffusionCheck diffusion = DiffusionCheck::PlacementOnly;
    int arena_bound = 6;
};

// All distinct combinations enabled in the state: placements of one stored
// supertile against another (identity rotation only in stam mode) that do not
// overlap and can form bonds totalling >= tau. Actions are deduplicated by
// the canonical merged placement together with its candidate bond set.
// size_bound > 0 skips pairs whose merged size exceeds it.
std::vector<CombineAction> enumerate_combinations(const SystemState& state, int size_bound,
                                                  const CombineOptions& opts = {});

std::vector<BondWithinAction> enumerate_bonds_within(const SystemState& state);
std::vector<SignalAction> enumerate_signals(const SystemState& state);

struct TraceEvent {
    enum class Kind { Combine, BondWithin, Signal, Split } kind;
    int step = 0;
    std::string pre_a, pre_b;    // canonical hashes of inputs
    std::string post_a, post_b;  // canonical hashes of outputs
    int rot_id = 0;
    Vec3 trans;
    std::vector<std::string> bond_labels;  // bonds formed by this event
    // signal events
    std::string src_label, tgt_label;
    GlueAction action = GlueAction::On;
    bool applied = false;
    std::uint64_t instance_id = 0;
    int signal_index = -1;
    int cut_weight = 0;

    std::string format() const;
};

struct ApplyResult {
    bool ok = false;           // false: stale action, no state change
    std::string product_key;   // the resulting supertile
    std::string product_key2;  // second side of a split
    TraceEvent event;
};

// Step kind 1. The chosen bond subset is every candidate under
// BondPolicy::All, or a uniformly selected subset with total >= tau under
// RandomSubset. Every glue that forms a bond enqueues its not-yet-pending,
// not-completed signals.
ApplyResult apply_combination(SystemState& state, const CombineAction& a, std::mt19937_64& rng,
                              BondPolicy policy);

// Step kind 2.
ApplyResult apply_bond_within(SystemState& state, const BondWithinAction& a);

// Step kind 3. The target glue changes only on a legal transition; the signal
// moves pending -> completed either way. Turning a bonded glue off removes
// the bond, which may leave the product queued for splitting.
ApplyResult apply_signal(SystemState& state, const SignalAction& a);

// Step kind 4, applied to the head of the unstable queue. MinCut picks a
// minimum-weight cut (zero-weight component separation first, rng tie-break
// among minimum cuts of small supertiles); Exhaustive callers should use
// stabilize_exhaustive instead. Errors (stable supertile) return ok = false.
ApplyResult apply_split(SystemState& state, const std::string& key, std::mt19937_64& rng);

// All multisets of tau-stable supertiles reachable from s by repeatedly
// splitting along connected cuts of weight < tau, in every possible way.
std::vector<std::vector<Supertile>> stabilize_exhaustive(const Supertile& s, int tau);

// ---- random runs ----

struct RunResult {
    SystemState state;
    std::vector<TraceEvent> trace;
    bool quiescent = false;
    int steps = 0;
    std::set<std::string> terminal_keys;          // no action involves them at the end
    std::map<std::string, Shape> observed;        // every canonical ever stored, with its shape
};

// Seeded, reproducible: each step picks uniformly among enabled action kinds,
// then uniformly among that kind's actions. Instability is resolved by splits
// before the next step. Stops at max_steps or quiescence.
RunResult run_random(SystemState initial, const RunConfig& config);

std::string format_trace(const RunResult& r, const RunConfig& config);

// ---- exhaustive exploration ----

struct ProducibleReport {
    std::map<std::string, Supertile> producibles;  // canonical form -> representative
    std::set<std::string> terminals;
    std::set<std::string> frontier;  // reached but larger than size_bound; result is a lower bound
};

// Fixed point of the initial supertiles under all four step kinds: all
// placements, all bond subsets with total >= tau, all signal orders, and all
// connected cuts of weight < tau. Counts are treated as unbounded. Supertiles
// larger than size_bound are recorded as frontier and not expanded.
ProducibleReport enumerate_producibles(const SystemState& initial, int size_bound);

// ---- finitely-completes probe ----

struct ProbeTargets {
    std::vector<std::string> canonicals;  // canonical supertile forms
    std::vector<Shape> shapes;            // matched up to rotation+translation
};

struct ProbeReport {
    int trials = 0;
    int successes = 0;
    std::vector<bool> per_trial;
    std::string note;  // this is a heuristic probe, not a proof
};

// Runs seeded random runs with every initial element at count c and reports
// whether every target was produced at some point in each trial.
ProbeReport finitely_completes_probe(const SystemState& initial, const ProbeTargets& targets,
                                     long long c, int trials, std::uint64_t seed, int max_steps);

// ---- scenario files ----

struct ScenarioAssembly {
    std::string name;
    std::vector<std::tuple<Vec3, std::string, int>> tiles;  // at, type name, rotation id
    // Per-instance glue state overrides (local face of the placed tile),
    // written as `state <x> <y> <z> <face> <label> <on|latent|off>` lines.
    std::vector<std::tuple<Vec3, Face, std::string, GlueState>> overrides;
    Count count = Count::of(1);
};

struct Scenario {
    int tau = 2;
    RotationMode mode = RotationMode::StamR;
    std::map<std::string, Count> singleton_counts;  // tile type name -> count
    std::vector<ScenarioAssembly> assemblies;
};

Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_file(const std::string& path);

// Forms every formable internal bond and marks the signals those bonds would
// have fired as completed (the initial-state convention).
void finalize_initial_supertile(Supertile& s);

// Builds the initial SystemState: singletons at their counts plus assemblies,
// auto-bonded and validated. An assembly that is not tau-stable is rejected
// when its count is infinite, otherwise queued for splitting.
SystemState build_initial_state(const Tileset& ts, const Scenario& sc);

// Shape of the placed points (always 6-connected for a valid supertile).
Shape supertile_shape(const Supertile& s);

std::string short_hash(const Supertile& s, RotationMode mode);

}  // namespace stamr
