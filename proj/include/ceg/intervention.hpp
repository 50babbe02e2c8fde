#pragma once

#include "ceg/equivalence.hpp"
#include "ceg/graph.hpp"
#include "ceg/tree.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ceg {

// Replacement distributions for a set D of situations. Each distribution
// lists one probability per out-edge, in declaration order.
struct Manipulation {
    std::map<NodeIndex, std::vector<Rational>> replacements;

    std::set<NodeIndex> domain() const;
    bool empty() const { return replacements.empty(); }
};

// `set <situation> <child> <p/q>` and `force <situation> -> <child>`.
// Children a situation's `set` lines leave out get probability 0.
Manipulation parse_manipulation(std::string_view text, const ProbabilityTree& tree);
std::string serialize_manipulation(const Manipulation& m, const ProbabilityTree& tree);

// Throws ValidationError unless every replacement is a distribution over the
// situation's children.
void validate_manipulation(const Manipulation& m, const ProbabilityTree& tree);

// Replaced edges become literals; stage assertions are dropped since the
// manipulation may legitimately break them.
ProbabilityTree apply(const ProbabilityTree& tree, const Manipulation& m);

bool is_positioned(const ProbabilityTree& tree, const Manipulation& m, StageMode mode = StageMode::symbolic);
bool is_staged(const ProbabilityTree& tree, const Manipulation& m, StageMode mode = StageMode::symbolic);

// Every parent of W sends all its mass into its child in W; parallel edges
// into that child keep their idle proportions. Lowered to every situation of
// each parent position.
Manipulation pure_manipulation(const CegModel& model, const std::vector<VertexIndex>& W);

struct Check {
    std::string name;
    bool passed = true;
    std::string witness;
};

// The idle graph with manipulated labels. A position whose situations were
// manipulated differently is non-uniform: its edges lose their probability.
struct ManipulatedView {
    ChainEventGraph graph;
    std::vector<char> uniform;       // per vertex
    std::vector<char> changed_edge;  // per edge: probability differs from the idle one
};

ManipulatedView manipulated_view(const CegModel& idle, const CegModel& manipulated);

// Forced-to-W test at tree level. With scope roots given, masses are taken
// within the events through those roots.
Check forced_check(const CegModel& idle, const CegModel& manipulated, const std::vector<VertexIndex>& W,
                   const std::vector<VertexIndex>& scope_roots = {});

bool is_forced_to(const CegModel& idle, const Manipulation& m, VertexIndex w);

struct ActiveBackgroundSplit {
    std::vector<VertexIndex> active;
    std::vector<VertexIndex> background;
    // Length of the active sequence on every root-to-w path.
    std::size_t levels = 0;
    // Levels whose kept edge carries the same label on every path to every
    // member of W. Their product is the common active factor.
    std::vector<char> shared_level;
    std::optional<Rational> common_active_factor;
    // Active positions that only ever occur at shared levels.
    std::vector<VertexIndex> modifiable;
    // P^beta({w}): sum over root-to-w paths of the labels outside the shared
    // levels. Empty when labels are unbound.
    std::map<VertexIndex, Rational> background_mass;
};

struct SimpleClassification {
    std::optional<ActiveBackgroundSplit> split;
    std::string failed;  // condition name when split is empty
    std::string witness;
    explicit operator bool() const { return split.has_value(); }
};

SimpleClassification classify_simple(const ChainEventGraph& g, const std::vector<VertexIndex>& W);

struct AmenabilityReport {
    bool amenable = false;
    std::vector<Check> checks;
    std::optional<ActiveBackgroundSplit> idle_split;
    std::optional<ActiveBackgroundSplit> manipulated_split;
};

// With scope roots, the test runs on the sub-graph C(scope) and only the
// manipulation's effect inside it counts.
AmenabilityReport assess_amenable(const CegModel& idle, const CegModel& manipulated,
                                  const std::vector<VertexIndex>& W,
                                  const std::vector<VertexIndex>& scope_roots = {});

bool is_amenable(const CegModel& idle, const Manipulation& m, const std::vector<VertexIndex>& W);

}  // namespace ceg
