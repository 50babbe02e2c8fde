#pragma once

#include "ceg/equivalence.hpp"
#include "ceg/tree.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ceg {

using VertexIndex = std::size_t;
using CegEdgeIndex = std::size_t;

// A CEG path is its directed edges, first edge leaving the root.
using CegPath = std::vector<CegEdgeIndex>;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);
inline constexpr const char* sink_id = "w_inf";

struct CegVertex {
    std::string id;                  // representative situation, or a reserved id
    std::vector<NodeIndex> members;  // situations merged into this position
    std::vector<std::string> names;  // their names, in the same order
    int stage = -1;                  // stage block; synthetic vertices get unique negative values
    VertexIndex origin = npos;       // vertex in the parent graph for derived graphs
};

struct CegEdge {
    VertexIndex from;
    VertexIndex to;
    EdgeLabel label;
    std::string key;  // label key used when comparing edges of one stage
    std::optional<Rational> prob;
    CegEdgeIndex origin = npos;  // edge in the parent graph for derived graphs
};

class ChainEventGraph {
public:
    std::vector<CegVertex> vertices;
    std::vector<CegEdge> edges;
    VertexIndex root = 0;
    VertexIndex sink = 0;
    std::vector<std::pair<VertexIndex, VertexIndex>> undirected;

    // Filled only for graphs built directly from a tree.
    std::vector<VertexIndex> vertex_of_node;      // leaves map to the sink
    std::vector<CegEdgeIndex> edge_of_tree_edge;

    std::size_t vertex_count() const { return vertices.size(); }
    const std::vector<CegEdgeIndex>& out(VertexIndex v) const { return out_.at(v); }
    const std::vector<CegEdgeIndex>& in(VertexIndex v) const { return in_.at(v); }
    std::optional<VertexIndex> find(std::string_view id) const;
    VertexIndex at(std::string_view id) const;  // throws PreconditionError
    bool same_stage(VertexIndex a, VertexIndex b) const;
    // Position label such as "[v1,v3]"; the sink prints as w_inf.
    std::string display(VertexIndex v) const;
    // Root first, parents before children.
    const std::vector<VertexIndex>& topological_order() const { return topo_; }

    // Rebuilds adjacency and ordering after vertices/edges change.
    void index();

private:
    std::vector<std::vector<CegEdgeIndex>> out_;
    std::vector<std::vector<CegEdgeIndex>> in_;
    std::vector<VertexIndex> topo_;
    std::vector<std::string> display_;
};

ChainEventGraph build_ceg(const ProbabilityTree& tree, const PositionPartition& positions,
                          const StagePartition& stages);

// A tree together with its partitions and CEG.
struct CegModel {
    ProbabilityTree tree;
    StagePartition stages;
    PositionPartition positions;
    ChainEventGraph graph;
    std::vector<CegPath> event_paths;  // CEG path of each atomic event
};

CegModel build_model(ProbabilityTree tree, StageMode mode = StageMode::symbolic);

std::vector<CegPath> ceg_paths(const ChainEventGraph& g);
Rational path_probability(const ChainEventGraph& g, const CegPath& path);
Rational event_probability(const ChainEventGraph& g, const std::vector<CegPath>& paths);
std::vector<VertexIndex> path_vertices(const ChainEventGraph& g, const CegPath& path);

// Paths through w. Throws PreconditionError for the sink or an unknown vertex.
std::vector<CegPath> passes_through(const ChainEventGraph& g, VertexIndex w);

// Probability of reaching each vertex (sum over root-to-vertex paths).
std::vector<Rational> reach_probabilities(const ChainEventGraph& g);

// reaches[v] is true when w is reachable from v (w included).
std::vector<char> can_reach(const ChainEventGraph& g, VertexIndex w);

bool is_c_regular(const ChainEventGraph& g, const std::vector<VertexIndex>& W);
std::vector<VertexIndex> parents_of(const ChainEventGraph& g, const std::vector<VertexIndex>& W);
bool is_manipulation_set(const ChainEventGraph& g, const std::vector<VertexIndex>& W);

// C(W): a fresh root "w0*" joined to each member of W, with the downstream
// graph inherited. Labels are P({w})/P(W) from the graph's own labels.
ChainEventGraph sub_ceg(const ChainEventGraph& g, const std::vector<VertexIndex>& W);
// Same, with caller-supplied root-edge probabilities (one per member of W).
ChainEventGraph sub_ceg(const ChainEventGraph& g, const std::vector<VertexIndex>& W,
                        const std::vector<Rational>& root_probs);

// The part of the graph on root-to-w paths. Indices refer to the parent graph.
struct UpstreamGraph {
    std::vector<VertexIndex> targets;
    std::vector<VertexIndex> vertices;  // includes root and targets
    std::vector<CegEdgeIndex> edges;
    // False when two same-stage vertices keep different out-label multisets,
    // i.e. cutting the graph severed a stage relation.
    bool is_ceg = true;
};

UpstreamGraph upstream_graph(const ChainEventGraph& g, VertexIndex w);
UpstreamGraph upstream_graph(const ChainEventGraph& g, const std::vector<VertexIndex>& W);
// K(C*(W)): upstream positions excluding the members of W.
std::vector<VertexIndex> upstream_positions(const ChainEventGraph& g, const std::vector<VertexIndex>& W);

std::string export_dot(const ChainEventGraph& g);

// Event (leaf) indices of the model's tree whose path passes through v.
std::vector<char> events_through(const CegModel& m, VertexIndex v);

// Resolves position names: any member situation or the representative id.
VertexIndex resolve_position(const CegModel& m, std::string_view name);

}  // namespace ceg
