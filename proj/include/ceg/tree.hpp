#pragma once

#include "ceg/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace ceg {

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;

// Label on a tree edge: a shared parameter symbol, a fixed probability,
// or "_" meaning one minus the sum of the siblings.
class EdgeLabel {
public:
    enum class Kind { symbol, literal, residual };

    static EdgeLabel symbol(std::string name);
    static EdgeLabel literal(Rational value);
    static EdgeLabel residual();

    Kind kind() const { return kind_; }
    bool is_symbol() const { return kind_ == Kind::symbol; }
    bool is_literal() const { return kind_ == Kind::literal; }
    bool is_residual() const { return kind_ == Kind::residual; }
    const std::string& name() const { return name_; }
    const Rational& value() const { return value_; }

    // Symbol name, canonical rational text, or "_".
    std::string key() const;

    friend bool operator==(const EdgeLabel&, const EdgeLabel&) = default;

private:
    Kind kind_ = Kind::residual;
    std::string name_;
    Rational value_;
};

struct TreeEdge {
    NodeIndex parent;
    NodeIndex child;
    EdgeLabel label;
};

// Root-to-leaf path, root included. A root-only tree has the single path [root].
struct AtomicEvent {
    std::vector<NodeIndex> path;
    friend bool operator==(const AtomicEvent&, const AtomicEvent&) = default;
};

enum class Bindings {
    required,  // every symbol must resolve
    optional   // unbound symbols allowed; sums checked where resolvable
};

class ProbabilityTree;

class TreeBuilder {
public:
    void set_root(std::string id);
    void add_node(std::string id);
    void add_edge(std::string parent, std::string child, EdgeLabel label);
    void bind(std::string symbol, Rational value);
    void assert_stage(std::vector<std::string> members);

    ProbabilityTree build(Bindings policy = Bindings::required) const;

private:
    friend class ProbabilityTree;
    std::optional<std::string> root_;
    std::vector<std::string> nodes_;
    std::vector<std::tuple<std::string, std::string, EdgeLabel>> edges_;
    std::map<std::string, Rational> bindings_;
    std::vector<std::vector<std::string>> stages_;
};

// Validated, immutable probability tree.
class ProbabilityTree {
public:
    std::size_t node_count() const { return names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    NodeIndex root() const { return root_; }
    const std::string& name(NodeIndex v) const { return names_.at(v); }
    std::optional<NodeIndex> find(std::string_view name) const;
    NodeIndex at(std::string_view name) const;  // throws PreconditionError

    const TreeEdge& edge(EdgeIndex e) const { return edges_.at(e); }
    const std::vector<TreeEdge>& edges() const { return edges_; }
    // Out-edges in declaration order.
    const std::vector<EdgeIndex>& out_edges(NodeIndex v) const { return out_.at(v); }
    std::optional<EdgeIndex> in_edge(NodeIndex v) const { return in_.at(v); }
    std::vector<NodeIndex> children(NodeIndex v) const;
    bool is_leaf(NodeIndex v) const { return out_.at(v).empty(); }
    std::optional<EdgeIndex> edge_between(NodeIndex parent, NodeIndex child) const;

    // Situations (non-leaves) and leaves in depth-first declaration order.
    const std::vector<NodeIndex>& situations() const { return situations_; }
    const std::vector<NodeIndex>& leaves() const { return leaves_; }
    // Index of the atomic event ending at a leaf.
    std::size_t event_of_leaf(NodeIndex leaf) const;
    std::size_t depth(NodeIndex v) const { return depth_.at(v); }

    const std::map<std::string, Rational>& bindings() const { return bindings_; }
    const std::vector<std::vector<NodeIndex>>& stage_assertions() const { return stage_assertions_; }

    // Resolved primitive probability, empty when a symbol (or a residual's
    // sibling) is unbound.
    const std::optional<Rational>& probability(EdgeIndex e) const { return prob_.at(e); }
    const Rational& require_probability(EdgeIndex e) const;
    bool fully_bound() const;

    const std::vector<AtomicEvent>& events() const { return events_; }

    // Copy with every edge label replaced; topology is kept.
    ProbabilityTree relabelled(const std::vector<EdgeLabel>& labels, Bindings policy) const;

    // Same root, same children (in order) with the same labels, same
    // bindings and stage assertions. Node numbering may differ.
    bool structurally_equal(const ProbabilityTree& other) const;

private:
    friend class TreeBuilder;
    ProbabilityTree() = default;
    void finish(Bindings policy);

    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<TreeEdge> edges_;
    std::vector<std::vector<EdgeIndex>> out_;
    std::vector<std::optional<EdgeIndex>> in_;
    NodeIndex root_ = 0;
    std::map<std::string, Rational> bindings_;
    std::vector<std::vector<NodeIndex>> stage_assertions_;
    std::vector<std::optional<Rational>> prob_;
    std::vector<NodeIndex> situations_;
    std::vector<NodeIndex> leaves_;
    std::vector<std::size_t> depth_;
    std::vector<std::size_t> event_of_leaf_;
    std::vector<AtomicEvent> events_;
};

ProbabilityTree parse_tree(std::string_view text, Bindings policy = Bindings::required);
std::string serialize(const ProbabilityTree& tree);

const std::vector<AtomicEvent>& atomic_events(const ProbabilityTree& tree);
Rational path_probability(const ProbabilityTree& tree, const AtomicEvent& event);

// Probability of the event ending at each leaf, indexed like tree.events().
std::vector<Rational> event_probabilities(const ProbabilityTree& tree);

// Sorts ids so that embedded numbers compare by value: v2 < v10.
bool natural_less(std::string_view a, std::string_view b);

}  // namespace ceg
