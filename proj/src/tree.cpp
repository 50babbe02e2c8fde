#include "ceg/tree.hpp"

#include "ceg/error.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace ceg {

EdgeLabel EdgeLabel::symbol(std::string name) {
    EdgeLabel l;
    l.kind_ = Kind::symbol;
    l.name_ = std::move(name);
    return l;
}

EdgeLabel EdgeLabel::literal(Rational value) {
    EdgeLabel l;
    l.kind_ = Kind::literal;
    l.value_ = std::move(value);
    return l;
}

EdgeLabel EdgeLabel::residual() { return EdgeLabel{}; }

std::string EdgeLabel::key() const {
    switch (kind_) {
    case Kind::symbol: return name_;
    case Kind::literal: return to_string(value_);
    case Kind::residual: return "_";
    }
    return "_";
}

bool natural_less(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    while (i < a.size() && j < b.size()) {
        if (digit(a[i]) && digit(b[j])) {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && digit(a[i2])) ++i2;
            while (j2 < b.size() && digit(b[j2])) ++j2;
            auto na = a.substr(i, i2 - i), nb = b.substr(j, j2 - j);
            auto ta = na.substr(std::min(na.find_first_not_of('0'), na.size()));
            auto tb = nb.substr(std::min(nb.find_first_not_of('0'), nb.size()));
            if (ta.size() != tb.size()) return ta.size() < tb.size();
            if (ta != tb) return ta < tb;
            if (na.size() != nb.size()) return na.size() < nb.size();
            i = i2;
            j = j2;
            continue;
        }
        if (a[i] != b[j]) return a[i] < b[j];
        ++i;
        ++j;
    }
    return (a.size() - i) < (b.size() - j);
}

// ---------------------------------------------------------------- builder

void TreeBuilder::set_root(std::string id) { root_ = std::move(id); }

void TreeBuilder::add_node(std::string id) { nodes_.push_back(std::move(id)); }

void TreeBuilder::add_edge(std::string parent, std::string child, EdgeLabel label) {
    edges_.emplace_back(std::move(parent), std::move(child), std::move(label));
}

void TreeBuilder::bind(std::string symbol, Rational value) { bindings_[std::move(symbol)] = std::move(value); }

void TreeBuilder::assert_stage(std::vector<std::string> members) { stages_.push_back(std::move(members)); }

ProbabilityTree TreeBuilder::build(Bindings policy) const {
    ProbabilityTree t;
    auto intern = [&t](const std::string& name) {
        auto [it, inserted] = t.index_.emplace(name, t.names_.size());
        if (inserted) t.names_.push_back(name);
        return it->second;
    };
    if (root_) intern(*root_);
    for (const auto& n : nodes_) intern(n);
    for (const auto& [p, c, l] : edges_) {
        intern(p);
        intern(c);
    }
    t.out_.assign(t.names_.size(), {});
    t.in_.assign(t.names_.size(), std::nullopt);
    for (const auto& [p, c, l] : edges_) {
        NodeIndex pi = t.index_.at(p), ci = t.index_.at(c);
        if (pi == ci) throw ValidationError("cycle: self-loop at " + p);
        for (EdgeIndex e : t.out_[pi])
            if (t.edges_[e].child == ci) throw ValidationError("duplicate edge " + p + " -> " + c);
        if (t.in_[ci]) throw ValidationError("node " + c + " has more than one parent");
        t.in_[ci] = t.edges_.size();
        t.out_[pi].push_back(t.edges_.size());
        t.edges_.push_back({pi, ci, l});
    }
    if (t.names_.empty()) throw ValidationError("empty tree");

    std::vector<NodeIndex> parentless;
    for (NodeIndex v = 0; v < t.names_.size(); ++v)
        if (!t.in_[v]) parentless.push_back(v);
    if (root_) {
        NodeIndex r = t.index_.at(*root_);
        if (t.in_[r]) throw ValidationError("declared root " + *root_ + " has a parent");
        if (parentless.size() > 1) {
            for (NodeIndex v : parentless)
                if (v != r) throw ValidationError("multiple roots: " + *root_ + " and " + t.names_[v]);
        }
        t.root_ = r;
    } else {
        if (parentless.empty()) throw ValidationError("cycle: no node without a parent");
        if (parentless.size() > 1)
            throw ValidationError("multiple roots: " + t.names_[parentless[0]] + " and " + t.names_[parentless[1]]);
        t.root_ = parentless[0];
    }
    t.bindings_ = bindings_;
    for (const auto& [sym, val] : t.bindings_)
        if (val < 0 || val > 1) throw ValidationError("binding " + sym + " = " + to_string(val) + " outside [0,1]");
    for (const auto& block : stages_) {
        std::vector<NodeIndex> members;
        for (const auto& n : block) {
            auto it = t.index_.find(n);
            if (it == t.index_.end()) throw ValidationError("stage assertion names unknown node " + n);
            members.push_back(it->second);
        }
        t.stage_assertions_.push_back(std::move(members));
    }
    t.finish(policy);
    return t;
}

// ---------------------------------------------------------------- tree

void ProbabilityTree::finish(Bindings policy) {
    const std::size_t n = names_.size();
    depth_.assign(n, 0);
    event_of_leaf_.assign(n, static_cast<std::size_t>(-1));
    situations_.clear();
    leaves_.clear();
    events_.clear();

    // Depth-first walk in declaration order; also detects cycles via reachability.
    std::vector<char> seen(n, 0);
    std::vector<NodeIndex> path;
    struct Frame {
        NodeIndex node;
        std::size_t next;
    };
    std::vector<Frame> stack{{root_, 0}};
    seen[root_] = 1;
    path.push_back(root_);
    while (!stack.empty()) {
        auto& f = stack.back();
        if (f.next == 0) {
            if (out_[f.node].empty()) {
                event_of_leaf_[f.node] = events_.size();
                leaves_.push_back(f.node);
                events_.push_back({path});
            } else {
                situations_.push_back(f.node);
            }
        }
        if (f.next < out_[f.node].size()) {
            NodeIndex c = edges_[out_[f.node][f.next++]].child;
            seen[c] = 1;
            depth_[c] = depth_[f.node] + 1;
            path.push_back(c);
            stack.push_back({c, 0});
        } else {
            stack.pop_back();
            path.pop_back();
        }
    }
    for (NodeIndex v = 0; v < n; ++v)
        if (!seen[v]) throw ValidationError("cycle: " + names_[v] + " is not reachable from the root");

    for (const auto& block : stage_assertions_)
        for (NodeIndex v : block)
            if (out_[v].empty()) throw ValidationError("stage assertion names leaf " + names_[v]);

    prob_.assign(edges_.size(), std::nullopt);
    for (NodeIndex v : situations_) {
        std::set<std::string> symbols;
        std::optional<EdgeIndex> residual;
        Rational sum = 0;
        bool complete = true;
        for (EdgeIndex e : out_[v]) {
            const EdgeLabel& l = edges_[e].label;
            switch (l.kind()) {
            case EdgeLabel::Kind::residual:
                if (residual) throw ValidationError("more than one residual edge at " + names_[v]);
                residual = e;
                continue;
            case EdgeLabel::Kind::symbol: {
                if (!symbols.insert(l.name()).second)
                    throw ValidationError("symbol " + l.name() + " used twice at " + names_[v]);
                auto it = bindings_.find(l.name());
                if (it != bindings_.end()) prob_[e] = it->second;
                else if (policy == Bindings::required) throw ValidationError("unbound symbol " + l.name());
                break;
            }
            case EdgeLabel::Kind::literal:
                if (l.value() < 0 || l.value() > 1)
                    throw ValidationError("literal " + to_string(l.value()) + " outside [0,1] at " + names_[v]);
                prob_[e] = l.value();
                break;
            }
            if (prob_[e]) sum += *prob_[e];
            else complete = false;
        }
        if (!complete) continue;
        if (residual) {
            Rational rest = 1 - sum;
            if (rest < 0 || rest > 1)
                throw ValidationError("residual out of range at " + names_[v] + ": " + to_string(rest));
            prob_[*residual] = rest;
        } else if (sum != 1) {
            throw ValidationError("sum-to-one violation at " + names_[v] + ": sum = " + to_string(sum));
        }
    }
}

std::optional<NodeIndex> ProbabilityTree::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeIndex ProbabilityTree::at(std::string_view name) const {
    auto v = find(name);
    if (!v) throw PreconditionError("unknown node " + std::string(name));
    return *v;
}

std::vector<NodeIndex> ProbabilityTree::children(NodeIndex v) const {
    std::vector<NodeIndex> out;
    for (EdgeIndex e : out_.at(v)) out.push_back(edges_[e].child);
    return out;
}

std::optional<EdgeIndex> ProbabilityTree::edge_between(NodeIndex parent, NodeIndex child) const {
    auto e = in_.at(child);
    if (e && edges_[*e].parent == parent) return e;
    return std::nullopt;
}

std::size_t ProbabilityTree::event_of_leaf(NodeIndex leaf) const {
    std::size_t i = event_of_leaf_.at(leaf);
    if (i == static_cast<std::size_t>(-1)) throw PreconditionError(names_[leaf] + " is not a leaf");
    return i;
}

const Rational& ProbabilityTree::require_probability(EdgeIndex e) const {
    const auto& p = prob_.at(e);
    if (!p) {
        const auto& l = edges_[e].label;
        throw PreconditionError("unbound symbol " + (l.is_symbol() ? l.name() : std::string("in residual at ") +
                                                                                    names_[edges_[e].parent]));
    }
    return *p;
}

bool ProbabilityTree::fully_bound() const {
    return std::all_of(prob_.begin(), prob_.end(), [](const auto& p) { return p.has_value(); });
}

ProbabilityTree ProbabilityTree::relabelled(const std::vector<EdgeLabel>& labels, Bindings policy) const {
    if (labels.size() != edges_.size()) throw PreconditionError("relabel: label count mismatch");
    ProbabilityTree t = *this;
    for (EdgeIndex e = 0; e < edges_.size(); ++e) t.edges_[e].label = labels[e];
    t.finish(policy);
    return t;
}

bool ProbabilityTree::structurally_equal(const ProbabilityTree& other) const {
    if (names_.size() != other.names_.size() || edges_.size() != other.edges_.size()) return false;
    if (bindings_ != other.bindings_) return false;
    if (names_[root_] != other.names_[other.root_]) return false;
    for (NodeIndex v = 0; v < names_.size(); ++v) {
        auto w = other.find(names_[v]);
        if (!w) return false;
        const auto& a = out_[v];
        const auto& b = other.out_[*w];
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (names_[edges_[a[i]].child] != other.names_[other.edges_[b[i]].child]) return false;
            if (!(edges_[a[i]].label == other.edges_[b[i]].label)) return false;
        }
    }
    if (stage_assertions_.size() != other.stage_assertions_.size()) return false;
    for (std::size_t i = 0; i < stage_assertions_.size(); ++i) {
        const auto& a = stage_assertions_[i];
        const auto& b = other.stage_assertions_[i];
        if (a.size() != b.size()) return false;
        for (std::size_t j = 0; j < a.size(); ++j)
            if (names_[a[j]] != other.names_[b[j]]) return false;
    }
    return true;
}

// ---------------------------------------------------------------- DSL

namespace {

EdgeLabel parse_label(const detail::Token& tok) {
    const std::string& s = tok.text;
    if (s == "_") return EdgeLabel::residual();
    char c = s[0];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
        auto r = parse_rational(s);
        if (!r) throw ParseError("bad probability literal '" + s + "'", tok.line, tok.column);
        if (*r > 1) throw ParseError("probability literal '" + s + "' exceeds 1", tok.line, tok.column);
        return EdgeLabel::literal(*r);
    }
    return EdgeLabel::symbol(s);
}

void expect_count(const detail::Line& line, std::size_t n, const char* usage) {
    if (line.tokens.size() != n) {
        const auto& t = line.tokens.size() > n ? line.tokens[n] : line.tokens.back();
        std::size_t col = line.tokens.size() > n ? t.column : t.column + t.text.size();
        throw ParseError(std::string("expected '") + usage + "'", line.number, col);
    }
}

}  // namespace

ProbabilityTree parse_tree(std::string_view text, Bindings policy) {
    TreeBuilder b;
    std::set<std::pair<std::string, std::string>> pairs;
    std::map<std::string, std::size_t> parent_line;
    bool have_root = false;
    for (const auto& line : detail::tokenize(text)) {
        const auto& head = line.tokens[0];
        if (head.text == "root") {
            expect_count(line, 2, "root <id>");
            if (have_root) throw ParseError("second root declaration", line.number, head.column);
            have_root = true;
            b.set_root(line.tokens[1].text);
        } else if (head.text == "edge") {
            expect_count(line, 4, "edge <parent> <child> <label>");
            const auto& p = line.tokens[1].text;
            const auto& c = line.tokens[2].text;
            if (!pairs.insert({p, c}).second)
                throw ParseError("duplicate edge " + p + " -> " + c, line.number, line.tokens[1].column);
            if (auto it = parent_line.find(c); it != parent_line.end())
                throw ParseError("node " + c + " already has a parent (line " + std::to_string(it->second) + ")",
                                 line.number, line.tokens[2].column);
            parent_line[c] = line.number;
            b.add_edge(p, c, parse_label(line.tokens[3]));
        } else if (head.text == "bind") {
            expect_count(line, 4, "bind <symbol> = <value>");
            if (line.tokens[2].text != "=") throw ParseError("expected '='", line.number, line.tokens[2].column);
            auto r = parse_rational(line.tokens[3].text);
            if (!r) throw ParseError("bad value '" + line.tokens[3].text + "'", line.number, line.tokens[3].column);
            b.bind(line.tokens[1].text, *r);
        } else if (head.text == "stage") {
            if (line.tokens.size() < 2) throw ParseError("expected 'stage <id> ...'", line.number, head.column);
            std::vector<std::string> members;
            for (std::size_t i = 1; i < line.tokens.size(); ++i) members.push_back(line.tokens[i].text);
            b.assert_stage(std::move(members));
        } else if (head.text == "node") {
            expect_count(line, 2, "node <id>");
            b.add_node(line.tokens[1].text);
        } else {
            throw ParseError("unknown directive '" + head.text + "'", line.number, head.column);
        }
    }
    return b.build(policy);
}

std::string serialize(const ProbabilityTree& tree) {
    std::ostringstream out;
    out << "root " << tree.name(tree.root()) << "\n";
    // Edges in depth-first declaration order.
    std::vector<NodeIndex> stack{tree.root()};
    while (!stack.empty()) {
        NodeIndex v = stack.back();
        stack.pop_back();
        const auto& outs = tree.out_edges(v);
        for (EdgeIndex e : outs) {
            const auto& edge = tree.edge(e);
            out << "edge " << tree.name(v) << " " << tree.name(edge.child) << " " << edge.label.key() << "\n";
        }
        for (auto it = outs.rbegin(); it != outs.rend(); ++it) stack.push_back(tree.edge(*it).child);
    }
    for (const auto& [sym, val] : tree.bindings()) out << "bind " << sym << " = " << to_string(val) << "\n";
    for (const auto& block : tree.stage_assertions()) {
        out << "stage";
        for (NodeIndex v : block) out << " " << tree.name(v);
        out << "\n";
    }
    return out.str();
}

const std::vector<AtomicEvent>& atomic_events(const ProbabilityTree& tree) { return tree.events(); }

Rational path_probability(const ProbabilityTree& tree, const AtomicEvent& event) {
    if (event.path.empty() || event.path.front() != tree.root())
        throw PreconditionError("event does not start at the root");
    Rational p = 1;
    for (std::size_t i = 1; i < event.path.size(); ++i) {
        if (event.path[i] >= tree.node_count()) throw PreconditionError("event not in tree");
        auto e = tree.edge_between(event.path[i - 1], event.path[i]);
        if (!e) throw PreconditionError("event not in tree: no edge into " + tree.name(event.path[i]));
        p *= tree.require_probability(*e);
    }
    if (!tree.is_leaf(event.path.back())) throw PreconditionError("event does not end at a leaf");
    return p;
}

std::vector<Rational> event_probabilities(const ProbabilityTree& tree) {
    // One pass down the tree instead of a product per event.
    std::vector<Rational> reach(tree.node_count());
    reach[tree.root()] = 1;
    for (NodeIndex v : tree.situations())
        for (EdgeIndex e : tree.out_edges(v)) reach[tree.edge(e).child] = reach[v] * tree.require_probability(e);
    std::vector<Rational> out;
    out.reserve(tree.leaves().size());
    for (NodeIndex leaf : tree.leaves()) out.push_back(reach[leaf]);
    return out;
}

}  // namespace ceg
