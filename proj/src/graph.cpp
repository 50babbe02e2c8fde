#include "ceg/graph.hpp"

#include "ceg/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace ceg {

// ---------------------------------------------------------------- graph

void ChainEventGraph::index() {
    out_.assign(vertices.size(), {});
    in_.assign(vertices.size(), {});
    for (CegEdgeIndex e = 0; e < edges.size(); ++e) {
        out_[edges[e].from].push_back(e);
        in_[edges[e].to].push_back(e);
    }
    // Kahn's algorithm, ties broken by vertex index.
    std::vector<std::size_t> indeg(vertices.size());
    for (const auto& e : edges) ++indeg[e.to];
    std::set<VertexIndex> ready;
    for (VertexIndex v = 0; v < vertices.size(); ++v)
        if (indeg[v] == 0) ready.insert(v);
    topo_.clear();
    while (!ready.empty()) {
        VertexIndex v = *ready.begin();
        ready.erase(ready.begin());
        topo_.push_back(v);
        for (CegEdgeIndex e : out_[v])
            if (--indeg[edges[e].to] == 0) ready.insert(edges[e].to);
    }
    if (topo_.size() != vertices.size()) throw ValidationError("graph has a directed cycle");

    display_.clear();
    for (VertexIndex v = 0; v < vertices.size(); ++v) {
        const auto& vx = vertices[v];
        if (vx.names.empty()) {
            display_.push_back(vx.id);
            continue;
        }
        std::string s = "[";
        for (std::size_t i = 0; i < vx.names.size(); ++i) s += (i ? "," : "") + vx.names[i];
        display_.push_back(s + "]");
    }
}

std::optional<VertexIndex> ChainEventGraph::find(std::string_view id) const {
    for (VertexIndex v = 0; v < vertices.size(); ++v)
        if (vertices[v].id == id) return v;
    return std::nullopt;
}

VertexIndex ChainEventGraph::at(std::string_view id) const {
    auto v = find(id);
    if (!v) throw PreconditionError("unknown position " + std::string(id));
    return *v;
}

bool ChainEventGraph::same_stage(VertexIndex a, VertexIndex b) const {
    if (a == b) return true;
    return vertices.at(a).stage >= 0 && vertices[a].stage == vertices.at(b).stage;
}

std::string ChainEventGraph::display(VertexIndex v) const { return display_.at(v); }

// ---------------------------------------------------------------- build

ChainEventGraph build_ceg(const ProbabilityTree& tree, const PositionPartition& positions,
                          const StagePartition& stages) {
    ChainEventGraph g;
    const auto& blocks = positions.blocks;
    for (NodeIndex v : tree.situations())
        if (tree.name(v) == sink_id) throw ValidationError(std::string(sink_id) + " is reserved for the sink");

    // Vertex order: breadth-first from the root over representatives'
    // out-edges in declaration order; the sink last.
    std::vector<VertexIndex> vertex_of_block(blocks.size(), npos);
    std::vector<std::size_t> order;
    if (!tree.is_leaf(tree.root())) {
        std::deque<std::size_t> queue{static_cast<std::size_t>(positions.block_of[tree.root()])};
        vertex_of_block[queue.front()] = 0;
        order.push_back(queue.front());
        while (!queue.empty()) {
            std::size_t b = queue.front();
            queue.pop_front();
            for (EdgeIndex e : tree.out_edges(blocks[b].front())) {
                NodeIndex c = tree.edge(e).child;
                if (tree.is_leaf(c)) continue;
                auto cb = static_cast<std::size_t>(positions.block_of[c]);
                if (vertex_of_block[cb] != npos) continue;
                vertex_of_block[cb] = order.size();
                order.push_back(cb);
                queue.push_back(cb);
            }
        }
    }
    for (std::size_t b : order) {
        CegVertex vx;
        vx.id = tree.name(blocks[b].front());
        vx.members = blocks[b];
        for (NodeIndex m : blocks[b]) vx.names.push_back(tree.name(m));
        vx.stage = stages.block_of.at(blocks[b].front());
        g.vertices.push_back(std::move(vx));
    }
    g.sink = g.vertices.size();
    g.vertices.push_back({sink_id, {}, {}, -2, npos});
    g.root = 0;

    g.vertex_of_node.assign(tree.node_count(), g.sink);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (NodeIndex v : blocks[b]) g.vertex_of_node[v] = vertex_of_block[b];

    auto target_of = [&](EdgeIndex e) { return g.vertex_of_node[tree.edge(e).child]; };
    g.edge_of_tree_edge.assign(tree.edge_count(), npos);
    for (std::size_t vi = 0; vi + 1 < g.vertices.size(); ++vi) {
        const auto& members = g.vertices[vi].members;
        NodeIndex rep = members.front();
        std::map<std::pair<std::string, VertexIndex>, std::vector<CegEdgeIndex>> slots;
        for (EdgeIndex e : tree.out_edges(rep)) {
            const auto& te = tree.edge(e);
            CegEdge ce{vi, target_of(e), te.label, stages.slot_key[e], tree.probability(e), npos};
            slots[{ce.key, ce.to}].push_back(g.edges.size());
            g.edge_of_tree_edge[e] = g.edges.size();
            g.edges.push_back(std::move(ce));
        }
        // Match every other member's edges to the representative's by
        // (slot key, target); equal pairs are interchangeable.
        for (std::size_t m = 1; m < members.size(); ++m) {
            std::map<std::pair<std::string, VertexIndex>, std::size_t> used;
            for (EdgeIndex e : tree.out_edges(members[m])) {
                std::pair<std::string, VertexIndex> k{stages.slot_key[e], target_of(e)};
                auto it = slots.find(k);
                std::size_t& n = used[k];
                if (it == slots.end() || n >= it->second.size())
                    throw ValidationError("position " + g.vertices[vi].id + " is inconsistent at " +
                                          tree.name(members[m]));
                g.edge_of_tree_edge[e] = it->second[n++];
            }
        }
    }
    for (VertexIndex a = 0; a < g.sink; ++a)
        for (VertexIndex b = a + 1; b < g.sink; ++b)
            if (g.vertices[a].stage == g.vertices[b].stage) g.undirected.emplace_back(a, b);
    g.index();
    return g;
}

CegModel build_model(ProbabilityTree tree, StageMode mode) {
    auto stages = compute_stages(tree, mode);
    auto positions = compute_positions(tree, stages);
    auto graph = build_ceg(tree, positions, stages);
    std::vector<CegPath> paths;
    for (const auto& ev : tree.events()) {
        CegPath p;
        for (std::size_t i = 1; i < ev.path.size(); ++i)
            p.push_back(graph.edge_of_tree_edge[*tree.in_edge(ev.path[i])]);
        paths.push_back(std::move(p));
    }
    return CegModel{std::move(tree), std::move(stages), std::move(positions), std::move(graph), std::move(paths)};
}

// ---------------------------------------------------------------- paths

std::vector<CegPath> ceg_paths(const ChainEventGraph& g) {
    std::vector<CegPath> out;
    if (g.root == g.sink) {
        out.push_back({});
        return out;
    }
    CegPath current;
    struct Frame {
        VertexIndex v;
        std::size_t next;
    };
    std::vector<Frame> stack{{g.root, 0}};
    while (!stack.empty()) {
        auto& f = stack.back();
        if (f.v == g.sink) {
            out.push_back(current);
            stack.pop_back();
            if (!current.empty()) current.pop_back();
            continue;
        }
        const auto& outs = g.out(f.v);
        if (f.next < outs.size()) {
            CegEdgeIndex e = outs[f.next++];
            current.push_back(e);
            stack.push_back({g.edges[e].to, 0});
        } else {
            stack.pop_back();
            if (!current.empty()) current.pop_back();
        }
    }
    return out;
}

Rational path_probability(const ChainEventGraph& g, const CegPath& path) {
    Rational p = 1;
    for (CegEdgeIndex e : path) {
        const auto& prob = g.edges.at(e).prob;
        if (!prob) throw PreconditionError("unbound label " + g.edges[e].key + " on the path");
        p *= *prob;
    }
    return p;
}

Rational event_probability(const ChainEventGraph& g, const std::vector<CegPath>& paths) {
    Rational total = 0;
    for (const auto& p : paths) total += path_probability(g, p);
    return total;
}

std::vector<VertexIndex> path_vertices(const ChainEventGraph& g, const CegPath& path) {
    std::vector<VertexIndex> out{g.root};
    for (CegEdgeIndex e : path) out.push_back(g.edges.at(e).to);
    return out;
}

std::vector<CegPath> passes_through(const ChainEventGraph& g, VertexIndex w) {
    if (w >= g.vertex_count()) throw PreconditionError("unknown position");
    if (w == g.sink) throw PreconditionError("the sink is not a valid position argument");
    std::vector<CegPath> out;
    for (auto& p : ceg_paths(g)) {
        auto vs = path_vertices(g, p);
        if (std::find(vs.begin(), vs.end(), w) != vs.end()) out.push_back(std::move(p));
    }
    return out;
}

std::vector<Rational> reach_probabilities(const ChainEventGraph& g) {
    std::vector<Rational> reach(g.vertex_count());
    reach[g.root] = 1;
    for (VertexIndex v : g.topological_order())
        for (CegEdgeIndex e : g.out(v)) {
            const auto& p = g.edges[e].prob;
            if (!p) throw PreconditionError("unbound label " + g.edges[e].key);
            reach[g.edges[e].to] += reach[v] * *p;
        }
    return reach;
}

std::vector<char> can_reach(const ChainEventGraph& g, VertexIndex w) {
    std::vector<char> r(g.vertex_count(), 0);
    r.at(w) = 1;
    const auto& topo = g.topological_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it)
        for (CegEdgeIndex e : g.out(*it))
            if (r[g.edges[e].to]) r[*it] = 1;
    return r;
}

// ---------------------------------------------------------------- predicates

bool is_c_regular(const ChainEventGraph& g, const std::vector<VertexIndex>& W) {
    std::set<VertexIndex> members(W.begin(), W.end());
    for (VertexIndex w : members) {
        if (w >= g.vertex_count()) throw PreconditionError("unknown position");
        // Anything strictly below w that is also in W puts both on one path.
        std::vector<char> below(g.vertex_count(), 0);
        std::vector<VertexIndex> stack{w};
        while (!stack.empty()) {
            VertexIndex v = stack.back();
            stack.pop_back();
            for (CegEdgeIndex e : g.out(v)) {
                VertexIndex c = g.edges[e].to;
                if (below[c]) continue;
                below[c] = 1;
                if (members.count(c)) return false;
                stack.push_back(c);
            }
        }
    }
    return true;
}

std::vector<VertexIndex> parents_of(const ChainEventGraph& g, const std::vector<VertexIndex>& W) {
    std::set<VertexIndex> pa;
    for (VertexIndex w : W)
        for (CegEdgeIndex e : g.in(w)) pa.insert(g.edges[e].from);
    return {pa.begin(), pa.end()};
}

bool is_manipulation_set(const ChainEventGraph& g, const std::vector<VertexIndex>& W) {
    if (W.empty()) return false;
    std::set<VertexIndex> members(W.begin(), W.end());
    for (VertexIndex w : members)
        if (w >= g.vertex_count() || w == g.sink) throw PreconditionError("manipulation set must hold positions");
    // A member without a parent (the root) can never be reached through pa(W).
    for (VertexIndex w : members)
        if (g.in(w).empty()) return false;
    auto pa = parents_of(g, W);
    if (pa.empty()) return false;
    std::set<VertexIndex> pa_set(pa.begin(), pa.end());
    for (const auto& p : ceg_paths(g)) {
        std::size_t hits = 0;
        for (VertexIndex v : path_vertices(g, p)) hits += pa_set.count(v);
        if (hits != 1) return false;
    }
    for (VertexIndex p : pa) {
        std::set<VertexIndex> kids;
        for (CegEdgeIndex e : g.out(p))
            if (members.count(g.edges[e].to)) kids.insert(g.edges[e].to);
        if (kids.size() != 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------- sub-CEG

ChainEventGraph sub_ceg(const ChainEventGraph& g, const std::vector<VertexIndex>& W) {
    if (!is_c_regular(g, W)) throw PreconditionError("sub_ceg needs a C-regular set");
    auto reach = reach_probabilities(g);
    Rational total = 0;
    for (VertexIndex w : W) total += reach[w];
    if (total == 0) throw PreconditionError("sub_ceg needs P(W) > 0");
    std::vector<Rational> probs;
    for (VertexIndex w : W) probs.push_back(reach[w] / total);
    return sub_ceg(g, W, probs);
}

ChainEventGraph sub_ceg(const ChainEventGraph& g, const std::vector<VertexIndex>& W,
                        const std::vector<Rational>& root_probs) {
    if (W.empty()) throw PreconditionError("sub_ceg needs a non-empty set");
    if (root_probs.size() != W.size()) throw PreconditionError("sub_ceg: one root probability per member");
    if (!is_c_regular(g, W)) throw PreconditionError("sub_ceg needs a C-regular set");
    for (VertexIndex w : W)
        if (w == g.sink) throw PreconditionError("sub_ceg: the sink cannot be a member");

    std::vector<char> keep(g.vertex_count(), 0);
    std::vector<VertexIndex> stack(W.begin(), W.end());
    for (VertexIndex w : W) keep[w] = 1;
    while (!stack.empty()) {
        VertexIndex v = stack.back();
        stack.pop_back();
        for (CegEdgeIndex e : g.out(v))
            if (!keep[g.edges[e].to]) {
                keep[g.edges[e].to] = 1;
                stack.push_back(g.edges[e].to);
            }
    }
    ChainEventGraph s;
    s.vertices.push_back({"w0*", {}, {}, -3, npos});
    std::vector<VertexIndex> map(g.vertex_count(), npos);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        if (!keep[v] || v == g.sink) continue;
        map[v] = s.vertices.size();
        auto vx = g.vertices[v];
        vx.origin = v;
        s.vertices.push_back(std::move(vx));
    }
    map[g.sink] = s.vertices.size();
    s.vertices.push_back({sink_id, {}, {}, -2, g.sink});
    s.root = 0;
    s.sink = map[g.sink];
    for (std::size_t i = 0; i < W.size(); ++i)
        s.edges.push_back({0, map[W[i]], EdgeLabel::literal(root_probs[i]), to_string(root_probs[i]), root_probs[i],
                           npos});
    for (CegEdgeIndex e = 0; e < g.edges.size(); ++e) {
        const auto& ed = g.edges[e];
        if (!keep[ed.from]) continue;
        auto copy = ed;
        copy.from = map[ed.from];
        copy.to = map[ed.to];
        copy.origin = e;
        s.edges.push_back(std::move(copy));
    }
    for (auto [a, b] : g.undirected)
        if (keep[a] && keep[b]) s.undirected.emplace_back(map[a], map[b]);
    s.index();
    return s;
}

// ---------------------------------------------------------------- upstream

UpstreamGraph upstream_graph(const ChainEventGraph& g, VertexIndex w) {
    return upstream_graph(g, std::vector<VertexIndex>{w});
}

UpstreamGraph upstream_graph(const ChainEventGraph& g, const std::vector<VertexIndex>& W) {
    UpstreamGraph u;
    u.targets = W;
    std::vector<char> reaches(g.vertex_count(), 0);
    for (VertexIndex w : W) {
        if (w >= g.vertex_count()) throw PreconditionError("unknown position");
        auto r = can_reach(g, w);
        for (VertexIndex v = 0; v < r.size(); ++v) reaches[v] |= r[v];
    }
    std::vector<char> is_target(g.vertex_count(), 0);
    for (VertexIndex w : W) is_target[w] = 1;
    for (VertexIndex v : g.topological_order())
        if (reaches[v]) u.vertices.push_back(v);
    // Edges on root-to-target paths; nothing leaves a target.
    std::map<VertexIndex, std::multiset<std::string>> kept;
    for (CegEdgeIndex e = 0; e < g.edges.size(); ++e) {
        const auto& ed = g.edges[e];
        if (reaches[ed.to] && !is_target[ed.from]) {
            u.edges.push_back(e);
            kept[ed.from].insert(ed.key);
        }
    }
    for (std::size_t i = 0; i < u.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < u.vertices.size(); ++j) {
            VertexIndex a = u.vertices[i], b = u.vertices[j];
            if (g.same_stage(a, b) && kept[a] != kept[b]) u.is_ceg = false;
        }
    return u;
}

std::vector<VertexIndex> upstream_positions(const ChainEventGraph& g, const std::vector<VertexIndex>& W) {
    auto u = upstream_graph(g, W);
    std::set<VertexIndex> targets(W.begin(), W.end());
    std::vector<VertexIndex> out;
    for (VertexIndex v : u.vertices)
        if (!targets.count(v)) out.push_back(v);
    return out;
}

// ---------------------------------------------------------------- DOT

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string export_dot(const ChainEventGraph& g) {
    std::ostringstream out;
    out << "digraph ceg {\n  rankdir=LR;\n";
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        const auto& vx = g.vertices[v];
        out << "  " << quote(vx.id) << " [label=" << quote(g.display(v));
        if (v == g.sink) out << ", shape=doublecircle";
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        std::string label = e.label.key();
        if (e.prob && !e.label.is_literal()) label += " = " + to_string(*e.prob);
        out << "  " << quote(g.vertices[e.from].id) << " -> " << quote(g.vertices[e.to].id)
            << " [label=" << quote(label) << "];\n";
    }
    for (auto [a, b] : g.undirected)
        out << "  " << quote(g.vertices[a].id) << " -> " << quote(g.vertices[b].id)
            << " [dir=none, style=dashed, constraint=false];\n";
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------- helpers

std::vector<char> events_through(const CegModel& m, VertexIndex v) {
    std::vector<char> mask(m.event_paths.size(), 0);
    for (std::size_t i = 0; i < m.event_paths.size(); ++i) {
        if (v == m.graph.root) {
            mask[i] = 1;
            continue;
        }
        for (CegEdgeIndex e : m.event_paths[i])
            if (m.graph.edges[e].to == v) {
                mask[i] = 1;
                break;
            }
    }
    return mask;
}

VertexIndex resolve_position(const CegModel& m, std::string_view name) {
    if (auto v = m.graph.find(name)) return *v;
    auto node = m.tree.find(name);
    if (!node) throw PreconditionError("unknown position " + std::string(name));
    if (m.tree.is_leaf(*node)) throw PreconditionError(std::string(name) + " is a leaf, not a position");
    return m.graph.vertex_of_node[*node];
}

}  // namespace ceg
