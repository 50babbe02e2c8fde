#include "ceg/intervention.hpp"

#include "ceg/error.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace ceg {

std::set<NodeIndex> Manipulation::domain() const {
    std::set<NodeIndex> d;
    for (const auto& [v, dist] : replacements) d.insert(v);
    return d;
}

// ---------------------------------------------------------------- DSL

Manipulation parse_manipulation(std::string_view text, const ProbabilityTree& tree) {
    Manipulation m;
    std::map<NodeIndex, std::size_t> first_line;
    auto node = [&](const detail::Token& t) {
        auto v = tree.find(t.text);
        if (!v) throw ParseError("unknown node " + t.text, t.line, t.column);
        return *v;
    };
    auto slot = [&](NodeIndex v, const detail::Token& child) {
        NodeIndex c = node(child);
        const auto& outs = tree.out_edges(v);
        for (std::size_t i = 0; i < outs.size(); ++i)
            if (tree.edge(outs[i]).child == c) return i;
        throw ParseError(child.text + " is not a child of " + tree.name(v), child.line, child.column);
    };
    std::map<NodeIndex, std::vector<char>> assigned;
    for (const auto& line : detail::tokenize(text)) {
        const auto& head = line.tokens[0];
        if (head.text == "set") {
            if (line.tokens.size() != 4)
                throw ParseError("expected 'set <situation> <child> <p/q>'", line.number, head.column);
            NodeIndex v = node(line.tokens[1]);
            if (tree.is_leaf(v))
                throw ParseError(line.tokens[1].text + " is a leaf", line.number, line.tokens[1].column);
            std::size_t i = slot(v, line.tokens[2]);
            auto r = parse_rational(line.tokens[3].text);
            if (!r || *r > 1)
                throw ParseError("bad probability '" + line.tokens[3].text + "'", line.number, line.tokens[3].column);
            auto& dist = m.replacements[v];
            auto& seen = assigned[v];
            if (dist.empty()) {
                dist.assign(tree.out_edges(v).size(), Rational(0));
                seen.assign(dist.size(), 0);
            }
            if (seen[i])
                throw ParseError("probability for " + line.tokens[2].text + " set twice", line.number,
                                 line.tokens[2].column);
            seen[i] = 1;
            dist[i] = *r;
        } else if (head.text == "force") {
            if (line.tokens.size() != 4 || line.tokens[2].text != "->")
                throw ParseError("expected 'force <situation> -> <child>'", line.number, head.column);
            NodeIndex v = node(line.tokens[1]);
            if (tree.is_leaf(v))
                throw ParseError(line.tokens[1].text + " is a leaf", line.number, line.tokens[1].column);
            if (m.replacements.count(v))
                throw ParseError(line.tokens[1].text + " is manipulated twice", line.number, line.tokens[1].column);
            std::size_t i = slot(v, line.tokens[3]);
            std::vector<Rational> dist(tree.out_edges(v).size(), Rational(0));
            dist[i] = 1;
            m.replacements[v] = std::move(dist);
            assigned[v].assign(m.replacements[v].size(), 1);
        } else {
            throw ParseError("unknown directive '" + head.text + "'", line.number, head.column);
        }
    }
    validate_manipulation(m, tree);
    return m;
}

std::string serialize_manipulation(const Manipulation& m, const ProbabilityTree& tree) {
    auto domain = m.domain();
    std::vector<NodeIndex> order(domain.begin(), domain.end());
    std::sort(order.begin(), order.end(),
              [&](NodeIndex a, NodeIndex b) { return natural_less(tree.name(a), tree.name(b)); });
    std::ostringstream out;
    for (NodeIndex v : order) {
        const auto& dist = m.replacements.at(v);
        const auto& outs = tree.out_edges(v);
        auto one = std::find(dist.begin(), dist.end(), Rational(1));
        if (one != dist.end()) {
            out << "force " << tree.name(v) << " -> " << tree.name(tree.edge(outs[one - dist.begin()]).child) << "\n";
            continue;
        }
        for (std::size_t i = 0; i < outs.size(); ++i)
            out << "set " << tree.name(v) << " " << tree.name(tree.edge(outs[i]).child) << " " << to_string(dist[i])
                << "\n";
    }
    return out.str();
}

void validate_manipulation(const Manipulation& m, const ProbabilityTree& tree) {
    for (const auto& [v, dist] : m.replacements) {
        if (v >= tree.node_count()) throw ValidationError("manipulation names an unknown situation");
        if (tree.is_leaf(v)) throw ValidationError("manipulation names leaf " + tree.name(v));
        if (dist.size() != tree.out_edges(v).size())
            throw ValidationError("replacement at " + tree.name(v) + " does not cover its children");
        Rational sum = 0;
        for (const auto& p : dist) {
            if (p < 0 || p > 1) throw ValidationError("replacement at " + tree.name(v) + " leaves [0,1]");
            sum += p;
        }
        if (sum != 1)
            throw ValidationError("replacement at " + tree.name(v) + " sums to " + to_string(sum) + ", not 1");
    }
}

ProbabilityTree apply(const ProbabilityTree& tree, const Manipulation& m) {
    validate_manipulation(m, tree);
    std::vector<EdgeLabel> labels;
    labels.reserve(tree.edge_count());
    for (const auto& e : tree.edges()) labels.push_back(e.label);
    for (const auto& [v, dist] : m.replacements) {
        const auto& outs = tree.out_edges(v);
        for (std::size_t i = 0; i < outs.size(); ++i) labels[outs[i]] = EdgeLabel::literal(dist[i]);
    }
    TreeBuilder b;
    b.set_root(tree.name(tree.root()));
    for (const auto& e : tree.edges())
        b.add_edge(tree.name(e.parent), tree.name(e.child), labels[&e - tree.edges().data()]);
    for (const auto& [sym, val] : tree.bindings()) b.bind(sym, val);
    return b.build(Bindings::optional);
}

// ---------------------------------------------------------------- flags

namespace {

bool coarsens(const std::vector<std::vector<NodeIndex>>& before, const std::vector<int>& after_block) {
    for (const auto& block : before)
        for (NodeIndex v : block)
            if (after_block[v] != after_block[block.front()]) return false;
    return true;
}

}  // namespace

bool is_positioned(const ProbabilityTree& tree, const Manipulation& m, StageMode mode) {
    auto after = apply(tree, m);
    auto s0 = compute_stages(tree, mode);
    auto s1 = compute_stages(after, mode);
    auto p0 = compute_positions(tree, s0);
    auto p1 = compute_positions(after, s1);
    // Node numbering is shared: apply() rebuilds in the same declaration order.
    return coarsens(p0.blocks, p1.block_of);
}

bool is_staged(const ProbabilityTree& tree, const Manipulation& m, StageMode mode) {
    auto after = apply(tree, m);
    return coarsens(compute_stages(tree, mode).blocks, compute_stages(after, mode).block_of);
}

Manipulation pure_manipulation(const CegModel& model, const std::vector<VertexIndex>& W) {
    const auto& g = model.graph;
    if (!is_manipulation_set(g, W)) throw PreconditionError("pure_manipulation: W is not a manipulation set");
    std::set<VertexIndex> members(W.begin(), W.end());
    Manipulation m;
    for (VertexIndex p : parents_of(g, W)) {
        VertexIndex target = npos;
        std::vector<CegEdgeIndex> into;
        for (CegEdgeIndex e : g.out(p))
            if (members.count(g.edges[e].to)) {
                target = g.edges[e].to;
                into.push_back(e);
            }
        std::map<CegEdgeIndex, Rational> share;
        if (into.size() == 1) {
            share[into.front()] = 1;
        } else {
            Rational total = 0;
            for (CegEdgeIndex e : into) {
                if (!g.edges[e].prob) throw PreconditionError("pure_manipulation: parallel edges need bound labels");
                total += *g.edges[e].prob;
            }
            if (total == 0) throw PreconditionError("pure_manipulation: no mass on the edges into the target");
            for (CegEdgeIndex e : into) share[e] = *g.edges[e].prob / total;
        }
        (void)target;
        for (NodeIndex s : g.vertices[p].members) {
            std::vector<Rational> dist;
            for (EdgeIndex t : model.tree.out_edges(s)) {
                auto it = share.find(g.edge_of_tree_edge[t]);
                dist.push_back(it == share.end() ? Rational(0) : it->second);
            }
            m.replacements[s] = std::move(dist);
        }
    }
    if (!is_positioned(model.tree, m)) throw std::logic_error("pure manipulation is not positioned");
    return m;
}

// ---------------------------------------------------------------- views

ManipulatedView manipulated_view(const CegModel& idle, const CegModel& manipulated) {
    const auto& g = idle.graph;
    const auto& mt = manipulated.tree;
    ManipulatedView view{g, std::vector<char>(g.vertex_count(), 1), std::vector<char>(g.edges.size(), 0)};
    std::vector<std::vector<EdgeIndex>> tree_edges(g.edges.size());
    for (EdgeIndex t = 0; t < idle.tree.edge_count(); ++t) tree_edges[g.edge_of_tree_edge[t]].push_back(t);

    for (CegEdgeIndex e = 0; e < g.edges.size(); ++e) {
        const auto& ts = tree_edges[e];
        for (EdgeIndex t : ts)
            if (idle.tree.probability(t) != mt.probability(t) ||
                (!mt.probability(t) && !(idle.tree.edge(t).label == mt.edge(t).label)))
                view.changed_edge[e] = 1;
        bool agree = true;
        for (EdgeIndex t : ts)
            if (mt.probability(t) != mt.probability(ts.front()) ||
                manipulated.stages.slot_key[t] != manipulated.stages.slot_key[ts.front()])
                agree = false;
        if (!agree) view.uniform[g.edges[e].from] = 0;
        auto& ve = view.graph.edges[e];
        ve.label = mt.edge(ts.front()).label;
        ve.key = manipulated.stages.slot_key[ts.front()];
        ve.prob = mt.probability(ts.front());
    }
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        auto& vx = view.graph.vertices[v];
        if (v == g.sink) continue;
        int stage = manipulated.stages.block_of[vx.members.front()];
        for (NodeIndex s : vx.members)
            if (manipulated.stages.block_of[s] != stage) view.uniform[v] = 0;
        vx.stage = view.uniform[v] ? stage : -1000 - static_cast<int>(v);
        if (!view.uniform[v])
            for (CegEdgeIndex e : g.out(v)) {
                view.graph.edges[e].prob.reset();
                view.graph.edges[e].key = "?" + std::to_string(e);
            }
    }
    view.graph.undirected.clear();
    for (VertexIndex a = 0; a < g.sink; ++a)
        for (VertexIndex b = a + 1; b < g.sink; ++b)
            if (view.graph.vertices[a].stage >= 0 && view.graph.vertices[a].stage == view.graph.vertices[b].stage)
                view.graph.undirected.emplace_back(a, b);
    view.graph.index();
    return view;
}

// ---------------------------------------------------------------- forcing

namespace {

std::vector<char> scope_mask(const CegModel& m, const std::vector<VertexIndex>& roots) {
    if (roots.empty()) return std::vector<char>(m.event_paths.size(), 1);
    std::vector<char> mask(m.event_paths.size(), 0);
    for (VertexIndex r : roots) {
        auto through = events_through(m, r);
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] |= through[i];
    }
    return mask;
}

std::vector<char> union_through(const CegModel& m, const std::vector<VertexIndex>& W) {
    std::vector<char> mask(m.event_paths.size(), 0);
    for (VertexIndex w : W) {
        auto through = events_through(m, w);
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] |= through[i];
    }
    return mask;
}

std::string event_name(const CegModel& m, std::size_t ev) { return m.tree.name(m.tree.leaves()[ev]); }

}  // namespace

Check forced_check(const CegModel& idle, const CegModel& manipulated, const std::vector<VertexIndex>& W,
                   const std::vector<VertexIndex>& scope_roots) {
    Check c{"forced_to_W", true, ""};
    auto scope = scope_mask(idle, scope_roots);
    auto through = union_through(idle, W);
    auto probs = event_probabilities(manipulated.tree);
    Rational in_scope = 0, in_w = 0;
    std::optional<std::size_t> escape;
    for (std::size_t ev = 0; ev < probs.size(); ++ev) {
        if (!scope[ev]) continue;
        in_scope += probs[ev];
        if (through[ev]) in_w += probs[ev];
        else if (probs[ev] > 0 && !escape) escape = ev;
    }
    if (in_scope == 0) {
        c.passed = false;
        c.witness = "the scope has manipulated probability 0";
        return c;
    }
    if (in_w != in_scope) {
        c.passed = false;
        c.witness = "manipulated mass " + to_string(in_w / in_scope) + " reaches W; the event ending at " +
                    event_name(idle, *escape) + " avoids W with positive probability";
        return c;
    }
    // Everything at or after W keeps its idle primitives.
    const auto& g = idle.graph;
    std::vector<char> after(g.vertex_count(), 0);
    std::vector<VertexIndex> stack(W.begin(), W.end());
    for (VertexIndex w : W) after[w] = 1;
    while (!stack.empty()) {
        VertexIndex v = stack.back();
        stack.pop_back();
        for (CegEdgeIndex e : g.out(v))
            if (!after[g.edges[e].to]) {
                after[g.edges[e].to] = 1;
                stack.push_back(g.edges[e].to);
            }
    }
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        if (!after[v] || v == g.sink) continue;
        for (NodeIndex s : g.vertices[v].members)
            for (EdgeIndex t : idle.tree.out_edges(s))
                if (idle.tree.probability(t) != manipulated.tree.probability(t)) {
                    c.passed = false;
                    c.witness = "primitive out of " + idle.tree.name(s) + " (position " + g.display(v) +
                                ", at or after W) was changed";
                    return c;
                }
    }
    return c;
}

bool is_forced_to(const CegModel& idle, const Manipulation& m, VertexIndex w) {
    auto manipulated = build_model(apply(idle.tree, m));
    return forced_check(idle, manipulated, {w}).passed;
}

// ---------------------------------------------------------------- simple sets

SimpleClassification classify_simple(const ChainEventGraph& g, const std::vector<VertexIndex>& W_in) {
    SimpleClassification out;
    auto fail = [&](const std::string& name, const std::string& witness) {
        out.split.reset();
        out.failed = name;
        out.witness = witness;
        return out;
    };
    if (W_in.empty()) return fail("regular", "W is empty");
    std::vector<VertexIndex> W(W_in);
    std::sort(W.begin(), W.end());
    W.erase(std::unique(W.begin(), W.end()), W.end());
    for (VertexIndex w : W)
        if (w >= g.vertex_count() || w == g.sink) throw PreconditionError("classify_simple: W must hold positions");
    if (!is_c_regular(g, W)) return fail("regular", "two members of W lie on one directed path");

    std::vector<std::vector<char>> reach;
    for (VertexIndex w : W) reach.push_back(can_reach(g, w));

    auto all_bound = [&] {
        return std::all_of(g.edges.begin(), g.edges.end(), [](const CegEdge& e) { return e.prob.has_value(); });
    }();

    ActiveBackgroundSplit split;
    if (W.size() == 1) {
        // Vacuous case: no active positions, everything upstream is background.
        for (VertexIndex u = 0; u < g.vertex_count(); ++u)
            if (reach[0][u] && u != W[0]) split.background.push_back(u);
        split.common_active_factor = Rational(1);
        if (all_bound) split.background_mass[W[0]] = reach_probabilities(g)[W[0]];
        out.split = std::move(split);
        return out;
    }

    enum class Role { unset, active, background };
    std::vector<Role> role(g.vertex_count(), Role::unset);
    for (std::size_t i = 0; i < W.size(); ++i) {
        for (VertexIndex u = 0; u < g.vertex_count(); ++u) {
            if (!reach[i][u] || u == W[i]) continue;
            std::size_t kept = 0, outdeg = g.out(u).size();
            for (CegEdgeIndex e : g.out(u)) kept += reach[i][g.edges[e].to] ? 1 : 0;
            Role r;
            if (kept == outdeg) r = Role::background;
            else if (kept == 1) r = Role::active;
            else
                return fail("retention", "position " + g.display(u) + " keeps " + std::to_string(kept) + " of " +
                                             std::to_string(outdeg) + " edges toward " + g.display(W[i]));
            if (role[u] != Role::unset && role[u] != r)
                return fail("retention", "position " + g.display(u) + " is active toward one member of W and "
                                         "background toward another");
            role[u] = r;
        }
    }
    for (VertexIndex u = 0; u < g.vertex_count(); ++u) {
        if (role[u] == Role::active) split.active.push_back(u);
        if (role[u] == Role::background) split.background.push_back(u);
    }

    struct Walk {
        std::size_t member;            // index into W
        CegPath path;
        std::vector<CegEdgeIndex> active;  // kept edge of each active position, in order
        std::vector<VertexIndex> background;
    };
    std::vector<Walk> walks;
    for (std::size_t i = 0; i < W.size(); ++i) {
        CegPath current;
        std::function<void(VertexIndex)> dfs = [&](VertexIndex v) {
            if (v == W[i]) {
                Walk wk{i, current, {}, {}};
                for (CegEdgeIndex e : current) {
                    VertexIndex u = g.edges[e].from;
                    if (role[u] == Role::active) wk.active.push_back(e);
                    else wk.background.push_back(u);
                }
                walks.push_back(std::move(wk));
                return;
            }
            for (CegEdgeIndex e : g.out(v))
                if (reach[i][g.edges[e].to]) {
                    current.push_back(e);
                    dfs(g.edges[e].to);
                    current.pop_back();
                }
        };
        dfs(g.root);
    }

    auto describe = [&](const Walk& wk) {
        std::string s;
        for (VertexIndex v : path_vertices(g, wk.path)) s += (s.empty() ? "" : " -> ") + g.display(v);
        return s;
    };
    const Walk& first = walks.front();
    split.levels = first.active.size();
    for (const auto& wk : walks) {
        if (wk.active.size() != first.active.size())
            return fail("active_length", "path " + describe(wk) + " has " + std::to_string(wk.active.size()) +
                                             " active positions, path " + describe(first) + " has " +
                                             std::to_string(first.active.size()));
        if (wk.background.size() != first.background.size())
            return fail("background_length", "path " + describe(wk) + " has " +
                                                 std::to_string(wk.background.size()) + " background positions, path " +
                                                 describe(first) + " has " + std::to_string(first.background.size()));
        for (std::size_t k = 0; k < wk.active.size(); ++k) {
            VertexIndex a = g.edges[wk.active[k]].from, b = g.edges[first.active[k]].from;
            if (!g.same_stage(a, b))
                return fail("active_stage", "active positions " + g.display(a) + " and " + g.display(b) + " at level " +
                                                std::to_string(k + 1) + " are in different stages");
        }
        for (std::size_t k = 0; k < wk.background.size(); ++k)
            if (!g.same_stage(wk.background[k], first.background[k]))
                return fail("background_stage", "background positions " + g.display(wk.background[k]) + " and " +
                                                    g.display(first.background[k]) + " at level " +
                                                    std::to_string(k + 1) + " are in different stages");
    }
    // Within one member's upstream graph, same-stage active positions keep
    // the same label.
    for (std::size_t i = 0; i < W.size(); ++i) {
        std::vector<CegEdgeIndex> kept;
        for (const auto& wk : walks)
            if (wk.member == i) kept.insert(kept.end(), wk.active.begin(), wk.active.end());
        for (CegEdgeIndex x : kept)
            for (CegEdgeIndex y : kept) {
                const auto& ex = g.edges[x];
                const auto& ey = g.edges[y];
                if (ex.from != ey.from && g.same_stage(ex.from, ey.from) && ex.key != ey.key)
                    return fail("active_labels", "same-stage active positions " + g.display(ex.from) + " and " +
                                                     g.display(ey.from) + " keep differently labelled edges toward " +
                                                     g.display(W[i]));
            }
    }

    split.shared_level.assign(split.levels, 1);
    for (const auto& wk : walks)
        for (std::size_t k = 0; k < split.levels; ++k)
            if (g.edges[wk.active[k]].key != g.edges[first.active[k]].key) split.shared_level[k] = 0;

    std::optional<Rational> factor = Rational(1);
    for (std::size_t k = 0; k < split.levels; ++k) {
        if (!split.shared_level[k]) continue;
        const auto& p = g.edges[first.active[k]].prob;
        if (p && factor) *factor *= *p;
        else factor.reset();
    }
    split.common_active_factor = factor;

    std::map<VertexIndex, bool> only_shared;
    for (const auto& wk : walks)
        for (std::size_t k = 0; k < split.levels; ++k) {
            VertexIndex u = g.edges[wk.active[k]].from;
            auto [it, inserted] = only_shared.emplace(u, true);
            if (!split.shared_level[k]) it->second = false;
        }
    for (const auto& [u, ok] : only_shared)
        if (ok) split.modifiable.push_back(u);

    if (all_bound) {
        for (const auto& wk : walks) {
            std::set<CegEdgeIndex> skip;
            for (std::size_t k = 0; k < split.levels; ++k)
                if (split.shared_level[k]) skip.insert(wk.active[k]);
            Rational p = 1;
            for (CegEdgeIndex e : wk.path)
                if (!skip.count(e)) p *= *g.edges[e].prob;
            split.background_mass[W[wk.member]] += p;
        }
    }
    out.split = std::move(split);
    return out;
}

// ---------------------------------------------------------------- amenable

AmenabilityReport assess_amenable(const CegModel& idle, const CegModel& manipulated,
                                  const std::vector<VertexIndex>& W_in, const std::vector<VertexIndex>& scope_roots) {
    AmenabilityReport report;
    const auto& g = idle.graph;
    std::vector<VertexIndex> W(W_in);
    std::sort(W.begin(), W.end());
    W.erase(std::unique(W.begin(), W.end()), W.end());
    if (W.empty()) throw PreconditionError("amenability needs a non-empty W");
    for (VertexIndex w : W)
        if (w >= g.vertex_count() || w == g.sink) throw PreconditionError("W must hold positions");

    auto add = [&](Check c) {
        report.checks.push_back(c);
        return c.passed;
    };
    if (!add({"regular", is_c_regular(g, W), is_c_regular(g, W) ? "" : "two members of W share a path"})) return report;
    bool forced = add(forced_check(idle, manipulated, W, scope_roots));
    if (W.size() == 1) {
        // A single target: forcing alone is enough.
        report.amenable = forced;
        return report;
    }
    if (!forced) return report;

    auto view = manipulated_view(idle, manipulated);
    // Restrict to the scope: C(scope) with root labels from tree-level masses.
    auto masses = [&](const CegModel& model) {
        auto probs = event_probabilities(model.tree);
        std::vector<Rational> out;
        Rational total = 0;
        for (VertexIndex r : scope_roots) {
            auto through = events_through(idle, r);
            Rational p = 0;
            for (std::size_t ev = 0; ev < probs.size(); ++ev)
                if (through[ev]) p += probs[ev];
            out.push_back(p);
            total += p;
        }
        for (auto& p : out) p = total == 0 ? Rational(0) : p / total;
        return out;
    };
    ChainEventGraph gi = g, gm = view.graph;
    std::vector<VertexIndex> Wi = W;
    std::vector<CegEdgeIndex> origin_edge(g.edges.size());
    for (CegEdgeIndex e = 0; e < g.edges.size(); ++e) origin_edge[e] = e;
    if (!scope_roots.empty()) {
        gi = sub_ceg(g, scope_roots, masses(idle));
        gm = sub_ceg(view.graph, scope_roots, masses(manipulated));
        Wi.clear();
        for (VertexIndex w : W) {
            std::optional<VertexIndex> mapped;
            for (VertexIndex v = 0; v < gi.vertex_count(); ++v)
                if (gi.vertices[v].origin == w && v != gi.root) mapped = v;
            if (!mapped) {
                add({"in_scope", false, "member " + g.display(w) + " is not downstream of the scope"});
                return report;
            }
            Wi.push_back(*mapped);
        }
    }

    auto idle_split = classify_simple(gi, Wi);
    if (!add({"simple_idle", bool(idle_split), idle_split ? "" : idle_split.failed + ": " + idle_split.witness}))
        return report;
    auto manip_split = classify_simple(gm, Wi);
    if (!add({"simple_manipulated", bool(manip_split),
              manip_split ? "" : manip_split.failed + ": " + manip_split.witness}))
        return report;
    report.idle_split = idle_split.split;
    report.manipulated_split = manip_split.split;

    // Only edges out of positions that sit at shared active levels (in both
    // the idle and manipulated labelling) may change.
    std::set<VertexIndex> allowed;
    for (VertexIndex u : idle_split.split->modifiable)
        if (std::count(manip_split.split->modifiable.begin(), manip_split.split->modifiable.end(), u)) allowed.insert(u);
    Check only_active{"changes_only_active", true, ""};
    for (CegEdgeIndex e = 0; e < gi.edges.size(); ++e) {
        const auto& ed = gi.edges[e];
        bool changed;
        if (ed.origin == npos && !scope_roots.empty()) changed = gi.edges[e].prob != gm.edges[e].prob;
        else {
            CegEdgeIndex base = scope_roots.empty() ? e : ed.origin;
            changed = view.changed_edge[base] || !view.uniform[g.edges[base].from];
        }
        if (changed && !allowed.count(ed.from)) {
            only_active.passed = false;
            only_active.witness = "edge " + gi.display(ed.from) + " -> " + gi.display(ed.to) + " (" + ed.key +
                                  ") changed but its parent is not an active position at a shared level";
            break;
        }
    }
    if (!add(only_active)) return report;

    // Lemma-level consistency: manipulated masses factor with the same
    // background part.
    Check factor{"factorization", true, ""};
    const auto& si = *idle_split.split;
    const auto& sm = *manip_split.split;
    bool bound = std::all_of(gm.edges.begin(), gm.edges.end(), [](const CegEdge& e) { return e.prob.has_value(); });
    if (bound && si.common_active_factor && sm.common_active_factor && !si.background_mass.empty()) {
        auto reach = reach_probabilities(gm);
        for (VertexIndex w : Wi) {
            if (reach[w] != *sm.common_active_factor * si.background_mass.at(w)) {
                factor.passed = false;
                factor.witness = "manipulated P({" + gi.display(w) + "}) does not factor";
            }
        }
    }
    if (!add(factor)) return report;
    report.amenable = true;
    return report;
}

bool is_amenable(const CegModel& idle, const Manipulation& m, const std::vector<VertexIndex>& W) {
    auto manipulated = build_model(apply(idle.tree, m));
    return assess_amenable(idle, manipulated, W).amenable;
}

}  // namespace ceg
