#include "scenarios.hpp"

#include "ceg/bn.hpp"
#include "ceg/identification.hpp"

#include <algorithm>
#include <map>

namespace ceg::testing {

namespace {

using Oracle = std::map<std::string, Rational>;

Oracle tally(const EventVariable& y, const std::vector<Rational>& probs) {
    Oracle d;
    for (std::size_t ev = 0; ev < probs.size(); ++ev) d[y.values[y.value_of_event[ev]]] += probs[ev];
    return d;
}

bool same(const Distribution& got, const Oracle& want) {
    for (const auto& [v, p] : got) {
        auto it = want.find(v);
        Rational w = it == want.end() ? Rational(0) : it->second;
        if (!p || *p != w) return false;
    }
    for (const auto& [v, p] : want)
        if (p != 0 && !got.count(v)) return false;
    return true;
}

std::string show(const Oracle& d) {
    std::string s = "{";
    for (const auto& [v, p] : d) s += (s.size() > 1 ? ", " : "") + v + ": " + to_string(p);
    return s + "}";
}

}  // namespace

std::string lemma1_scenario(Rng& rng) {
    auto idle = build_model(random_tree(rng));
    const auto& g = idle.graph;
    VertexIndex w = uniform(rng, 0, g.sink - 1);
    auto m = forced_manipulation(rng, idle, w);
    auto manipulated = build_model(apply(idle.tree, m));
    auto yhat = random_suffix_variable(rng, g, w);
    auto report = lemma1_check(idle, manipulated, w, yhat);
    for (const auto& c : report.identities)
        if (!c.passed) return "identity " + c.name + ": " + c.witness + "\n" + serialize(idle.tree);

    // Independent: read Y(w) off each leaf and sum exact leaf products.
    auto idle_probs = leaf_probabilities(idle.tree);
    auto manip_probs = leaf_probabilities(idle.tree, &m);
    Rational pw = mass_through(idle.tree, idle_probs, g.vertices[w].members);
    Oracle p, phat;
    for (std::size_t ev = 0; ev < idle_probs.size(); ++ev) {
        auto suffix = suffix_from(g, idle.event_paths[ev], {w});
        std::string y = suffix ? yhat.value_of.at(*suffix) : "0";
        p[y] += idle_probs[ev];
        phat[y] += manip_probs[ev];
    }
    if (report.p_w != pw) return "P({w}) " + to_string(report.p_w) + " vs " + to_string(pw);
    if (p["0"] != 1 - pw || phat["0"] != 0) return "Y=0 masses " + show(p) + " " + show(phat);
    for (const auto& [y, q] : report.yhat_idle) {
        Rational want = phat.count(y) ? phat.at(y) : Rational(0);
        if (!q || *q != want) return "P(Yhat=" + y + ") " + (q ? to_string(*q) : "undefined") + " vs " + to_string(want);
        Rational pv = p.count(y) ? p.at(y) : Rational(0);
        if (pv != pw * want) return "P(Y=" + y + ") does not factor";
    }
    return "";
}

std::string forced_set_scenario(Rng& rng) {
    auto inst = amenable_instance(rng);
    auto idle = build_model(inst.tree);
    auto manipulated = build_model(apply(inst.tree, inst.manipulation));
    auto W = positions_of(idle, inst.w_names);
    auto y = leaf_variable("Y", inst.tree, inst.y_of_leaf);
    auto result = identify_forced_set(idle, manipulated, W, y);
    auto oracle = tally(y, leaf_probabilities(inst.tree, &inst.manipulation));
    if (!same(result.oracle, oracle)) return "oracle " + to_string(result.oracle) + " vs " + show(oracle);
    if (!same(result.formula, oracle) || !result.agree)
        return "formula " + to_string(result.formula) + " vs " + show(oracle) + "\n" + serialize(inst.tree);

    const auto& split = *result.amenability.idle_split;
    if (!split.common_active_factor) return "no common active factor";
    auto idle_probs = leaf_probabilities(inst.tree);
    for (VertexIndex w : W) {
        Rational pw = mass_through(inst.tree, idle_probs, idle.graph.vertices[w].members);
        if (pw != *split.common_active_factor * split.background_mass.at(w))
            return "P({" + idle.graph.display(w) + "}) = " + to_string(pw) + " does not factor";
    }
    return "";
}

std::string backdoor_scenario(Rng& rng) {
    auto inst = backdoor_instance(rng);
    auto idle = build_model(inst.tree);
    auto manipulated = build_model(apply(inst.tree, inst.manipulation));
    auto W = positions_of(idle, inst.w_names);
    auto z = leaf_variable("Z", inst.tree, inst.z_of_leaf);
    auto y = leaf_variable("Y", inst.tree, inst.y_of_leaf);
    auto report = backdoor_identify(idle, manipulated, W, z, y);
    for (const auto& c : report.conditions)
        if (!c.passed) return c.name + " failed: " + c.witness + "\n" + serialize(inst.tree);
    auto oracle = tally(y, leaf_probabilities(inst.tree, &inst.manipulation));
    if (!same(report.formula, oracle) || !report.agree)
        return "formula " + to_string(report.formula) + " vs " + show(oracle);

    // The terms themselves: P(Z=z) and P(Y | W(z), Z=z) from leaf products.
    auto probs = leaf_probabilities(inst.tree);
    auto paths = leaf_paths(inst.tree);
    for (const auto& term : report.terms) {
        std::vector<NodeIndex> members;
        for (VertexIndex w : term.w_of_z)
            for (NodeIndex s : idle.graph.vertices[w].members) members.push_back(s);
        Rational pz = 0, denom = 0;
        Oracle num;
        for (std::size_t ev = 0; ev < probs.size(); ++ev) {
            if (z.values[z.value_of_event[ev]] != term.z) continue;
            pz += probs[ev];
            bool hit = std::any_of(paths[ev].begin(), paths[ev].end(),
                                   [&](NodeIndex v) { return std::count(members.begin(), members.end(), v) > 0; });
            if (!hit) continue;
            denom += probs[ev];
            num[y.values[y.value_of_event[ev]]] += probs[ev];
        }
        if (pz != term.p_z) return "P(Z=" + term.z + ") mismatch";
        for (auto& [v, p] : num) p /= denom;
        if (!same(term.conditional, num)) return "conditional for z=" + term.z + " mismatch";
    }
    return "";
}

const char* expected_condition(Breakage kind) {
    switch (kind) {
    case Breakage::block_without_wz: return "condition_i";
    case Breakage::changed_before_wz: return "condition_ii";
    case Breakage::changed_after_w: return "forced_to_W";
    case Breakage::changed_inside_block: return "condition_iii";
    }
    return "";
}

std::string broken_backdoor_scenario(Rng& rng, Breakage kind) {
    auto inst = backdoor_instance(rng);
    const auto& t = inst.tree;
    auto replace = [&](NodeIndex s) {
        std::vector<Rational> old;
        for (EdgeIndex e : t.out_edges(s)) old.push_back(t.require_probability(e));
        if (inst.manipulation.replacements.count(s)) old = inst.manipulation.replacements.at(s);
        inst.manipulation.replacements[s] = different_distribution(rng, old);
    };
    switch (kind) {
    case Breakage::block_without_wz: {
        NodeIndex leaf = t.leaves()[uniform(rng, 0, t.leaves().size() - 1)];
        for (auto& [name, value] : inst.z_of_leaf) value = name == t.name(leaf) ? "1" : "0";
        break;
    }
    case Breakage::changed_before_wz: replace(t.root()); break;
    case Breakage::changed_after_w: replace(t.at(inst.w_names[uniform(rng, 0, inst.w_names.size() - 1)])); break;
    case Breakage::changed_inside_block:
        replace(t.at(inst.branch_roots[uniform(rng, 0, inst.branch_roots.size() - 1)]));
        break;
    }
    auto idle = build_model(inst.tree);
    auto manipulated = build_model(apply(inst.tree, inst.manipulation));
    auto W = positions_of(idle, inst.w_names);
    auto z = leaf_variable("Z", inst.tree, inst.z_of_leaf);
    auto y = leaf_variable("Y", inst.tree, inst.y_of_leaf);
    auto report = backdoor_identify(idle, manipulated, W, z, y);
    std::string want = expected_condition(kind);
    if (report.identified) return "identified despite a broken " + want;
    for (const auto& c : report.conditions)
        if (c.name == want) {
            if (c.passed) {
                std::string failed;
                for (const auto& d : report.conditions)
                    if (!d.passed) failed += " " + d.name;
                return want + " passed; failed:" + failed;
            }
            if (c.witness.empty()) return want + " failed without a witness";
            return "";
        }
    return "no condition named " + want;
}

std::string structure_scenario(Rng& rng) {
    auto m = build_model(random_tree(rng));
    const auto& g = m.graph;
    if (ceg_paths(g).size() != m.tree.leaves().size())
        return std::to_string(ceg_paths(g).size()) + " CEG paths for " + std::to_string(m.tree.leaves().size()) +
               " leaves";
    auto W = random_antichain(rng, g);
    auto probs = leaf_probabilities(m.tree);
    Rational total = 0;
    std::vector<Rational> mass;
    for (VertexIndex w : W) {
        mass.push_back(mass_through(m.tree, probs, g.vertices[w].members));
        total += mass.back();
    }
    if (total == 0) return "";
    auto s = sub_ceg(g, W);
    Rational sum = 0;
    for (CegEdgeIndex e : s.out(s.root)) {
        sum += *s.edges[e].prob;
        auto k = std::find(W.begin(), W.end(), s.vertices[s.edges[e].to].origin) - W.begin();
        if (*s.edges[e].prob != mass[k] / total) return "root edge to " + g.display(W[k]) + " is not P({w})/P(W)";
    }
    if (sum != 1) return "root edges sum to " + to_string(sum);
    return "";
}

// ---------------------------------------------------------------- BN

std::vector<Dag> all_dags(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) arcs.emplace_back(i, j);
    std::vector<Dag> out;
    for (std::size_t mask = 0; mask < (std::size_t(1) << arcs.size()); ++mask) {
        Dag dag(n);
        for (std::size_t a = 0; a < arcs.size(); ++a)
            if (mask >> a & 1) dag[arcs[a].second].push_back(arcs[a].first);
        // Acyclic iff repeatedly removing parentless variables empties it.
        std::vector<char> done(n, 0);
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t v = 0; v < n; ++v)
                if (!done[v] && std::all_of(dag[v].begin(), dag[v].end(), [&](std::size_t p) { return done[p]; })) {
                    done[v] = 1;
                    progress = true;
                }
        }
        if (std::all_of(done.begin(), done.end(), [](char c) { return c; })) out.push_back(dag);
    }
    return out;
}

std::string bn_scenario(Rng& rng, const Dag& dag) {
    std::size_t n = dag.size();
    auto name = [](std::size_t v) { return "X" + std::to_string(v + 1); };
    // Topological order, latest-declared variables first where free, so the
    // tree order often differs from declaration order.
    std::vector<std::size_t> order;
    std::vector<char> placed(n, 0);
    while (order.size() < n)
        for (std::size_t k = n; k-- > 0;)
            if (!placed[k] &&
                std::all_of(dag[k].begin(), dag[k].end(), [&](std::size_t p) { return placed[p]; })) {
                placed[k] = 1;
                order.push_back(k);
                break;
            }

    // cpt[v][parent config as bits over dag[v]] = P(X_v = 1)
    std::vector<std::vector<Rational>> cpt(n);
    std::string text;
    for (std::size_t v = 0; v < n; ++v) text += "var " + name(v) + " 0 1\n";
    for (std::size_t v = 0; v < n; ++v) {
        if (!dag[v].empty()) {
            text += "parents " + name(v);
            for (std::size_t p : dag[v]) text += " " + name(p);
            text += "\n";
        }
        for (std::size_t c = 0; c < (std::size_t(1) << dag[v].size()); ++c) {
            auto d = random_distribution(rng, 2, true);
            cpt[v].push_back(d[1]);
            text += "cpt " + name(v) + " |";
            for (std::size_t j = 0; j < dag[v].size(); ++j) text += (c >> j & 1) ? " 1" : " 0";
            text += " : " + to_string(d[0]) + " " + to_string(d[1]) + "\n";
        }
    }
    text += "varorder";
    for (std::size_t v : order) text += " " + name(v);
    text += "\n";

    auto factor = [&](std::size_t v, const std::vector<std::size_t>& x) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < dag[v].size(); ++j) c |= x[dag[v][j]] << j;
        return x[v] ? cpt[v][c] : 1 - cpt[v][c];
    };

    auto bn = parse_bn(text);
    auto bt = bn_to_tree(bn);
    auto model = build_model(bt.tree);
    auto leaves = leaf_assignments(bn);
    auto probs = leaf_probabilities(bt.tree);
    // x in declaration order for each leaf.
    std::vector<std::vector<std::size_t>> declared(leaves.size(), std::vector<std::size_t>(n));
    for (std::size_t ev = 0; ev < leaves.size(); ++ev)
        for (std::size_t k = 0; k < n; ++k)
            declared[ev][std::stoul(bn.variables[k].name.substr(1)) - 1] = leaves[ev][k];

    if (leaves.size() != (std::size_t(1) << n)) return "wrong leaf count";
    for (std::size_t ev = 0; ev < leaves.size(); ++ev) {
        Rational joint = 1;
        for (std::size_t v = 0; v < n; ++v) joint *= factor(v, declared[ev]);
        if (probs[ev] != joint) return "tree joint differs from BN joint\n" + text;
        if (bn.joint(leaves[ev]) != joint) return "DiscreteBN::joint differs\n" + text;
    }
    auto shape = check_bn_ceg_shape(model);
    for (const auto& c : shape.checks)
        if (!c.passed) return "shape check " + c.name + ": " + c.witness + "\n" + text;

    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t value = 0; value < 2; ++value) {
            auto m = do_to_manipulation(bn, bt.tree, name(v), std::to_string(value));
            for (std::size_t u = 0; u < n; ++u) {
                auto y = variable_from_function(name(u), leaves.size(),
                                                [&](std::size_t ev) { return std::to_string(declared[ev][u]); });
                auto effect = brute_force_effect(bt.tree, m, y);
                Oracle truncated;
                for (std::size_t ev = 0; ev < leaves.size(); ++ev) {
                    if (declared[ev][v] != value) continue;
                    Rational p = 1;
                    for (std::size_t i = 0; i < n; ++i)
                        if (i != v) p *= factor(i, declared[ev]);
                    truncated[std::to_string(declared[ev][u])] += p;
                }
                if (!same(effect, truncated))
                    return "do(" + name(v) + "=" + std::to_string(value) + ") marginal of " + name(u) + ": " +
                           to_string(effect) + " vs " + show(truncated) + "\n" + text;
            }
        }
    return "";
}

}  // namespace ceg::testing
