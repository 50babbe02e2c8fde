#include "ceg/identification.hpp"

#include "ceg/error.hpp"

#include <algorithm>
#include <set>

namespace ceg {

std::string to_string(const Distribution& d) {
    std::string out = "{";
    for (const auto& [value, p] : d) {
        if (out.size() > 1) out += ", ";
        out += value + ": " + (p ? to_string(*p) : std::string("undefined"));
    }
    return out + "}";
}

EventVariable extend_variable(const CegModel& model, const std::vector<VertexIndex>& W, const SuffixVariable& yhat) {
    for (const auto& [suffix, value] : yhat.value_of)
        if (value == "0") throw PreconditionError("extend_variable: 0 is reserved for paths that miss W");
    const auto& g = model.graph;
    return variable_from_function(yhat.name, model.event_paths.size(), [&](std::size_t ev) -> std::string {
        auto suffix = suffix_from(g, model.event_paths[ev], W);
        if (!suffix) return "0";
        auto it = yhat.value_of.find(*suffix);
        if (it == yhat.value_of.end())
            throw PreconditionError("extend_variable: no value for the suffix of the event ending at " +
                                    model.tree.name(model.tree.leaves()[ev]));
        return it->second;
    });
}

EventVariable extend_variable(const CegModel& model, VertexIndex w, const SuffixVariable& yhat) {
    return extend_variable(model, std::vector<VertexIndex>{w}, yhat);
}

Distribution distribution_of(const ProbabilityTree& tree, const EventVariable& y) {
    auto probs = event_probabilities(tree);
    if (probs.size() != y.value_of_event.size())
        throw PreconditionError("variable " + y.name + " does not match the tree's events");
    Distribution d;
    for (const auto& v : y.values) d[v] = Rational(0);
    for (std::size_t ev = 0; ev < probs.size(); ++ev) *d[y.values[y.value_of_event[ev]]] += probs[ev];
    return d;
}

Distribution brute_force_effect(const ProbabilityTree& tree, const Manipulation& m, const EventVariable& y) {
    return distribution_of(apply(tree, m), y);
}

// ---------------------------------------------------------------- Lemma 1

namespace {

Rational mass(const std::vector<Rational>& probs, const std::vector<char>& mask) {
    Rational total = 0;
    for (std::size_t ev = 0; ev < probs.size(); ++ev)
        if (mask[ev]) total += probs[ev];
    return total;
}

Distribution suffix_distribution(const ChainEventGraph& g, VertexIndex w, const SuffixVariable& yhat) {
    Distribution d;
    for (const auto& [suffix, value] : yhat.value_of) d[value] = Rational(0);
    for (const auto& suffix : suffix_paths(g, w)) {
        auto it = yhat.value_of.find(suffix);
        if (it == yhat.value_of.end()) throw PreconditionError("yhat misses a path of C(" + g.display(w) + ")");
        Rational p = 1;
        for (CegEdgeIndex e : suffix) {
            if (!g.edges[e].prob) throw PreconditionError("unbound label after " + g.display(w));
            p *= *g.edges[e].prob;
        }
        *d[it->second] += p;
    }
    return d;
}

Rational value_or_zero(const Distribution& d, const std::string& v) {
    auto it = d.find(v);
    return it == d.end() || !it->second ? Rational(0) : *it->second;
}

}  // namespace

bool Lemma1Report::holds() const {
    return std::all_of(identities.begin(), identities.end(), [](const Check& c) { return c.passed; });
}

Lemma1Report lemma1_check(const CegModel& idle, const CegModel& manipulated, VertexIndex w,
                          const SuffixVariable& yhat) {
    auto forced = forced_check(idle, manipulated, {w});
    if (!forced.passed) throw PreconditionError("manipulation is not forced to " + idle.graph.display(w) + ": " +
                                                forced.witness);
    Lemma1Report r;
    r.p_w = reach_probabilities(idle.graph)[w];
    r.yhat_idle = suffix_distribution(idle.graph, w, yhat);
    r.yhat_manipulated = suffix_distribution(manipulated_view(idle, manipulated).graph, w, yhat);

    auto y = extend_variable(idle, w, yhat);
    auto p = distribution_of(idle.tree, y);
    auto phat = distribution_of(manipulated.tree, y);

    Check one{"1", r.yhat_idle == r.yhat_manipulated, ""};
    if (!one.passed) one.witness = "idle " + to_string(r.yhat_idle) + ", manipulated " + to_string(r.yhat_manipulated);

    Check two{"2", true, ""};
    Rational p0 = value_or_zero(p, "0"), phat0 = value_or_zero(phat, "0");
    if (p0 != 1 - r.p_w || phat0 != 0) {
        two.passed = false;
        two.witness = "P(Y=0)=" + to_string(p0) + ", 1-P({w})=" + to_string(1 - r.p_w) + ", P^(Y=0)=" + to_string(phat0);
    }

    Check three{"3", true, ""}, four{"4", true, ""};
    for (const auto& [value, q] : r.yhat_idle) {
        if (value_or_zero(p, value) != r.p_w * *q && three.passed) {
            three.passed = false;
            three.witness = "y=" + value + ": P(Y=y)=" + to_string(value_or_zero(p, value)) +
                            ", P({w})P(Yhat=y)=" + to_string(r.p_w * *q);
        }
        if (value_or_zero(phat, value) != *q && four.passed) {
            four.passed = false;
            four.witness = "y=" + value + ": P^(Y=y)=" + to_string(value_or_zero(phat, value)) +
                           ", P(Yhat=y)=" + to_string(*q);
        }
    }
    r.identities = {one, two, three, four};
    return r;
}

// ---------------------------------------------------------------- Lemma 4.3

ForcedSetResult identify_forced_set(const CegModel& idle, const CegModel& manipulated,
                                    const std::vector<VertexIndex>& W, const EventVariable& y) {
    ForcedSetResult out;
    out.amenability = assess_amenable(idle, manipulated, W);
    if (!out.amenability.amenable) {
        const auto& failed = out.amenability.checks.back();
        throw PreconditionError("manipulation is not amenable (" + failed.name + "): " + failed.witness);
    }
    auto probs = event_probabilities(idle.tree);
    std::vector<char> through(probs.size(), 0);
    for (VertexIndex w : W) {
        auto mask = events_through(idle, w);
        if (mass(probs, mask) == 0) throw PreconditionError("P({" + idle.graph.display(w) + "}) is 0");
        for (std::size_t ev = 0; ev < mask.size(); ++ev) through[ev] |= mask[ev];
    }
    if (auto clash = suffix_conflict(idle, W, y, {}))
        throw PreconditionError(y.name + " differs on events ending at " +
                                idle.tree.name(idle.tree.leaves()[clash->first]) + " and " +
                                idle.tree.name(idle.tree.leaves()[clash->second]) + " that share a suffix after W");
    Rational pw = mass(probs, through);
    for (const auto& v : y.values) out.formula[v] = Rational(0);
    for (std::size_t ev = 0; ev < probs.size(); ++ev)
        if (through[ev]) *out.formula[y.values[y.value_of_event[ev]]] += probs[ev] / pw;
    out.oracle = distribution_of(manipulated.tree, y);
    out.agree = out.formula == out.oracle;
    return out;
}

// ---------------------------------------------------------------- back-door

WzSearch find_wz(const CegModel& model, const std::vector<char>& omega) {
    const auto& g = model.graph;
    WzSearch out;
    if (std::none_of(omega.begin(), omega.end(), [](char c) { return c; })) {
        out.witness = "the block holds no events";
        return out;
    }
    std::map<VertexIndex, bool> inside;
    auto contained = [&](VertexIndex v) {
        auto [it, fresh] = inside.emplace(v, false);
        if (fresh) {
            auto through = events_through(model, v);
            bool ok = true;
            for (std::size_t ev = 0; ev < through.size() && ok; ++ev)
                if (through[ev] && !omega[ev]) ok = false;
            it->second = ok;
        }
        return it->second;
    };
    std::set<VertexIndex> chosen;
    for (std::size_t ev = 0; ev < omega.size(); ++ev) {
        if (!omega[ev]) continue;
        std::optional<VertexIndex> first;
        for (VertexIndex v : path_vertices(g, model.event_paths[ev]))
            if (v != g.sink && contained(v)) {
                first = v;
                break;
            }
        if (!first) {
            out.witness = "the event ending at " + model.tree.name(model.tree.leaves()[ev]) +
                          " passes no position whose events all lie in the block";
            return out;
        }
        chosen.insert(*first);
    }
    std::vector<VertexIndex> W(chosen.begin(), chosen.end());
    for (VertexIndex b : W) {
        auto upstream = can_reach(g, b);
        for (VertexIndex a : W)
            if (a != b && upstream[a]) {
                out.witness = "positions " + g.display(a) + " and " + g.display(b) + " lie on one path";
                return out;
            }
    }
    std::vector<char> covered(omega.size(), 0);
    for (VertexIndex w : W) {
        auto through = events_through(model, w);
        for (std::size_t ev = 0; ev < through.size(); ++ev) covered[ev] |= through[ev];
    }
    if (covered != omega) {
        out.witness = "the chosen positions do not cover the block exactly";
        return out;
    }
    out.positions = std::move(W);
    return out;
}

namespace {

// Positions holding a situation whose distribution the manipulation changed.
std::set<VertexIndex> changed_positions(const CegModel& idle, const ProbabilityTree& manipulated) {
    std::set<VertexIndex> out;
    for (NodeIndex s : idle.tree.situations())
        for (EdgeIndex t : idle.tree.out_edges(s))
            if (idle.tree.probability(t) != manipulated.probability(t) ||
                !(idle.tree.edge(t).label == manipulated.edge(t).label))
                out.insert(idle.graph.vertex_of_node[s]);
    return out;
}

std::string names(const ChainEventGraph& g, const std::vector<VertexIndex>& W) {
    std::string s = "{";
    for (VertexIndex w : W) s += (s.size() > 1 ? "," : "") + g.display(w);
    return s + "}";
}

}  // namespace

IdentificationReport backdoor_identify(const CegModel& idle, const CegModel& manipulated,
                                       const std::vector<VertexIndex>& W_in, const EventVariable& z,
                                       const EventVariable& y) {
    const auto& g = idle.graph;
    IdentificationReport r;
    r.W = W_in;
    std::sort(r.W.begin(), r.W.end());
    r.W.erase(std::unique(r.W.begin(), r.W.end()), r.W.end());
    r.y_name = y.name;
    r.z_name = z.name;
    if (r.W.empty()) throw PreconditionError("backdoor_identify needs a non-empty W");

    Check forced = forced_check(idle, manipulated, r.W);
    Check cond_i{"condition_i", true, ""}, cond_ii{"condition_ii", true, ""}, cond_iii{"condition_iii", true, ""},
        measurable{"y_measurable", true, ""};
    auto fail = [](Check& c, const std::string& z_value, const std::string& why) {
        if (!c.passed) return;
        c.passed = false;
        c.witness = "z=" + z_value + ": " + why;
    };

    auto probs = event_probabilities(idle.tree);
    auto changed = changed_positions(idle, manipulated.tree);
    std::vector<std::vector<char>> through;
    for (VertexIndex w : r.W) through.push_back(events_through(idle, w));

    for (std::size_t zi = 0; zi < z.values.size(); ++zi) {
        const std::string& zv = z.values[zi];
        std::vector<char> omega(probs.size(), 0);
        for (std::size_t ev = 0; ev < probs.size(); ++ev) omega[ev] = z.value_of_event[ev] == zi;

        ZTerm term;
        term.z = zv;
        std::vector<char> in_wz(probs.size(), 0);
        for (std::size_t i = 0; i < r.W.size(); ++i)
            for (std::size_t ev = 0; ev < probs.size(); ++ev)
                if (omega[ev] && through[i][ev]) {
                    term.w_of_z.push_back(r.W[i]);
                    break;
                }
        for (std::size_t ev = 0; ev < probs.size(); ++ev)
            for (std::size_t i = 0; i < r.W.size(); ++i)
                if (omega[ev] && through[i][ev]) in_wz[ev] = 1;

        term.p_z = mass(probs, omega);
        Rational denom = mass(probs, in_wz);
        for (const auto& v : y.values) term.conditional[v] = denom == 0 ? std::nullopt : std::optional<Rational>(0);
        if (denom != 0)
            for (std::size_t ev = 0; ev < probs.size(); ++ev)
                if (in_wz[ev]) *term.conditional[y.values[y.value_of_event[ev]]] += probs[ev] / denom;

        auto search = find_wz(idle, omega);
        if (!search.positions) {
            fail(cond_i, zv, search.witness);
            r.terms.push_back(std::move(term));
            continue;
        }
        term.wz = *search.positions;
        std::set<VertexIndex> wz_set(term.wz.begin(), term.wz.end());
        std::set<VertexIndex> w_of_z(term.w_of_z.begin(), term.w_of_z.end());

        // (ii): on every path of the block, members of W(z) come strictly
        // after W_z, and nothing before W_z was manipulated.
        for (std::size_t ev = 0; ev < probs.size() && cond_ii.passed; ++ev) {
            if (!omega[ev]) continue;
            auto vs = path_vertices(g, idle.event_paths[ev]);
            std::size_t at = 0;
            while (at < vs.size() && !wz_set.count(vs[at])) ++at;
            for (std::size_t k = 0; k <= at && k < vs.size(); ++k)
                if (w_of_z.count(vs[k]))
                    fail(cond_ii, zv, g.display(vs[k]) + " in W(z) does not come after W_z on the event ending at " +
                                          idle.tree.name(idle.tree.leaves()[ev]));
        }
        for (VertexIndex c : changed) {
            if (wz_set.count(c) || !cond_ii.passed) continue;
            for (VertexIndex w : term.wz)
                if (can_reach(g, w)[c]) {
                    fail(cond_ii, zv, "manipulated position " + g.display(c) + " lies before " + g.display(w));
                    break;
                }
        }

        if (term.w_of_z.empty()) {
            fail(cond_iii, zv, "no member of W lies on the block's paths");
        } else {
            auto report = assess_amenable(idle, manipulated, term.w_of_z, term.wz);
            if (!report.amenable) {
                const auto& bad = report.checks.back();
                fail(cond_iii, zv, "not amenable forcing to " + names(g, term.w_of_z) + " in C(" + names(g, term.wz) +
                                       "): " + bad.name + ": " + bad.witness);
            }
            if (auto clash = suffix_conflict(idle, term.w_of_z, y, omega))
                fail(measurable, zv,
                     y.name + " differs on events ending at " + idle.tree.name(idle.tree.leaves()[clash->first]) +
                         " and " + idle.tree.name(idle.tree.leaves()[clash->second]) + " that share a suffix");
        }
        r.terms.push_back(std::move(term));
    }

    r.conditions = {forced, cond_i, cond_ii, cond_iii, measurable};
    r.identified = std::all_of(r.conditions.begin(), r.conditions.end(), [](const Check& c) { return c.passed; });

    for (const auto& v : y.values) {
        std::optional<Rational> total = Rational(0);
        for (const auto& term : r.terms) {
            if (term.p_z == 0) continue;
            const auto& c = term.conditional.at(v);
            if (!c) {
                total.reset();
                break;
            }
            *total += *c * term.p_z;
        }
        r.formula[v] = total;
    }
    r.oracle = distribution_of(manipulated.tree, y);
    r.agree = r.formula == r.oracle;
    return r;
}

std::vector<VertexIndex> infer_forced_set(const CegModel& idle, const Manipulation& m) {
    const auto& g = idle.graph;
    auto manipulated = apply(idle.tree, m);
    auto changed = changed_positions(idle, manipulated);
    std::set<VertexIndex> candidates;
    for (const auto& [s, dist] : m.replacements) {
        const auto& outs = idle.tree.out_edges(s);
        for (std::size_t i = 0; i < outs.size(); ++i) {
            if (dist[i] == 0) continue;
            VertexIndex u = g.vertex_of_node[idle.tree.edge(outs[i]).child];
            if (u != g.sink) candidates.insert(u);
        }
    }
    std::vector<VertexIndex> out;
    for (VertexIndex u : candidates) {
        bool clean = true;
        for (VertexIndex c : changed)
            if (can_reach(g, c)[u]) clean = false;
        if (clean) out.push_back(u);
    }
    return out;
}

}  // namespace ceg
