#include "ceg/variable.hpp"

#include "ceg/error.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ceg {

std::size_t EventVariable::value_index(std::string_view value) const {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == value) return i;
    throw PreconditionError("variable " + name + " has no value " + std::string(value));
}

std::vector<std::size_t> EventVariable::events_with(std::size_t value) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < value_of_event.size(); ++i)
        if (value_of_event[i] == value) out.push_back(i);
    return out;
}

EventVariable variable_from_blocks(std::string name, const ProbabilityTree& tree,
                                   const std::vector<std::pair<std::string, std::vector<std::string>>>& blocks) {
    EventVariable y;
    y.name = std::move(name);
    const std::size_t unset = static_cast<std::size_t>(-1);
    y.value_of_event.assign(tree.events().size(), unset);
    for (const auto& [value, leaves] : blocks) {
        if (std::find(y.values.begin(), y.values.end(), value) != y.values.end())
            throw ValidationError("variable " + y.name + ": value " + value + " declared twice");
        std::size_t vi = y.values.size();
        y.values.push_back(value);
        for (const auto& leaf : leaves) {
            auto node = tree.find(leaf);
            if (!node) throw ValidationError("variable " + y.name + ": unknown leaf " + leaf);
            if (!tree.is_leaf(*node)) throw ValidationError("variable " + y.name + ": " + leaf + " is not a leaf");
            std::size_t ev = tree.event_of_leaf(*node);
            if (y.value_of_event[ev] != unset)
                throw ValidationError("variable " + y.name + ": leaf " + leaf + " is in two blocks");
            y.value_of_event[ev] = vi;
        }
    }
    for (std::size_t ev = 0; ev < y.value_of_event.size(); ++ev)
        if (y.value_of_event[ev] == unset)
            throw ValidationError("variable " + y.name + ": leaf " + tree.name(tree.leaves()[ev]) +
                                  " is in no block");
    return y;
}

EventVariable variable_from_function(std::string name, std::size_t event_count,
                                     const std::function<std::string(std::size_t)>& value_of) {
    EventVariable y;
    y.name = std::move(name);
    for (std::size_t ev = 0; ev < event_count; ++ev) {
        std::string v = value_of(ev);
        auto it = std::find(y.values.begin(), y.values.end(), v);
        if (it == y.values.end()) {
            y.values.push_back(v);
            it = y.values.end() - 1;
        }
        y.value_of_event.push_back(static_cast<std::size_t>(it - y.values.begin()));
    }
    return y;
}

EventVariable parse_variable(std::string_view text, const ProbabilityTree& tree) {
    std::vector<detail::Token> toks;
    for (auto& line : detail::tokenize(text, "{};:"))
        for (auto& t : line.tokens) toks.push_back(std::move(t));
    std::size_t i = 0;
    auto fail = [&](const std::string& what) -> void {
        if (i < toks.size()) throw ParseError(what, toks[i].line, toks[i].column);
        throw ParseError(what + " at end of input", toks.empty() ? 0 : toks.back().line, 0);
    };
    auto expect = [&](const char* s) {
        if (i >= toks.size() || toks[i].text != s) fail(std::string("expected '") + s + "'");
        ++i;
    };
    expect("var");
    if (i >= toks.size()) fail("expected variable name");
    std::string name = toks[i++].text;
    expect("{");
    std::vector<std::pair<std::string, std::vector<std::string>>> blocks;
    while (true) {
        if (i >= toks.size()) fail("expected '}'");
        if (toks[i].text == "}") break;
        std::string value = toks[i].text;
        if (value == ";" || value == ":" || value == "{") fail("expected a value name");
        ++i;
        expect(":");
        std::vector<std::string> leaves;
        while (i < toks.size() && toks[i].text != ";" && toks[i].text != "}") {
            if (toks[i].text == ":" || toks[i].text == "{") fail("unexpected '" + toks[i].text + "'");
            leaves.push_back(toks[i++].text);
        }
        blocks.emplace_back(value, std::move(leaves));
        if (i < toks.size() && toks[i].text == ";") ++i;
    }
    ++i;
    if (i < toks.size()) fail("trailing input after variable");
    return variable_from_blocks(name, tree, blocks);
}

std::string serialize_variable(const EventVariable& y, const ProbabilityTree& tree) {
    std::ostringstream out;
    out << "var " << y.name << " {";
    for (std::size_t v = 0; v < y.values.size(); ++v) {
        out << (v ? " ; " : " ") << y.values[v] << ":";
        for (std::size_t ev : y.events_with(v)) out << " " << tree.name(tree.leaves()[ev]);
    }
    out << " }\n";
    return out.str();
}

std::optional<CegPath> suffix_from(const ChainEventGraph& g, const CegPath& path, const std::vector<VertexIndex>& W) {
    std::set<VertexIndex> members(W.begin(), W.end());
    if (members.count(g.root)) return path;
    for (std::size_t i = 0; i < path.size(); ++i)
        if (members.count(g.edges[path[i]].to))
            return CegPath(path.begin() + static_cast<std::ptrdiff_t>(i) + 1, path.end());
    return std::nullopt;
}

std::vector<CegPath> suffix_paths(const ChainEventGraph& g, VertexIndex w) {
    if (w >= g.vertex_count() || w == g.sink) throw PreconditionError("suffix_paths needs a position");
    std::vector<CegPath> out;
    CegPath current;
    std::function<void(VertexIndex)> walk = [&](VertexIndex v) {
        if (v == g.sink) {
            out.push_back(current);
            return;
        }
        for (CegEdgeIndex e : g.out(v)) {
            current.push_back(e);
            walk(g.edges[e].to);
            current.pop_back();
        }
    };
    walk(w);
    return out;
}

std::optional<std::pair<std::size_t, std::size_t>> suffix_conflict(const CegModel& m,
                                                                    const std::vector<VertexIndex>& W,
                                                                    const EventVariable& y,
                                                                    const std::vector<char>& scope) {
    std::map<CegPath, std::size_t> first;
    for (std::size_t ev = 0; ev < m.event_paths.size(); ++ev) {
        if (!scope.empty() && !scope[ev]) continue;
        auto s = suffix_from(m.graph, m.event_paths[ev], W);
        if (!s) continue;
        auto [it, inserted] = first.emplace(*s, ev);
        if (!inserted && y.value_of_event[it->second] != y.value_of_event[ev]) return std::make_pair(it->second, ev);
    }
    return std::nullopt;
}

SuffixVariable project_to_suffix(const CegModel& m, const std::vector<VertexIndex>& W, const EventVariable& y) {
    if (auto clash = suffix_conflict(m, W, y, {}))
        throw PreconditionError("variable " + y.name + " is not a function of the path after W: events ending at " +
                                m.tree.name(m.tree.leaves()[clash->first]) + " and " +
                                m.tree.name(m.tree.leaves()[clash->second]) + " share a suffix");
    SuffixVariable s;
    s.name = y.name;
    for (std::size_t ev = 0; ev < m.event_paths.size(); ++ev)
        if (auto suf = suffix_from(m.graph, m.event_paths[ev], W)) s.value_of[*suf] = y.values[y.value_of_event[ev]];
    return s;
}

}  // namespace ceg
