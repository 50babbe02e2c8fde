#include "ceg/bn.hpp"

#include "ceg/error.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <set>

namespace ceg {

std::size_t DiscreteBN::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == name) return i;
    throw PreconditionError("unknown variable " + std::string(name));
}

std::size_t DiscreteBN::value_index(std::size_t var, std::string_view value) const {
    const auto& vals = variables.at(var).values;
    auto it = std::find(vals.begin(), vals.end(), value);
    if (it == vals.end())
        throw PreconditionError("variable " + variables[var].name + " has no value " + std::string(value));
    return static_cast<std::size_t>(it - vals.begin());
}

namespace {

std::vector<std::size_t> config_of(const BnVariable& v, const std::vector<std::size_t>& x) {
    std::vector<std::size_t> c;
    for (std::size_t p : v.parents) c.push_back(x[p]);
    return c;
}

}  // namespace

Rational DiscreteBN::joint(const std::vector<std::size_t>& x) const {
    Rational p = 1;
    for (std::size_t i = 0; i < variables.size(); ++i) p *= cpts[i].at(config_of(variables[i], x))[x[i]];
    return p;
}

Rational DiscreteBN::intervened_joint(const std::vector<std::size_t>& x, std::size_t var, std::size_t value) const {
    if (x.at(var) != value) return 0;
    Rational p = 1;
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (i != var) p *= cpts[i].at(config_of(variables[i], x))[x[i]];
    return p;
}

// ---------------------------------------------------------------- parsing

DiscreteBN parse_bn(std::string_view text) {
    struct Pending {
        std::string name;
        std::vector<std::string> values;
        std::vector<detail::Token> parents;
        std::map<std::vector<std::string>, std::pair<std::vector<Rational>, detail::Token>> rows;
        detail::Token decl;
    };
    std::vector<Pending> declared;
    std::vector<detail::Token> order;
    auto find = [&](const detail::Token& t) -> Pending& {
        for (auto& p : declared)
            if (p.name == t.text) return p;
        throw ParseError("unknown variable " + t.text, t.line, t.column);
    };

    for (const auto& line : detail::tokenize(text, "|:")) {
        const auto& head = line.tokens[0];
        const auto& tk = line.tokens;
        if (head.text == "var") {
            if (tk.size() < 4) throw ParseError("expected 'var <name> <value> <value>...'", line.number, head.column);
            for (const auto& p : declared)
                if (p.name == tk[1].text) throw ParseError("variable " + tk[1].text + " declared twice", tk[1].line, tk[1].column);
            Pending p{tk[1].text, {}, {}, {}, tk[1]};
            for (std::size_t i = 2; i < tk.size(); ++i) {
                if (std::count(p.values.begin(), p.values.end(), tk[i].text))
                    throw ParseError("value " + tk[i].text + " repeated", tk[i].line, tk[i].column);
                p.values.push_back(tk[i].text);
            }
            declared.push_back(std::move(p));
        } else if (head.text == "parents") {
            if (tk.size() < 2) throw ParseError("expected 'parents <name> <names...>'", line.number, head.column);
            auto& p = find(tk[1]);
            p.parents.assign(tk.begin() + 2, tk.end());
        } else if (head.text == "varorder") {
            order.assign(tk.begin() + 1, tk.end());
        } else if (head.text == "cpt") {
            if (tk.size() < 3 || tk[2].text != "|")
                throw ParseError("expected 'cpt <name> | <config> : <p...>'", line.number, head.column);
            auto& p = find(tk[1]);
            std::size_t colon = 3;
            while (colon < tk.size() && tk[colon].text != ":") ++colon;
            if (colon == tk.size()) throw ParseError("missing ':' in cpt row", line.number, head.column);
            std::vector<std::string> config;
            for (std::size_t i = 3; i < colon; ++i) config.push_back(tk[i].text);
            std::vector<Rational> dist;
            for (std::size_t i = colon + 1; i < tk.size(); ++i) {
                auto r = parse_rational(tk[i].text);
                if (!r || *r > 1) throw ParseError("bad probability '" + tk[i].text + "'", tk[i].line, tk[i].column);
                dist.push_back(*r);
            }
            if (p.rows.count(config)) throw ParseError("cpt row repeated", line.number, head.column);
            p.rows.emplace(config, std::make_pair(std::move(dist), head));
        } else {
            throw ParseError("unknown directive '" + head.text + "'", line.number, head.column);
        }
    }
    if (declared.empty()) throw ParseError("no variables declared", 1, 1);

    std::vector<std::size_t> perm;
    if (order.empty()) {
        for (std::size_t i = 0; i < declared.size(); ++i) perm.push_back(i);
    } else {
        for (const auto& t : order) {
            std::size_t i = &find(t) - declared.data();
            if (std::count(perm.begin(), perm.end(), i)) throw ParseError(t.text + " repeated in varorder", t.line, t.column);
            perm.push_back(i);
        }
        if (perm.size() != declared.size())
            throw ParseError("varorder must list every variable", order.front().line, order.front().column);
    }

    DiscreteBN bn;
    std::map<std::string, std::size_t> position;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        auto& p = declared[perm[k]];
        BnVariable v{p.name, p.values, {}};
        for (const auto& t : p.parents) {
            auto it = position.find(t.text);
            if (it == position.end()) {
                find(t);
                throw ParseError("parent " + t.text + " of " + p.name + " does not come earlier in the order", t.line,
                                 t.column);
            }
            if (std::count(v.parents.begin(), v.parents.end(), it->second))
                throw ParseError("parent " + t.text + " repeated", t.line, t.column);
            v.parents.push_back(it->second);
        }
        std::map<std::vector<std::size_t>, std::vector<Rational>> cpt;
        for (auto& [config, row] : p.rows) {
            const auto& [dist, at] = row;
            if (config.size() != v.parents.size())
                throw ParseError("cpt row for " + p.name + " needs " + std::to_string(v.parents.size()) + " parent values",
                                 at.line, at.column);
            std::vector<std::size_t> idx;
            for (std::size_t j = 0; j < config.size(); ++j) {
                const auto& pv = bn.variables[v.parents[j]].values;
                auto f = std::find(pv.begin(), pv.end(), config[j]);
                if (f == pv.end())
                    throw ParseError("unknown value " + config[j] + " for " + bn.variables[v.parents[j]].name, at.line,
                                     at.column);
                idx.push_back(static_cast<std::size_t>(f - pv.begin()));
            }
            if (dist.size() != v.values.size())
                throw ParseError("cpt row for " + p.name + " needs " + std::to_string(v.values.size()) + " probabilities",
                                 at.line, at.column);
            Rational sum = 0;
            for (const auto& q : dist) sum += q;
            if (sum != 1) throw ParseError("cpt row for " + p.name + " sums to " + to_string(sum), at.line, at.column);
            cpt.emplace(std::move(idx), dist);
        }
        std::size_t rows = 1;
        for (std::size_t par : v.parents) rows *= bn.variables[par].values.size();
        if (cpt.size() != rows)
            throw ParseError("cpt for " + p.name + " has " + std::to_string(cpt.size()) + " of " +
                                 std::to_string(rows) + " rows",
                             p.decl.line, p.decl.column);
        position[p.name] = k;
        bn.variables.push_back(std::move(v));
        bn.cpts.push_back(std::move(cpt));
    }
    return bn;
}

// ---------------------------------------------------------------- tree

namespace {

std::string assignment_name(const DiscreteBN& bn, const std::vector<std::size_t>& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += (i ? "," : "") + bn.variables[i].name + "=" + bn.variables[i].values[x[i]];
    return s;
}

std::string row_symbol(const DiscreteBN& bn, std::size_t var, const std::vector<std::size_t>& x, std::size_t value) {
    const auto& v = bn.variables[var];
    std::string s = "P(" + v.name + "=" + v.values[value];
    for (std::size_t j = 0; j < v.parents.size(); ++j) {
        const auto& p = bn.variables[v.parents[j]];
        s += (j ? "," : "|") + p.name + "=" + p.values[x[v.parents[j]]];
    }
    return s + ")";
}

}  // namespace

std::vector<std::vector<std::size_t>> leaf_assignments(const DiscreteBN& bn) {
    std::vector<std::vector<std::size_t>> out{{}};
    for (const auto& v : bn.variables) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& x : out)
            for (std::size_t k = 0; k < v.values.size(); ++k) {
                next.push_back(x);
                next.back().push_back(k);
            }
        out = std::move(next);
    }
    return out;
}

BnTree bn_to_tree(const DiscreteBN& bn) {
    TreeBuilder b;
    b.set_root("root");
    std::set<std::string> bound;
    std::vector<std::size_t> x;
    auto grow = [&](auto&& self, const std::string& at) -> void {
        std::size_t var = x.size();
        if (var == bn.variables.size()) return;
        const auto& dist = bn.cpts[var].at(config_of(bn.variables[var], x));
        for (std::size_t k = 0; k < bn.variables[var].values.size(); ++k) {
            x.push_back(k);
            std::string child = assignment_name(bn, x);
            std::string sym = row_symbol(bn, var, x, k);
            b.add_edge(at, child, EdgeLabel::symbol(sym));
            if (bound.insert(sym).second) b.bind(sym, dist[k]);
            self(self, child);
            x.pop_back();
        }
    };
    if (bn.variables.empty()) b.add_node("root");
    grow(grow, "root");
    auto tree = b.build();
    auto stages = compute_stages(tree, StageMode::symbolic);
    return {std::move(tree), std::move(stages)};
}

// ---------------------------------------------------------------- shape

bool BnShapeReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

BnShapeReport check_bn_ceg_shape(const CegModel& model) {
    BnShapeReport r;
    const auto& g = model.graph;
    const auto& tree = model.tree;

    Check length{"uniform_length", true, ""};
    auto paths = ceg_paths(g);
    for (const auto& p : paths)
        if (p.size() != paths.front().size()) {
            length.passed = false;
            length.witness = "root-to-sink paths of lengths " + std::to_string(paths.front().size()) + " and " +
                             std::to_string(p.size());
            break;
        }

    Check depth{"stage_depth", true, ""};
    std::map<std::size_t, std::vector<std::size_t>> sizes_at;  // depth -> stage sizes
    for (const auto& block : model.stages.blocks) {
        std::size_t d = tree.depth(block.front());
        for (NodeIndex s : block)
            if (tree.depth(s) != d && depth.passed) {
                depth.passed = false;
                depth.witness = "stage of " + tree.name(block.front()) + " mixes depths " + std::to_string(d) + " and " +
                                std::to_string(tree.depth(s)) + " (" + tree.name(s) + ")";
            }
        sizes_at[d].push_back(block.size());
    }

    Check size{"stage_size", true, ""};
    for (const auto& [d, sizes] : sizes_at)
        if (std::adjacent_find(sizes.begin(), sizes.end(), std::not_equal_to<>()) != sizes.end()) {
            size.passed = false;
            size.witness = "stages at depth " + std::to_string(d) + " have different sizes";
            break;
        }
    r.checks = {length, depth, size};
    return r;
}

Manipulation do_to_manipulation(const DiscreteBN& bn, const ProbabilityTree& tree, std::string_view variable,
                                std::string_view value) {
    std::size_t var = bn.index_of(variable);
    std::size_t k = bn.value_index(var, value);
    Manipulation m;
    for (NodeIndex s : tree.situations()) {
        if (tree.depth(s) != var) continue;
        std::vector<Rational> dist(tree.out_edges(s).size(), Rational(0));
        dist.at(k) = 1;
        m.replacements[s] = std::move(dist);
    }
    if (!is_positioned(tree, m) || !is_staged(tree, m))
        throw std::logic_error("do(" + std::string(variable) + ") is not positioned and staged");
    return m;
}

}  // namespace ceg
