// Command-line driver. Exit status: 0 success, 1 a requested check failed,
// 2 bad input.

#include "ceg/bn.hpp"
#include "ceg/equivalence.hpp"
#include "ceg/error.hpp"
#include "ceg/graph.hpp"
#include "ceg/identification.hpp"
#include "ceg/intervention.hpp"
#include "ceg/report_json.hpp"
#include "ceg/symbolic.hpp"
#include "ceg/tree.hpp"
#include "ceg/variable.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace ceg;
using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ProbabilityTree load_tree(const std::string& path, bool allow_unbound) {
    try {
        return parse_tree(read_file(path), allow_unbound ? Bindings::optional : Bindings::required);
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

std::vector<VertexIndex> resolve_set(const CegModel& m, const std::string& spec) {
    std::vector<VertexIndex> W;
    std::stringstream s(spec);
    std::string name;
    while (std::getline(s, name, '+'))
        if (!name.empty()) W.push_back(resolve_position(m, name));
    if (W.empty()) throw PreconditionError("empty position set '" + spec + "'");
    return W;
}

void print_blocks(const ProbabilityTree& tree, const std::vector<std::vector<NodeIndex>>& blocks, bool as_json,
                  const std::string& command, bool with_sink) {
    auto named = block_names(tree, blocks);
    if (as_json) {
        json body{{"blocks", named}};
        if (with_sink) body["sink"] = sink_id;
        std::cout << document(command, body).dump(2) << "\n";
        return;
    }
    for (const auto& block : named) {
        std::string line = "{";
        for (const auto& n : block) line += (line.size() > 1 ? "," : "") + n;
        std::cout << line << "}\n";
    }
    if (with_sink) std::cout << sink_id << "\n";
}

void print_distribution(const Distribution& d) {
    for (const auto& [value, p] : d) std::cout << "  " << value << "  " << (p ? to_string(*p) : "undefined") << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Chain event graphs: build, manipulate, identify"};
    app.require_subcommand(1);
    bool as_json = false, allow_unbound = false, numeric = false, dot = false;
    std::string tree_path, manip_path, target_path, given_path, forced, checks, bn_path, variable, value;

    auto tree_arg = [&](CLI::App* sub) {
        sub->add_option("tree", tree_path, "tree file")->required();
        sub->add_flag("--allow-unbound", allow_unbound, "accept symbols without bindings");
    };
    auto json_flag = [&](CLI::App* sub) { sub->add_flag("--json", as_json, "JSON output"); };

    auto* validate = app.add_subcommand("validate", "parse and validate a tree");
    tree_arg(validate);
    json_flag(validate);

    auto* atoms = app.add_subcommand("atoms", "list atomic events and their probabilities");
    tree_arg(atoms);
    json_flag(atoms);

    auto* stages = app.add_subcommand("stages", "print the stage partition");
    tree_arg(stages);
    json_flag(stages);
    stages->add_flag("--numeric", numeric, "compare resolved probabilities instead of labels");

    auto* positions = app.add_subcommand("positions", "print the position partition");
    tree_arg(positions);
    json_flag(positions);
    positions->add_flag("--numeric", numeric, "compare resolved probabilities instead of labels");

    auto* build = app.add_subcommand("build", "build the CEG");
    tree_arg(build);
    json_flag(build);
    build->add_flag("--numeric", numeric, "compare resolved probabilities instead of labels");
    build->add_flag("--dot", dot, "Graphviz output");

    auto* manipulate = app.add_subcommand("manipulate", "apply a manipulation");
    tree_arg(manipulate);
    manipulate->add_option("manipulation", manip_path, "manipulation file")->required();
    manipulate->add_option("--check", checks, "comma list of positioned, staged, forced:W, amenable:W (W as a+b)");
    manipulate->add_flag("--dot", dot, "Graphviz output of the manipulated CEG");
    json_flag(manipulate);

    auto* identify = app.add_subcommand("identify", "back-door identification against the oracle");
    identify->add_option("tree", tree_path, "tree file")->required();
    identify->add_option("manipulation", manip_path, "manipulation file")->required();
    identify->add_option("--target", target_path, "variable file for Y")->required();
    identify->add_option("--given", given_path, "variable file for Z")->required();
    identify->add_option("--forced", forced, "positions W as a+b (default: inferred from the manipulation)");
    json_flag(identify);

    auto* oracle = app.add_subcommand("oracle", "distribution of Y after the manipulation, by enumeration");
    oracle->add_option("tree", tree_path, "tree file")->required();
    oracle->add_option("manipulation", manip_path, "manipulation file")->required();
    oracle->add_option("--target", target_path, "variable file for Y")->required();
    json_flag(oracle);

    auto* bn2ceg = app.add_subcommand("bn2ceg", "convert a Bayesian network");
    bn2ceg->add_option("bn", bn_path, "BN file")->required();
    bn2ceg->add_flag("--dot", dot, "Graphviz output of the CEG");
    bn2ceg->add_option("--do", variable, "variable to intervene on");
    bn2ceg->add_option("--value", value, "value for --do");
    json_flag(bn2ceg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    StageMode mode = numeric ? StageMode::numeric : StageMode::symbolic;

    if (*validate) {
        auto tree = load_tree(tree_path, allow_unbound);
        if (as_json)
            std::cout << document("validate", {{"valid", true},
                                               {"nodes", tree.node_count()},
                                               {"events", tree.events().size()},
                                               {"fully_bound", tree.fully_bound()}})
                             .dump(2)
                      << "\n";
        else
            std::cout << "ok: " << tree.node_count() << " nodes, " << tree.events().size() << " atomic events\n";
        return 0;
    }
    if (*atoms) {
        auto tree = load_tree(tree_path, allow_unbound);
        json rows = json::array();
        for (const auto& ev : atomic_events(tree)) {
            std::string path;
            for (NodeIndex v : ev.path) path += (path.empty() ? "" : " ") + tree.name(v);
            std::string p = tree.fully_bound() ? to_string(path_probability(tree, ev)) : path_polynomial(tree, ev).str();
            if (as_json) rows.push_back({{"path", path}, {"probability", p}});
            else std::cout << path << "  " << p << "\n";
        }
        if (as_json) std::cout << document("atoms", {{"events", rows}}).dump(2) << "\n";
        return 0;
    }
    if (*stages) {
        auto tree = load_tree(tree_path, allow_unbound);
        print_blocks(tree, compute_stages(tree, mode).blocks, as_json, "stages", false);
        return 0;
    }
    if (*positions) {
        auto tree = load_tree(tree_path, allow_unbound);
        auto s = compute_stages(tree, mode);
        print_blocks(tree, compute_positions(tree, s).blocks, as_json, "positions", true);
        return 0;
    }
    if (*build) {
        auto model = build_model(load_tree(tree_path, allow_unbound), mode);
        const auto& g = model.graph;
        if (dot) {
            std::cout << export_dot(g);
            return 0;
        }
        json vertices = json::array(), edges = json::array(), undirected = json::array();
        for (VertexIndex v = 0; v < g.vertex_count(); ++v) vertices.push_back(g.display(v));
        for (const auto& e : g.edges)
            edges.push_back({{"from", g.display(e.from)},
                             {"to", g.display(e.to)},
                             {"label", e.key},
                             {"probability", e.prob ? json(to_string(*e.prob)) : json(nullptr)}});
        for (const auto& [a, b] : g.undirected) undirected.push_back({g.display(a), g.display(b)});
        if (as_json) {
            std::cout << document("build", {{"vertices", vertices}, {"edges", edges}, {"undirected", undirected}})
                             .dump(2)
                      << "\n";
        } else {
            std::cout << g.vertex_count() << " positions, " << g.edges.size() << " edges, " << ceg_paths(g).size()
                      << " root-to-sink paths\n";
            for (const auto& e : g.edges)
                std::cout << g.display(e.from) << " -> " << g.display(e.to) << "  " << e.key
                          << (e.prob ? "  " + to_string(*e.prob) : "") << "\n";
            for (const auto& [a, b] : g.undirected) std::cout << g.display(a) << " -- " << g.display(b) << "\n";
        }
        return 0;
    }
    if (*manipulate) {
        auto idle = build_model(load_tree(tree_path, allow_unbound));
        auto m = parse_manipulation(read_file(manip_path), idle.tree);
        auto manipulated = build_model(apply(idle.tree, m));
        if (checks.empty()) {
            if (dot) std::cout << export_dot(manipulated.graph);
            else if (as_json)
                std::cout << document("manipulate", {{"tree", serialize(manipulated.tree)}}).dump(2) << "\n";
            else std::cout << serialize(manipulated.tree);
            return 0;
        }
        json results = json::array();
        bool all = true;
        std::stringstream list(checks);
        std::string item;
        while (std::getline(list, item, ',')) {
            if (item.empty()) continue;
            auto colon = item.find(':');
            std::string kind = item.substr(0, colon);
            json entry;
            if (kind == "positioned" || kind == "staged") {
                bool ok = kind == "positioned" ? is_positioned(idle.tree, m) : is_staged(idle.tree, m);
                entry = to_json(Check{kind, ok, ok ? "" : "the partition after manipulation does not coarsen the idle one"});
            } else if ((kind == "amenable" || kind == "forced") && colon != std::string::npos) {
                auto W = resolve_set(idle, item.substr(colon + 1));
                if (kind == "forced") {
                    auto c = forced_check(idle, manipulated, W);
                    c.name = "forced";
                    entry = to_json(c);
                } else {
                    auto r = assess_amenable(idle, manipulated, W);
                    entry = {{"name", "amenable"}, {"passed", r.amenable}, {"checks", to_json(r.checks)}};
                }
                entry["W"] = positions_json(idle.graph, W);
            } else {
                throw PreconditionError("unknown check '" + item + "'");
            }
            all = all && entry["passed"].get<bool>();
            results.push_back(entry);
        }
        auto doc = document("manipulate", {{"checks", results}, {"passed", all}});
        if (as_json || !all) std::cout << doc.dump(2) << "\n";
        else
            for (const auto& r : results) std::cout << r["name"].get<std::string>() << ": passed\n";
        return all ? 0 : 1;
    }
    if (*identify) {
        auto idle = build_model(load_tree(tree_path, false));
        auto m = parse_manipulation(read_file(manip_path), idle.tree);
        auto manipulated = build_model(apply(idle.tree, m));
        auto y = parse_variable(read_file(target_path), idle.tree);
        auto z = parse_variable(read_file(given_path), idle.tree);
        auto W = forced.empty() ? infer_forced_set(idle, m) : resolve_set(idle, forced);
        if (W.empty()) throw PreconditionError("could not infer W from the manipulation; pass --forced");
        auto r = backdoor_identify(idle, manipulated, W, z, y);
        auto doc = document("identify", to_json(r, idle.graph));
        bool ok = r.identified && r.agree;
        if (as_json) {
            std::cout << doc.dump(2) << "\n";
        } else {
            const auto& g = idle.graph;
            std::cout << "W = " << positions_json(g, r.W).dump() << "\n";
            for (const auto& c : r.conditions)
                std::cout << c.name << ": " << (c.passed ? "passed" : "FAILED  " + c.witness) << "\n";
            for (const auto& t : r.terms) {
                std::cout << z.name << "=" << t.z << "  P=" << to_string(t.p_z) << "  W_z=" << positions_json(g, t.wz).dump()
                          << "  W(z)=" << positions_json(g, t.w_of_z).dump() << "\n";
                print_distribution(t.conditional);
            }
            std::cout << "formula\n";
            print_distribution(r.formula);
            std::cout << "oracle\n";
            print_distribution(r.oracle);
            std::cout << "agree: " << (r.agree ? "yes" : "no") << "\n";
            if (!ok) std::cerr << doc.dump() << "\n";
        }
        return ok ? 0 : 1;
    }
    if (*oracle) {
        auto tree = load_tree(tree_path, false);
        auto m = parse_manipulation(read_file(manip_path), tree);
        auto y = parse_variable(read_file(target_path), tree);
        auto d = brute_force_effect(tree, m, y);
        if (as_json) std::cout << document("oracle", {{"variable", y.name}, {"distribution", to_json(d)}}).dump(2) << "\n";
        else {
            std::cout << y.name << "\n";
            print_distribution(d);
        }
        return 0;
    }
    if (*bn2ceg) {
        auto bn = parse_bn(read_file(bn_path));
        auto converted = bn_to_tree(bn);
        auto model = build_model(converted.tree);
        if (!variable.empty()) {
            auto m = do_to_manipulation(bn, converted.tree, variable, value);
            model = build_model(apply(converted.tree, m));
        }
        if (dot) {
            std::cout << export_dot(model.graph);
            return 0;
        }
        auto shape = check_bn_ceg_shape(model);
        if (as_json) {
            std::cout << document("bn2ceg", {{"tree", serialize(model.tree)},
                                             {"positions", model.graph.vertex_count()},
                                             {"shape", to_json(shape.checks)}})
                             .dump(2)
                      << "\n";
        } else {
            std::cout << serialize(model.tree);
            for (const auto& c : shape.checks)
                std::cout << "# " << c.name << ": " << (c.passed ? "passed" : "FAILED  " + c.witness) << "\n";
        }
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ceg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
