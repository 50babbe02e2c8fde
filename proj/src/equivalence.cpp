#include "ceg/equivalence.hpp"

#include "ceg/error.hpp"

#include <algorithm>
#include <map>

namespace ceg {

namespace {

bool name_less(const ProbabilityTree& t, NodeIndex a, NodeIndex b) { return natural_less(t.name(a), t.name(b)); }

// Groups nodes by key into blocks ordered by their smallest member name.
template <class Key>
void assign_blocks(const ProbabilityTree& tree, const std::map<Key, std::vector<NodeIndex>>& groups,
                   std::vector<int>& block_of, std::vector<std::vector<NodeIndex>>& blocks) {
    blocks.clear();
    for (const auto& [key, members] : groups) {
        auto sorted = members;
        std::sort(sorted.begin(), sorted.end(), [&](NodeIndex a, NodeIndex b) { return name_less(tree, a, b); });
        blocks.push_back(std::move(sorted));
    }
    std::sort(blocks.begin(), blocks.end(),
              [&](const auto& a, const auto& b) { return name_less(tree, a.front(), b.front()); });
    block_of.assign(tree.node_count(), -1);
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (NodeIndex v : blocks[i]) block_of[v] = static_cast<int>(i);
}

}  // namespace

StagePartition compute_stages(const ProbabilityTree& tree, StageMode mode) {
    StagePartition sp;
    sp.slot_key.resize(tree.edge_count());
    for (EdgeIndex e = 0; e < tree.edge_count(); ++e) {
        if (mode == StageMode::symbolic) {
            sp.slot_key[e] = tree.edge(e).label.key();
        } else {
            const auto& p = tree.probability(e);
            if (!p) throw PreconditionError("numeric stages need full bindings; edge out of " +
                                            tree.name(tree.edge(e).parent) + " is unbound");
            sp.slot_key[e] = to_string(*p);
        }
    }
    std::map<std::vector<std::string>, std::vector<NodeIndex>> groups;
    for (NodeIndex v : tree.situations()) {
        std::vector<std::string> keys;
        for (EdgeIndex e : tree.out_edges(v)) keys.push_back(sp.slot_key[e]);
        std::sort(keys.begin(), keys.end());
        groups[keys].push_back(v);
    }
    assign_blocks(tree, groups, sp.block_of, sp.blocks);

    for (const auto& assertion : tree.stage_assertions())
        for (NodeIndex v : assertion)
            if (!sp.same_block(v, assertion.front()))
                throw ValidationError("stage assertion violated: " + tree.name(assertion.front()) + " and " +
                                      tree.name(v) + " are not in the same stage");
    return sp;
}

PositionPartition compute_positions(const ProbabilityTree& tree, const StagePartition& stages) {
    // Signature of a situation: its stage block plus the sorted multiset of
    // (slot key, child signature id); leaves have id -1. Ids are interned on
    // full structural equality, so distinct futures never share an id.
    using Signature = std::pair<int, std::vector<std::pair<std::string, long>>>;
    std::map<Signature, long> intern;
    std::vector<long> sig_of(tree.node_count(), -1);

    const auto& order = tree.situations();  // preorder: children after parents
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeIndex v = *it;
        Signature s;
        s.first = stages.block_of.at(v);
        for (EdgeIndex e : tree.out_edges(v)) s.second.emplace_back(stages.slot_key.at(e), sig_of[tree.edge(e).child]);
        std::sort(s.second.begin(), s.second.end());
        auto [pos, inserted] = intern.emplace(std::move(s), static_cast<long>(intern.size()));
        sig_of[v] = pos->second;
    }

    std::map<long, std::vector<NodeIndex>> groups;
    for (NodeIndex v : tree.situations()) groups[sig_of[v]].push_back(v);
    PositionPartition pp;
    assign_blocks(tree, groups, pp.block_of, pp.blocks);

    pp.signature.resize(pp.blocks.size());
    for (std::size_t b = 0; b < pp.blocks.size(); ++b) {
        NodeIndex rep = pp.blocks[b].front();
        std::vector<std::string> parts;
        for (EdgeIndex e : tree.out_edges(rep)) {
            NodeIndex c = tree.edge(e).child;
            std::string target = tree.is_leaf(c) ? "sink" : tree.name(pp.blocks[pp.block_of[c]].front());
            parts.push_back(stages.slot_key[e] + ":" + target);
        }
        std::sort(parts.begin(), parts.end());
        std::string sig = "stage" + std::to_string(stages.block_of[rep]) + "[";
        for (std::size_t i = 0; i < parts.size(); ++i) sig += (i ? "," : "") + parts[i];
        pp.signature[b] = sig + "]";
    }
    return pp;
}

StagePartition as_stages(const PositionPartition& positions, const StagePartition& stages) {
    StagePartition sp;
    sp.block_of = positions.block_of;
    sp.blocks = positions.blocks;
    sp.slot_key = stages.slot_key;
    return sp;
}

std::vector<std::vector<std::string>> block_names(const ProbabilityTree& tree,
                                                  const std::vector<std::vector<NodeIndex>>& blocks) {
    std::vector<std::vector<std::string>> out;
    for (const auto& b : blocks) {
        std::vector<std::string> names;
        for (NodeIndex v : b) names.push_back(tree.name(v));
        std::sort(names.begin(), names.end(), [](const auto& a, const auto& c) { return natural_less(a, c); });
        out.push_back(std::move(names));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return natural_less(a.front(), b.front()); });
    return out;
}

}  // namespace ceg
