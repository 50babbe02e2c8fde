#pragma once

#include "ceg/tree.hpp"

#include <string>
#include <vector>

namespace ceg {

enum class StageMode { symbolic, numeric };

// Blocks over situations. Within a block the child correspondence pairs
// edges with equal slot keys; ties between equal keys are interchangeable.
struct StagePartition {
    std::vector<int> block_of;                   // per node, -1 for leaves
    std::vector<std::vector<NodeIndex>> blocks;  // members in natural name order
    std::vector<std::string> slot_key;           // per tree edge

    bool same_block(NodeIndex a, NodeIndex b) const { return block_of.at(a) >= 0 && block_of[a] == block_of[b]; }
};

struct PositionPartition {
    std::vector<int> block_of;                   // per node, -1 for leaves (the sink)
    std::vector<std::vector<NodeIndex>> blocks;  // members in natural name order
    std::vector<std::string> signature;          // canonical text per block

    bool same_block(NodeIndex a, NodeIndex b) const { return block_of.at(a) >= 0 && block_of[a] == block_of[b]; }
};

// Symbolic: equal multisets of label keys. Numeric: equal multisets of
// resolved probabilities. Throws ValidationError if a "stage" assertion in
// the tree is violated, PreconditionError if numeric mode meets an unbound edge.
StagePartition compute_stages(const ProbabilityTree& tree, StageMode mode = StageMode::symbolic);

PositionPartition compute_positions(const ProbabilityTree& tree, const StagePartition& stages);

// Uses a position partition as a stage input (for the fixpoint property).
StagePartition as_stages(const PositionPartition& positions, const StagePartition& stages);

// Blocks as sorted name lists, blocks ordered by their first member.
std::vector<std::vector<std::string>> block_names(const ProbabilityTree& tree,
                                                  const std::vector<std::vector<NodeIndex>>& blocks);

}  // namespace ceg
