#pragma once

#include "ceg/equivalence.hpp"
#include "ceg/graph.hpp"
#include "ceg/intervention.hpp"
#include "ceg/tree.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ceg {

struct BnVariable {
    std::string name;
    std::vector<std::string> values;
    std::vector<std::size_t> parents;  // indices of earlier variables
};

// A discrete Bayesian network. Variables are held in tree order, so every
// parent precedes its child.
struct DiscreteBN {
    std::vector<BnVariable> variables;
    // Per variable: parent value indices (in parents order) -> distribution.
    std::vector<std::map<std::vector<std::size_t>, std::vector<Rational>>> cpts;

    std::size_t index_of(std::string_view name) const;  // throws PreconditionError
    std::size_t value_index(std::size_t var, std::string_view value) const;
    // P(x) for a full assignment of value indices.
    Rational joint(const std::vector<std::size_t>& x) const;
    // Truncated product for do(var = value).
    Rational intervened_joint(const std::vector<std::size_t>& x, std::size_t var, std::size_t value) const;
};

// Lines: `var <name> <values...>`, `parents <name> <names...>`,
// `cpt <name> | <parent values...> : <p ...>` and an optional
// `varorder <names...>` overriding declaration order.
DiscreteBN parse_bn(std::string_view text);

struct BnTree {
    ProbabilityTree tree;
    StagePartition stages;
};

// Levels follow variable order. Situations are named by their partial
// assignment ("X1=0,X2=1"), edges carry CPT-row symbols like "P(X2=1|X1=0)".
BnTree bn_to_tree(const DiscreteBN& bn);

// Full assignment (value indices) of each leaf, in event order.
std::vector<std::vector<std::size_t>> leaf_assignments(const DiscreteBN& bn);

struct BnShapeReport {
    std::vector<Check> checks;  // "uniform_length", "stage_depth", "stage_size"
    bool passed() const;
};

BnShapeReport check_bn_ceg_shape(const CegModel& model);

// Point mass on `value` at every situation of the variable's level. Throws
// std::logic_error if the result is not positioned and staged.
Manipulation do_to_manipulation(const DiscreteBN& bn, const ProbabilityTree& tree, std::string_view variable,
                                std::string_view value);

}  // namespace ceg
