#pragma once

#include "ceg/graph.hpp"
#include "ceg/tree.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ceg {

// A partition of the atomic events into labelled blocks. Events are indexed
// as in tree.events(); CEG paths correspond one-to-one.
struct EventVariable {
    std::string name;
    std::vector<std::string> values;                // block order
    std::vector<std::size_t> value_of_event;        // index into values
    std::size_t value_index(std::string_view value) const;  // throws PreconditionError
    std::vector<std::size_t> events_with(std::size_t value) const;
};

// `var Y { y1: leaf_a leaf_b ; y2: leaf_c }`; blocks must partition the leaves.
EventVariable parse_variable(std::string_view text, const ProbabilityTree& tree);

EventVariable variable_from_blocks(std::string name, const ProbabilityTree& tree,
                                   const std::vector<std::pair<std::string, std::vector<std::string>>>& blocks);

// Values in first-seen event order.
EventVariable variable_from_function(std::string name, std::size_t event_count,
                                     const std::function<std::string(std::size_t)>& value_of);

std::string serialize_variable(const EventVariable& y, const ProbabilityTree& tree);

// A variable on the sub-graph C(W): one value per path suffix that starts at
// a member of W. Suffixes are edge lists of the full graph.
struct SuffixVariable {
    std::string name;
    std::map<CegPath, std::string> value_of;
};

// Suffix of `path` from the first vertex in W, if the path meets W.
std::optional<CegPath> suffix_from(const ChainEventGraph& g, const CegPath& path, const std::vector<VertexIndex>& W);

// All suffix paths from w to the sink.
std::vector<CegPath> suffix_paths(const ChainEventGraph& g, VertexIndex w);

// Reads a leaf-level variable as a variable on C(W). Throws PreconditionError
// with a witness when two events sharing a suffix disagree.
SuffixVariable project_to_suffix(const CegModel& m, const std::vector<VertexIndex>& W, const EventVariable& y);

// Same check restricted to a subset of events; returns the offending pair of
// events on failure.
std::optional<std::pair<std::size_t, std::size_t>> suffix_conflict(const CegModel& m,
                                                                    const std::vector<VertexIndex>& W,
                                                                    const EventVariable& y,
                                                                    const std::vector<char>& scope);

}  // namespace ceg
