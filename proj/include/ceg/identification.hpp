#pragma once

#include "ceg/graph.hpp"
#include "ceg/intervention.hpp"
#include "ceg/variable.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ceg {

// Value -> probability. An empty optional marks an undefined conditional
// (zero denominator).
using Distribution = std::map<std::string, std::optional<Rational>>;

std::string to_string(const Distribution& d);

// Y(W) on the whole graph: paths through a member of W take the value of
// their suffix, every other path takes "0". Throws PreconditionError when
// yhat already uses "0" or misses a suffix.
EventVariable extend_variable(const CegModel& model, const std::vector<VertexIndex>& W, const SuffixVariable& yhat);
EventVariable extend_variable(const CegModel& model, VertexIndex w, const SuffixVariable& yhat);

// P(value) per value of y, from the tree's event probabilities.
Distribution distribution_of(const ProbabilityTree& tree, const EventVariable& y);

// Apply m and sum exact path probabilities per block of y.
Distribution brute_force_effect(const ProbabilityTree& tree, const Manipulation& m, const EventVariable& y);

struct Lemma1Report {
    std::vector<Check> identities;  // one per identity, named "1" to "4"
    Rational p_w;                   // idle P({w})
    Distribution yhat_idle;         // P(Yhat(w)=y) on C(w)
    Distribution yhat_manipulated;  // the same in the manipulated system
    bool holds() const;
};

// The four identities for a manipulation forced to w. Event-level sides come
// from the trees, C(w) sides from sums over suffix paths in the graphs.
// Throws PreconditionError unless the manipulation is forced to w.
Lemma1Report lemma1_check(const CegModel& idle, const CegModel& manipulated, VertexIndex w,
                          const SuffixVariable& yhat);

struct ForcedSetResult {
    AmenabilityReport amenability;
    Distribution formula;  // P(Y=y | W) in the idle system
    Distribution oracle;   // P^(Y=y)
    bool agree = false;
};

// Throws PreconditionError when the manipulation is not amenable, a member
// of W has probability 0, or y is not a function of the suffix after W.
ForcedSetResult identify_forced_set(const CegModel& idle, const CegModel& manipulated,
                                    const std::vector<VertexIndex>& W, const EventVariable& y);

struct WzSearch {
    std::optional<std::vector<VertexIndex>> positions;
    std::string witness;
};

// Earliest positions whose events lie inside omega, accepted when they are
// C-regular and their events make up omega exactly.
WzSearch find_wz(const CegModel& model, const std::vector<char>& omega);

struct ZTerm {
    std::string z;
    std::vector<VertexIndex> wz;
    std::vector<VertexIndex> w_of_z;
    Rational p_z;
    Distribution conditional;  // P(Y=y | W(z), Z=z)
};

struct IdentificationReport {
    std::vector<VertexIndex> W;
    std::string y_name;
    std::string z_name;
    std::vector<Check> conditions;
    std::vector<ZTerm> terms;
    bool identified = false;  // every condition passed
    Distribution formula;     // empty when some z has no W_z
    Distribution oracle;
    bool agree = false;
};

IdentificationReport backdoor_identify(const CegModel& idle, const CegModel& manipulated,
                                       const std::vector<VertexIndex>& W, const EventVariable& z,
                                       const EventVariable& y);

// Positions first reached with positive probability from manipulated
// situations, past which nothing is manipulated. Used when W is not given.
std::vector<VertexIndex> infer_forced_set(const CegModel& idle, const Manipulation& m);

}  // namespace ceg
