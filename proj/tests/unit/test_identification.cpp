#include "ceg/error.hpp"
#include "ceg/identification.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "scenarios.hpp"

#include <gtest/gtest.h>

using namespace ceg;
using namespace ceg::testing;

namespace {

struct Setup {
    CegModel idle;
    Manipulation m;
    CegModel manipulated;
};

Setup load(const std::string& tree, const std::string& manip) {
    auto t = fixture_tree(tree);
    auto m = parse_manipulation(fixture_text(manip), t);
    auto idle = build_model(t);
    auto manipulated = build_model(apply(t, m));
    return {std::move(idle), std::move(m), std::move(manipulated)};
}

EventVariable fixture_variable(const std::string& name, const ProbabilityTree& t) {
    return parse_variable(fixture_text(name), t);
}

// P^(value) from exact leaf products under the manipulation.
Distribution oracle(const ProbabilityTree& t, const Manipulation& m, const EventVariable& y) {
    auto probs = leaf_probabilities(t, &m);
    Distribution d;
    for (const auto& v : y.values) d[v] = Rational(0);
    for (std::size_t ev = 0; ev < probs.size(); ++ev) *d[y.values[y.value_of_event[ev]]] += probs[ev];
    return d;
}

SuffixVariable satisfaction(const CegModel& m, VertexIndex w) {
    SuffixVariable y{"S", {}};
    for (const auto& suffix : suffix_paths(m.graph, w)) {
        const auto& last = m.graph.edges[suffix.back()];
        y.value_of[suffix] = last.label.is_residual() ? "unsatisfied" : "satisfied";
    }
    return y;
}

}  // namespace

TEST(Variable, ParseAndSerialize) {
    auto t = fixture_tree("university_z.tree");
    auto z = fixture_variable("university_z_Z.var", t);
    EXPECT_EQ(z.values, (std::vector<std::string>{"0", "1"}));
    auto again = parse_variable(serialize_variable(z, t), t);
    EXPECT_EQ(again.value_of_event, z.value_of_event);
    EXPECT_THROW(parse_variable("var Z { 0: c3_S }", t), ValidationError);
    EXPECT_THROW(parse_variable("var Z { 0: c3_S ", t), ParseError);
}

TEST(Variable, ExtendAddsZeroBlock) {
    auto p = load("university.tree", "university.manip");
    auto w = resolve_position(p.idle, "v3");
    auto yhat = satisfaction(p.idle, w);
    auto y = extend_variable(p.idle, w, yhat);
    EXPECT_EQ(y.values.size(), 3u);
    EXPECT_EQ(std::count(y.values.begin(), y.values.end(), "0"), 1);

    SuffixVariable bad{"B", {}};
    for (const auto& s : suffix_paths(p.idle.graph, w)) bad.value_of[s] = "0";
    EXPECT_THROW(extend_variable(p.idle, w, bad), PreconditionError);
}

TEST(Lemma1, University) {
    auto p = load("university.tree", "university.manip");
    auto w = resolve_position(p.idle, "v3");
    auto r = lemma1_check(p.idle, p.manipulated, w, satisfaction(p.idle, w));
    ASSERT_EQ(r.identities.size(), 4u);
    EXPECT_TRUE(r.holds());
    auto probs = leaf_probabilities(p.idle.tree);
    EXPECT_EQ(r.p_w, mass_through(p.idle.tree, probs, p.idle.graph.vertices[w].members));
    EXPECT_EQ(*r.yhat_manipulated.at("satisfied"), Rational(4, 5));
}

TEST(Lemma1, RootCollapses) {
    auto p = load("university.tree", "university.manip");
    auto t = p.idle.tree;
    auto idle = build_model(t);
    auto r = lemma1_check(idle, build_model(t), idle.graph.root, satisfaction(idle, idle.graph.root));
    EXPECT_TRUE(r.holds());
    EXPECT_EQ(r.p_w, 1);
}

TEST(Lemma1, RejectsUnforced) {
    auto t = fixture_tree("university.tree");
    auto idle = build_model(t);
    auto m = parse_manipulation("force v1 -> v3\n", t);
    auto w = resolve_position(idle, "v3");
    EXPECT_THROW(lemma1_check(idle, build_model(apply(t, m)), w, satisfaction(idle, w)), PreconditionError);
}

TEST(ForcedSet, Bxya) {
    auto p = load("bxya.tree", "bxya.manip");
    auto y = fixture_variable("bxya_Y.var", p.idle.tree);
    std::vector<VertexIndex> W{resolve_position(p.idle, "A1B1X1"), resolve_position(p.idle, "A0B1X1")};
    auto r = identify_forced_set(p.idle, p.manipulated, W, y);
    EXPECT_TRUE(r.agree);
    EXPECT_EQ(r.formula, oracle(p.idle.tree, p.m, y));
    EXPECT_EQ(*r.formula.at("1"), Rational(2, 5) * Rational(4, 5) + Rational(3, 5) * Rational(3, 5));
}

TEST(ForcedSet, RejectsNonAmenable) {
    auto t = fixture_tree("bxya.tree");
    auto idle = build_model(t);
    auto m = parse_manipulation(fixture_text("bxya.manip") + "set r A1 1/2\nset r A0 1/2\n", t);
    auto y = fixture_variable("bxya_Y.var", t);
    std::vector<VertexIndex> W{resolve_position(idle, "A1B1X1"), resolve_position(idle, "A0B1X1")};
    EXPECT_THROW(identify_forced_set(idle, build_model(apply(t, m)), W, y), PreconditionError);
}

TEST(FindWz, UniversityBlocks) {
    auto p = load("university_z.tree", "university_z.manip");
    auto z = fixture_variable("university_z_Z.var", p.idle.tree);
    for (std::size_t zi = 0; zi < 2; ++zi) {
        std::vector<char> omega(z.value_of_event.size());
        for (std::size_t ev = 0; ev < omega.size(); ++ev) omega[ev] = z.value_of_event[ev] == zi;
        auto found = find_wz(p.idle, omega);
        ASSERT_TRUE(found.positions);
        ASSERT_EQ(found.positions->size(), 1u);
        EXPECT_EQ(p.idle.graph.display(found.positions->front()), zi == 0 ? "[c0]" : "[l0]");
    }
    std::vector<char> single(z.value_of_event.size(), 0);
    single[0] = 1;
    auto none = find_wz(p.idle, single);
    EXPECT_FALSE(none.positions);
    EXPECT_FALSE(none.witness.empty());
}

TEST(Backdoor, University) {
    auto p = load("university_z.tree", "university_z.manip");
    auto z = fixture_variable("university_z_Z.var", p.idle.tree);
    auto y = fixture_variable("university_z_Y.var", p.idle.tree);
    auto W = infer_forced_set(p.idle, p.m);
    ASSERT_EQ(W.size(), 2u);
    auto r = backdoor_identify(p.idle, p.manipulated, W, z, y);
    EXPECT_TRUE(r.identified);
    ASSERT_EQ(r.terms.size(), 2u);
    EXPECT_EQ(r.terms[0].p_z + r.terms[1].p_z, 1);
    EXPECT_EQ(p.idle.graph.display(r.terms[0].w_of_z.at(0)), "[c3,c5]");
    EXPECT_EQ(p.idle.graph.display(r.terms[1].w_of_z.at(0)), "[l4,l6]");
    auto want = oracle(p.idle.tree, p.m, y);
    EXPECT_EQ(r.formula, want);
    EXPECT_EQ(*r.formula.at("1"),
              *r.terms[0].conditional.at("1") * r.terms[0].p_z + *r.terms[1].conditional.at("1") * r.terms[1].p_z);
    EXPECT_TRUE(r.agree);
}

TEST(Backdoor, Brick) {
    auto p = load("brick.tree", "brick.manip");
    auto z = fixture_variable("brick_Z.var", p.idle.tree);
    auto y = fixture_variable("brick_X6.var", p.idle.tree);
    auto W = infer_forced_set(p.idle, p.m);
    auto r = backdoor_identify(p.idle, p.manipulated, W, z, y);
    EXPECT_TRUE(r.identified);
    ASSERT_EQ(r.terms.size(), 3u);
    EXPECT_EQ(r.formula, oracle(p.idle.tree, p.m, y));
}

TEST(Backdoor, UnknownZBlockFailsConditionI) {
    auto p = load("university_z.tree", "university_z.manip");
    auto y = fixture_variable("university_z_Y.var", p.idle.tree);
    auto z = variable_from_function("Z", p.idle.tree.leaves().size(),
                                    [](std::size_t ev) { return ev == 0 ? std::string("1") : std::string("0"); });
    auto r = backdoor_identify(p.idle, p.manipulated, infer_forced_set(p.idle, p.m), z, y);
    EXPECT_FALSE(r.identified);
    auto it = std::find_if(r.conditions.begin(), r.conditions.end(), [](const Check& c) { return c.name == "condition_i"; });
    ASSERT_NE(it, r.conditions.end());
    EXPECT_FALSE(it->passed);
}

TEST(IdentificationProperty, Lemma1) {
    Rng rng(51);
    for (int i = 0; i < 150; ++i) ASSERT_EQ(lemma1_scenario(rng), "");
}

TEST(IdentificationProperty, ForcedSets) {
    Rng rng(52);
    for (int i = 0; i < 40; ++i) ASSERT_EQ(forced_set_scenario(rng), "");
}

TEST(IdentificationProperty, Backdoor) {
    Rng rng(53);
    for (int i = 0; i < 20; ++i) ASSERT_EQ(backdoor_scenario(rng), "");
}

TEST(IdentificationProperty, BrokenBackdoorNamesCondition) {
    Rng rng(54);
    for (auto kind : {Breakage::block_without_wz, Breakage::changed_before_wz, Breakage::changed_after_w,
                      Breakage::changed_inside_block})
        for (int i = 0; i < 5; ++i) ASSERT_EQ(broken_backdoor_scenario(rng, kind), "") << expected_condition(kind);
}
