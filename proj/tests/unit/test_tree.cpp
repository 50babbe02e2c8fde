#include "ceg/error.hpp"
#include "ceg/symbolic.hpp"
#include "ceg/tree.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace ceg;
using namespace ceg::testing;

namespace {

Polynomial sym(const char* s) { return Polynomial::symbol(s); }

AtomicEvent event_to(const ProbabilityTree& t, const char* leaf) { return t.events()[t.event_of_leaf(t.at(leaf))]; }

}  // namespace

TEST(Rational, ParsesDecimalsAndFractions) {
    EXPECT_EQ(*parse_rational("0.25"), Rational(1, 4));
    EXPECT_EQ(*parse_rational(".5"), Rational(1, 2));
    EXPECT_EQ(*parse_rational("2/7"), Rational(2, 7));
    EXPECT_EQ(*parse_rational("3"), Rational(3));
    EXPECT_FALSE(parse_rational("-1"));
    EXPECT_FALSE(parse_rational("1e3"));
    EXPECT_FALSE(parse_rational("1/0"));
    EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
    EXPECT_EQ(to_string(Rational(2)), "2");
}

TEST(Tree, SimpletreeShape) {
    auto t = fixture_tree("simpletree.tree", Bindings::optional);
    EXPECT_EQ(t.node_count(), 8u);
    EXPECT_EQ(t.events().size(), 5u);
    EXPECT_EQ(t.situations().size(), 3u);
    EXPECT_FALSE(t.fully_bound());
    EXPECT_THROW(fixture_tree("simpletree.tree"), ValidationError);
}

TEST(Tree, TableauFactors) {
    auto t = fixture_tree("simpletree.tree", Bindings::optional);
    auto f5 = path_factors(t, event_to(t, "v5"));
    ASSERT_EQ(f5.size(), 2u);
    EXPECT_EQ(f5[0], sym("pi1"));
    EXPECT_EQ(f5[1], Polynomial(1) - sym("pi3") - sym("pi4"));
    EXPECT_EQ(path_polynomial(t, event_to(t, "v2")), Polynomial(1) - sym("pi1"));
    EXPECT_EQ(path_polynomial(t, event_to(t, "v6")), sym("pi1") * sym("pi3") * sym("pi6"));
    auto sum = path_polynomial(t, event_to(t, "v6")) + path_polynomial(t, event_to(t, "v7"));
    EXPECT_EQ(sum, sym("pi1") * sym("pi3"));
}

TEST(Tree, EventProbabilitiesSumToOne) {
    auto t = fixture_tree("simpletree_bound.tree");
    Rational total = 0;
    for (const auto& p : event_probabilities(t)) total += p;
    EXPECT_EQ(total, 1);
    EXPECT_EQ(path_probability(t, event_to(t, "v4")), Rational(3, 5) * Rational(1, 5));
}

TEST(Tree, SumToOneViolation) {
    try {
        parse_tree("root a\nedge a b 0.6\nedge a c 0.5\n");
        FAIL() << "no error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("sum-to-one"), std::string::npos);
    }
}

TEST(Tree, ParseErrorsCarryPosition) {
    try {
        parse_tree("root a\nedge a b\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_GT(e.column(), 0u);
    }
    try {
        parse_tree("root a\nedge a b 1\nfrob a\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 1u);
    }
    try {
        parse_tree("root a\n  edge a b 3/2\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 12u);
    }
    EXPECT_THROW(parse_tree("root a\nroot b\n"), ParseError);
    EXPECT_THROW(parse_tree("root a\nedge a b 1\nedge c b 1\n"), ParseError);
}

TEST(Tree, StructuralErrors) {
    EXPECT_THROW(parse_tree(""), ValidationError);
    EXPECT_THROW(parse_tree("edge a b 1\nedge c d 1\n"), ValidationError);
    EXPECT_THROW(parse_tree("root a\nedge a b 1\nedge b a 1\n"), Error);
    EXPECT_THROW(parse_tree("root a\nedge a b _\nedge a c _\n"), ValidationError);
    EXPECT_THROW(parse_tree("root a\nedge a b p\nedge a c _\nbind p = 3/2\n"), ValidationError);
}

TEST(Tree, RootOnly) {
    auto t = parse_tree("root r\n");
    EXPECT_EQ(t.node_count(), 1u);
    ASSERT_EQ(t.events().size(), 1u);
    EXPECT_EQ(t.events()[0].path, std::vector<NodeIndex>{t.root()});
    EXPECT_EQ(path_probability(t, t.events()[0]), 1);
}

TEST(Tree, NaturalOrder) {
    EXPECT_TRUE(natural_less("v2", "v10"));
    EXPECT_FALSE(natural_less("v10", "v2"));
    EXPECT_TRUE(natural_less("a", "b"));
}

TEST(Tree, RoundTripFixtures) {
    for (const char* name : {"simpletree_bound.tree", "figure1.tree", "fax.tree", "abc.tree", "university.tree",
                             "university_z.tree", "brick.tree", "bxya.tree"}) {
        auto t = fixture_tree(name);
        auto again = parse_tree(serialize(t));
        EXPECT_TRUE(t.structurally_equal(again)) << name;
        EXPECT_EQ(serialize(again), serialize(t)) << name;
    }
}

TEST(TreeProperty, RandomTreesRoundTripAndNormalize) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        auto t = random_tree(rng);
        auto again = parse_tree(serialize(t));
        ASSERT_TRUE(t.structurally_equal(again));
        auto probs = event_probabilities(t);
        auto oracle = leaf_probabilities(t);
        ASSERT_EQ(probs, oracle);
        Rational total = 0;
        for (const auto& p : probs) total += p;
        ASSERT_EQ(total, 1);
    }
}

TEST(TreeProperty, PathProbabilityIsMonotoneAlongPaths) {
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        auto t = random_tree(rng);
        for (const auto& ev : t.events()) {
            Rational prefix = 1;
            for (std::size_t k = 1; k < ev.path.size(); ++k) {
                Rational next = prefix * t.require_probability(*t.edge_between(ev.path[k - 1], ev.path[k]));
                ASSERT_LE(next, prefix);
                prefix = next;
            }
            ASSERT_EQ(prefix, path_probability(t, ev));
        }
    }
}

TEST(Tree, PathProbabilityRejectsForeignEvents) {
    auto t = fixture_tree("figure1.tree");
    EXPECT_THROW(path_probability(t, AtomicEvent{{t.at("v1"), t.at("v3")}}), PreconditionError);
    EXPECT_THROW(path_probability(t, AtomicEvent{{t.root(), t.at("v1")}}), PreconditionError);
}
