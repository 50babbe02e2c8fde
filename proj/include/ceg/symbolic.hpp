#pragma once

// Polynomials in the edge symbols, for path probabilities of trees whose
// symbols are left unbound.

#include "ceg/rational.hpp"
#include "ceg/tree.hpp"

#include <map>
#include <string>
#include <vector>

namespace ceg {

class Polynomial {
public:
    // Sorted symbol -> exponent.
    using Monomial = std::map<std::string, unsigned>;

    Polynomial() = default;
    Polynomial(Rational constant);
    static Polynomial symbol(const std::string& name);

    const std::map<Monomial, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Substitutes bindings; throws PreconditionError if a symbol is missing.
    Rational evaluate(const std::map<std::string, Rational>& bindings) const;

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(const Polynomial& other);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    // e.g. "1 - pi3 - pi4"; constants last, monomials in map order.
    std::string str() const;

private:
    void add_term(const Monomial& m, const Rational& c);
    std::map<Monomial, Rational> terms_;
};

// The symbolic primitive of one edge: the symbol, the literal, or one minus
// the siblings. Bound symbols are kept symbolic.
Polynomial edge_polynomial(const ProbabilityTree& tree, EdgeIndex e);

// One factor per edge along the event, in path order.
std::vector<Polynomial> path_factors(const ProbabilityTree& tree, const AtomicEvent& event);

// Expanded product of path_factors.
Polynomial path_polynomial(const ProbabilityTree& tree, const AtomicEvent& event);

}  // namespace ceg
