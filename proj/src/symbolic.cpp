#include "ceg/symbolic.hpp"

#include "ceg/error.hpp"

#include <sstream>

namespace ceg {

Polynomial::Polynomial(Rational constant) { add_term({}, constant); }

Polynomial Polynomial::symbol(const std::string& name) {
    Polynomial p;
    p.add_term({{name, 1u}}, 1);
    return p;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    for (const auto& [m, c] : other.terms_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
    Polynomial out;
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : other.terms_) {
            Monomial m = m1;
            for (const auto& [s, k] : m2) m[s] += k;
            out.add_term(m, c1 * c2);
        }
    *this = std::move(out);
    return *this;
}

Rational Polynomial::evaluate(const std::map<std::string, Rational>& bindings) const {
    Rational total = 0;
    for (const auto& [m, c] : terms_) {
        Rational term = c;
        for (const auto& [s, k] : m) {
            auto it = bindings.find(s);
            if (it == bindings.end()) throw PreconditionError("unbound symbol " + s);
            for (unsigned i = 0; i < k; ++i) term *= it->second;
        }
        total += term;
    }
    return total;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    auto emit = [&](const Monomial& m, const Rational& c) {
        Rational mag = c < 0 ? Rational(-c) : c;
        if (first) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool show_coeff = m.empty() || mag != 1;
        if (show_coeff) out << to_string(mag);
        bool sep = show_coeff;
        for (const auto& [s, k] : m) {
            if (sep) out << "*";
            out << s;
            if (k > 1) out << "^" << k;
            sep = true;
        }
    };
    for (const auto& [m, c] : terms_)
        if (!m.empty()) emit(m, c);
    if (auto it = terms_.find({}); it != terms_.end()) emit(it->first, it->second);
    return out.str();
}

Polynomial edge_polynomial(const ProbabilityTree& tree, EdgeIndex e) {
    const auto& label = tree.edge(e).label;
    switch (label.kind()) {
    case EdgeLabel::Kind::symbol: return Polynomial::symbol(label.name());
    case EdgeLabel::Kind::literal: return Polynomial(label.value());
    case EdgeLabel::Kind::residual: {
        Polynomial p(1);
        for (EdgeIndex s : tree.out_edges(tree.edge(e).parent))
            if (s != e) p -= edge_polynomial(tree, s);
        return p;
    }
    }
    return {};
}

std::vector<Polynomial> path_factors(const ProbabilityTree& tree, const AtomicEvent& event) {
    std::vector<Polynomial> out;
    for (std::size_t i = 1; i < event.path.size(); ++i) {
        auto e = tree.edge_between(event.path[i - 1], event.path[i]);
        if (!e) throw PreconditionError("event not in tree");
        out.push_back(edge_polynomial(tree, *e));
    }
    return out;
}

Polynomial path_polynomial(const ProbabilityTree& tree, const AtomicEvent& event) {
    Polynomial p(1);
    for (const auto& f : path_factors(tree, event)) p *= f;
    return p;
}

}  // namespace ceg
