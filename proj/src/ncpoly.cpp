#include "tclplus/ncpoly.hpp"

#include <algorithm>

namespace tclplus::nc {

Symbol sigma(int m) {
    if (m < 1) throw InvalidOrder("sigma: Sigma_m requires m >= 1");
    return Symbol{Kind::Sigma, m};
}

Symbol sigma_dagger(int m) {
    if (m < 1) throw InvalidOrder("sigma_dagger: Sigma_m requires m >= 1");
    return Symbol{Kind::SigmaDagger, m};
}

Symbol p() { return Symbol{Kind::P, 0}; }
Symbol p_dagger() { return Symbol{Kind::PDagger, 0}; }
Symbol l() { return Symbol{Kind::L, 1}; }
Symbol l_dagger() { return Symbol{Kind::LDagger, 1}; }

int grade(const Symbol& s) { return s.order; }

std::string name(const Symbol& s) {
    switch (s.kind) {
        case Kind::Sigma: return "S" + std::to_string(s.order);
        case Kind::SigmaDagger: return "S" + std::to_string(s.order) + "dag";
        case Kind::P: return "P";
        case Kind::PDagger: return "Pdag";
        case Kind::L: return "L";
        case Kind::LDagger: return "Ldag";
    }
    return "?";
}

int grade(const Word& w) {
    int g = 0;
    for (const Symbol& s : w) g += grade(s);
    return g;
}

Polynomial::Polynomial(Monomial m) { add_term(m.coeff, m.factors); }

Polynomial Polynomial::zero() { return Polynomial{}; }

Polynomial Polynomial::one() {
    Polynomial p;
    p.add_term(1, Word{});
    return p;
}

void Polynomial::add_term(std::int64_t coeff, const Word& w) {
    if (coeff == 0) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        terms_.emplace(w, coeff);
    } else {
        it->second += coeff;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    for (const auto& [w, c] : other.terms_) add_term(c, w);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    for (const auto& [w, c] : other.terms_) add_term(-c, w);
    return *this;
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

Polynomial Polynomial::multiply(const Polynomial& other, int max_grade) const {
    Polynomial out;
    for (const auto& [wa, ca] : terms_) {
        const int ga = grade(wa);
        if (max_grade >= 0 && ga > max_grade) continue;
        for (const auto& [wb, cb] : other.terms_) {
            if (max_grade >= 0 && ga + grade(wb) > max_grade) continue;
            Word w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            out.add_term(ca * cb, w);
        }
    }
    return out;
}

Polynomial Polynomial::grade_part(int g) const {
    Polynomial out;
    for (const auto& [w, c] : terms_)
        if (grade(w) == g) out.add_term(c, w);
    return out;
}

Polynomial Polynomial::undaggered_part() const {
    Polynomial out;
    for (const auto& [w, c] : terms_) {
        bool has_dagger = std::any_of(w.begin(), w.end(), [](const Symbol& s) {
            return s.kind == Kind::SigmaDagger || s.kind == Kind::PDagger ||
                   s.kind == Kind::LDagger;
        });
        if (!has_dagger) out.add_term(c, w);
    }
    return out;
}

Polynomial Polynomial::daggered_part() const {
    Polynomial out = *this;
    out -= undaggered_part();
    return out;
}

std::vector<Monomial> Polynomial::monomials() const {
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto& [w, c] : terms_) out.push_back(Monomial{c, w});
    // Presentation order: ascending grade, longer words first, then lex.
    std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
        const int ga = grade(a.factors), gb = grade(b.factors);
        if (ga != gb) return ga < gb;
        if (a.factors.size() != b.factors.size()) return a.factors.size() > b.factors.size();
        return a.factors < b.factors;
    });
    return out;
}

Symbol adjoint(const Symbol& s) {
    switch (s.kind) {
        case Kind::Sigma: return Symbol{Kind::SigmaDagger, s.order};
        case Kind::SigmaDagger: return Symbol{Kind::Sigma, s.order};
        case Kind::P: return Symbol{Kind::PDagger, 0};
        case Kind::PDagger: return Symbol{Kind::P, 0};
        case Kind::L: return Symbol{Kind::LDagger, 1};
        case Kind::LDagger: return Symbol{Kind::L, 1};
    }
    return s;
}

Word adjoint(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (Symbol& s : out) s = adjoint(s);
    return out;
}

Polynomial adjoint(const Polynomial& p) {
    Polynomial out;
    for (const Monomial& m : p.monomials()) out.add_term(m.coeff, adjoint(m.factors));
    return out;
}

}  // namespace tclplus::nc
