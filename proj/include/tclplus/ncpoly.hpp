#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tclplus/errors.hpp"

namespace tclplus::nc {

// Formal symbols of the perturbative expansion. Sigma symbols carry their
// lambda grade m (Sigma_m); L carries grade 1, P grade 0.
enum class Kind : std::uint8_t { Sigma, SigmaDagger, P, PDagger, L, LDagger };

struct Symbol {
    Kind kind;
    int order;  // lambda grade for Sigma kinds; 1 for L kinds; 0 for P kinds

    auto operator<=>(const Symbol&) const = default;
};

Symbol sigma(int m);
Symbol sigma_dagger(int m);
Symbol p();
Symbol p_dagger();
Symbol l();
Symbol l_dagger();

int grade(const Symbol& s);
std::string name(const Symbol& s);  // "S2", "S2dag", "P", "Pdag", "L", "Ldag"

using Word = std::vector<Symbol>;

int grade(const Word& w);

struct Monomial {
    std::int64_t coeff;
    Word factors;
};

// Sum of monomials with like terms merged and zero coefficients dropped.
// Terms are kept in the canonical presentation order: ascending grade, then
// longer words first, then lexicographic on the factor sequence.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(Monomial m);
    static Polynomial zero();
    static Polynomial one();  // the empty word

    void add_term(std::int64_t coeff, const Word& w);

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    friend Polynomial operator+(Polynomial a, const Polynomial& b);
    friend Polynomial operator-(Polynomial a, const Polynomial& b);

    // Product truncated to words of grade <= max_grade (negative: no cap).
    Polynomial multiply(const Polynomial& other, int max_grade = -1) const;

    // Sub-polynomial of words with the given total grade.
    Polynomial grade_part(int g) const;
    // Sub-polynomial of words containing no daggered symbols.
    Polynomial undaggered_part() const;
    // Sub-polynomial of words containing at least one daggered symbol.
    Polynomial daggered_part() const;

    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    std::vector<Monomial> monomials() const;  // canonical order

    bool operator==(const Polynomial& other) const { return terms_ == other.terms_; }

  private:
    std::map<Word, std::int64_t> terms_;
};

Symbol adjoint(const Symbol& s);
// Reverses the word and daggers every factor.
Word adjoint(const Word& w);
Polynomial adjoint(const Polynomial& p);

}  // namespace tclplus::nc
