#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace bs {

using Q = mpq_class;
using Z = mpz_class;

// Hard cap on the number of variables of an ambient order.
constexpr int kMaxVars = 24;

class MathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integer exponent vector, one entry per ambient variable. Entries past n are zero.
struct ExpVec {
    std::array<int16_t, kMaxVars> e{};
    uint8_t n = 0;

    ExpVec() = default;
    explicit ExpVec(int nvars) : n(static_cast<uint8_t>(nvars)) {}
    static ExpVec from(const std::vector<int>& v);
    static ExpVec unit(int nvars, int i, int power = 1);

    int size() const { return n; }
    int16_t operator[](int i) const { return e[i]; }
    int16_t& operator[](int i) { return e[i]; }

    bool operator==(const ExpVec& o) const { return n == o.n && e == o.e; }
    ExpVec operator+(const ExpVec& o) const;
    ExpVec operator-(const ExpVec& o) const;
    ExpVec operator-() const;
    ExpVec scaled(int k) const;

    bool is_zero() const;
    bool nonnegative() const;
    int total() const;
    std::size_t hash() const;
    std::vector<int> to_vector() const;
};

struct ExpVecHash {
    std::size_t operator()(const ExpVec& v) const { return v.hash(); }
};

// Plain lexicographic comparison of exponent tuples (-1, 0, 1).
int exp_lex(const ExpVec& a, const ExpVec& b);

// Monomial order of the iterated Laurent field: z^a > z^b iff a <_lex b.
std::strong_ordering lex_cmp(const ExpVec& a, const ExpVec& b);
std::strong_ordering lex_cmp(const std::vector<int>& a, const std::vector<int>& b);

// z^a < 1 in the monomial order (first nonzero entry positive).
bool monomial_below_one(const ExpVec& a);

struct VarOrder {
    std::vector<std::string> names;
    int param_count = 0;

    int size() const { return static_cast<int>(names.size()); }
    int index(const std::string& name) const;  // -1 when absent
    void validate() const;
};

// Sparse polynomial with exact rational coefficients. Terms are kept sorted by
// ascending exponent tuple, so terms().front() is the leading monomial of the
// iterated Laurent order.
class MPoly {
public:
    struct Term {
        ExpVec m;
        Q c;
    };

    MPoly() = default;
    explicit MPoly(int nvars) : n_(nvars) {}

    static MPoly constant(int nvars, const Q& c);
    static MPoly variable(int nvars, int i, int power = 1);
    static MPoly monomial(const ExpVec& m, const Q& c);
    static MPoly from_terms(int nvars, std::vector<Term> terms);  // sorts and merges

    int nvars() const { return n_; }
    const std::vector<Term>& terms() const { return t_; }
    std::size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    Q constant_value() const;  // coefficient of the zero monomial
    const Term& lead() const { return t_.front(); }
    const Term& lex_last() const { return t_.back(); }

    bool operator==(const MPoly& o) const;
    bool operator!=(const MPoly& o) const { return !(*this == o); }

    MPoly operator+(const MPoly& o) const;
    MPoly operator-(const MPoly& o) const;
    MPoly operator-() const;
    MPoly operator*(const MPoly& o) const;
    MPoly operator*(const Q& c) const;
    MPoly& operator+=(const MPoly& o);
    MPoly& operator-=(const MPoly& o);
    MPoly pow(unsigned k) const;
    MPoly mul_monomial(const ExpVec& m) const;

    bool depends_on(int v) const;
    int degree(int v) const;      // -1 for zero
    int min_degree(int v) const;  // -1 for zero
    int total_degree() const;
    ExpVec min_exponents() const;  // componentwise minimum
    ExpVec max_exponents() const;

    MPoly derivative(int v) const;
    std::vector<MPoly> coeffs_in(int v) const;
    static MPoly from_coeffs(int nvars, int v, const std::vector<MPoly>& cs);
    MPoly coeff_of(int v, int power) const;

    // Substitute variable v by num/den, homogenized: returns sum a_j num^j den^(deg-j).
    MPoly subst_homogenized(int v, const MPoly& num, const MPoly& den) const;
    MPoly subst(int v, const MPoly& val) const;
    MPoly eval_at_zero(int v) const { return coeff_of(v, 0); }
    MPoly rename(const std::vector<int>& target, int new_nvars) const;
    // p(v <- 1/v) * v^deg_v
    MPoly reverse_in(int v) const;

    std::optional<MPoly> divide_exact(const MPoly& d) const;
    bool divisible_by(const MPoly& d) const { return divide_exact(d).has_value(); }

    // Rational c with p = c * q, q having coprime integer coefficients and
    // positive leading coefficient.
    Q content() const;
    MPoly primitive() const;

    std::size_t hash() const;
    bool less_than(const MPoly& o) const;  // deterministic total order
    std::string to_string(const VarOrder& ord) const;
    std::string to_string(const std::vector<std::string>& names) const;

private:
    int n_ = 0;
    std::vector<Term> t_;
    friend class PolyBuilder;
};

// Accumulates terms in arbitrary order.
class PolyBuilder {
public:
    explicit PolyBuilder(int nvars) : n_(nvars) {}
    void add(const ExpVec& m, const Q& c);
    void add(const MPoly& p, const Q& scale = Q(1));
    void add_product(const MPoly& a, const MPoly& b, const Q& scale = Q(1));
    MPoly build();

private:
    int n_;
    std::vector<MPoly::Term> buf_;
};

// Multivariate gcd over Q, normalized primitive with positive leading coefficient.
MPoly gcd(const MPoly& a, const MPoly& b);
// gcd of p and q viewed in K(others)[v]; content in the other variables removed.
MPoly poly_gcd_in(int v, const MPoly& p, const MPoly& q);
// content of p as a polynomial in v (gcd of coefficients), normalized.
MPoly content_in(int v, const MPoly& p);
// pseudo-remainder of a by b in v
MPoly prem(const MPoly& a, const MPoly& b, int v);

// Parse a polynomial in the given variable names (integers, rationals, + - * ^ parentheses).
MPoly parse_poly(const std::string& text, const std::vector<std::string>& names);

std::string q_to_string(const Q& q);
Z binomial(const Z& n, long k);  // generalized, 0 for k < 0

}  // namespace bs
