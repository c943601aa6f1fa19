#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bs/poly.hpp"

namespace bs {

// A polynomial factor of a rational function together with its cached hash.
// Stored factors are primitive, have positive leading coefficient, carry no
// monomial content and are never constant.
struct FactorPoly {
    MPoly p;
    std::size_t h;
    explicit FactorPoly(MPoly q) : p(std::move(q)), h(p.hash()) {}
};

using FactorRef = std::shared_ptr<const FactorPoly>;

bool same_factor(const FactorRef& a, const FactorRef& b);

struct Factor {
    FactorRef f;
    int e;  // nonzero; negative exponents live in the denominator
};

// Rational function c * z^mono * prod f_i^e_i in factored form.
class RatFun {
public:
    RatFun() = default;
    explicit RatFun(int nvars) : n_(nvars), mono_(nvars) {}

    static RatFun constant(int nvars, const Q& c);
    static RatFun from_poly(const MPoly& p);
    static RatFun monomial(const ExpVec& m, const Q& c = Q(1));
    static RatFun variable(int nvars, int i) { return monomial(ExpVec::unit(nvars, i)); }
    static RatFun power_of(const MPoly& p, int e);
    static RatFun quotient(const MPoly& num, const MPoly& den);
    // Assemble without normalization checks; factors must already be normalized.
    static RatFun raw(int nvars, Q c, ExpVec mono, std::vector<Factor> fs);

    int nvars() const { return n_; }
    const Q& coeff() const { return c_; }
    const ExpVec& mono() const { return mono_; }
    const std::vector<Factor>& factors() const { return f_; }

    bool is_zero() const { return sgn(c_) == 0; }
    bool is_constant() const;
    bool is_polynomial() const;
    bool depends_on(int v) const;

    MPoly numerator() const;  // c * positive part, expanded
    MPoly denominator() const;  // negative part, expanded
    // (factor, multiplicity) pairs of the denominator, monomial variables included.
    std::vector<std::pair<MPoly, int>> denominator_factors() const;

    RatFun operator*(const RatFun& o) const;
    RatFun operator/(const RatFun& o) const { return *this * o.inv(); }
    RatFun operator+(const RatFun& o) const;
    RatFun operator-(const RatFun& o) const;
    RatFun operator-() const;
    RatFun operator*(const Q& q) const;
    RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
    RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
    RatFun inv() const;
    RatFun pow(int k) const;

    RatFun derivative(int v) const;
    // v <- num/den
    RatFun subst(int v, const MPoly& num, const MPoly& den) const;
    RatFun subst(int v, const RatFun& val) const;
    RatFun rename(const std::vector<int>& target, int new_nvars) const;

    // Leading monomial and its coefficient in the iterated Laurent order.
    std::pair<ExpVec, Q> leading_monomial() const;

    // Structural identity of the stored form.
    bool same_form(const RatFun& o) const;
    // Mathematical equality (via subtraction).
    bool equals(const RatFun& o) const { return (*this - o).is_zero(); }
    std::size_t signature_hash() const;  // ignores the constant
    bool same_signature(const RatFun& o) const;

    std::string to_string(const std::vector<std::string>& names) const;

private:
    int n_ = 0;
    Q c_{0};
    ExpVec mono_;
    std::vector<Factor> f_;

    void insert_factor(const FactorRef& f, int e);
    void absorb_poly(const MPoly& p, int e);
};

// p = c * z^m * rest with rest normalized (or the constant 1).
struct PolySplit {
    Q c;
    ExpVec mono;
    MPoly rest;
};
PolySplit split_poly(const MPoly& p);

// Divide the expanded numerator by denominator factors where exact.
RatFun cancel_common(const RatFun& r);

FactorRef make_factor(const MPoly& normalized);

}  // namespace bs
