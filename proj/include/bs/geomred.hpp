#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bs/residue.hpp"

namespace bs {

// Dense polynomial in one variable with rational-function coefficients free of it.
struct UPoly {
    std::vector<RatFun> c;  // c[i] * v^i, no trailing zeros

    int deg() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c.empty(); }
    const RatFun& lc() const { return c.back(); }
    void trim();

    static UPoly from_poly(const MPoly& p, int v);
    RatFun to_ratfun(int nvars, int v) const;
};

UPoly operator+(const UPoly& a, const UPoly& b);
UPoly operator-(const UPoly& a, const UPoly& b);
UPoly operator*(const UPoly& a, const UPoly& b);
UPoly operator*(const UPoly& a, const RatFun& s);
// a = q*b + r, deg r < deg b
void divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r);
UPoly rem(const UPoly& a, const UPoly& b);
// u with u*a = 1 mod m; nullopt when gcd(a, m) is not a unit
std::optional<UPoly> inverse_mod(const UPoly& a, const UPoly& m);

struct Largeness {
    bool in = false;   // some nonzero root below the variable
    bool out = false;  // some root above it

    bool mixed() const { return in && out; }
    std::string to_string() const;
};

// Exponent support of a polynomial, k the 0-based index of the variable.
Largeness all_large_or_all_small(const std::vector<ExpVec>& S, int k);
Largeness all_large_or_all_small(const MPoly& f, int k);

struct PFPart {
    UPoly a;
    MPoly f;
    int n = 1;
};

// F = sum a_k / f_k^{n_k} + poly_part, with a_k, poly_part carrying the v-free part of F.
struct PFDecomp {
    int v = 0;
    int nvars = 0;
    std::vector<PFPart> parts;
    UPoly poly_part;

    RatFun recombine() const;
};

PFDecomp partial_fractions(const RatFun& F, int v);

// Classical residue of F at the root of f (degree 1 in v), a pole of order n.
RatFun residue_at_rational_pole(const RatFun& F, int v, const MPoly& f, int n);
// Sum of all finite classical residues of F in v.
RatFun sum_of_all_residues(const RatFun& F, int v);

struct StepTrace {
    std::string var;
    std::string rule;
    std::vector<std::pair<std::string, std::string>> factors;  // factor, largeness
};

struct ReduceBudget {
    double step_seconds = 0;  // 0: unlimited; an overrunning step is skipped
    std::size_t max_terms = 0;  // 0: unlimited; larger step results are rejected
};

// res_v with v the 0-based variable index inside R.ord.
std::optional<ResidueRep> geom_red_step(const ResidueRep& R, int v, StepTrace* trace = nullptr,
                                        const ReduceBudget& budget = {});
ResidueRep reduce_fixpoint(const ResidueRep& R, std::vector<StepTrace>* trace = nullptr,
                           const ReduceBudget& budget = {});
// Reduce summands sharing one variable order separately, then recombine and reduce again.
ResidueRep reduce_terms(const std::vector<ResidueRep>& terms, std::vector<StepTrace>* trace = nullptr,
                        const ReduceBudget& budget = {});

}  // namespace bs
