#pragma once

#include <string>
#include <vector>

#include "bs/residue.hpp"
#include "bs/sumlang.hpp"

namespace bs {

class DivergentSum : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// n^alpha [1] R0 prod_i R_i^{n_i}; one alpha/R entry per index id of the source expression.
struct CTTerm {
    std::vector<int> alpha;
    RatFun R0;
    std::vector<RatFun> Rs;
};

// Constant-term representation. RatFuns live in an ambient of
// params + residue variables; the parameter slots stay unused here.
struct CTRep {
    std::vector<CTTerm> terms;
    int params = 0;
    int residue = 0;
    VarOrder ord;
};

// Coefficients p_0..p_deg of P with n^alpha A^n = P(n+1) A^{n+1} - P(n) A^n.
std::vector<Q> discrete_antidiff(int alpha, const Q& A);
std::vector<RatFun> discrete_antidiff(int alpha, const RatFun& A);

bool geom_summable(const RatFun& T);

// Number of residue variables the expression allocates.
int residue_var_count(const NodeRef& n);

CTRep sum_to_ct(const BSExpr& e);
// sum over terms of n^alpha [1] R0 prod R_i^{n_i}
Q ct_value(const CTRep& ct, const std::vector<long>& n);

ResidueRep ct_to_residue(const CTRep& ct);
// One residue per CT term; their sum is ct_to_residue(ct).
std::vector<ResidueRep> ct_to_residue_terms(const CTRep& ct);
ResidueRep residue_rep(const BSExpr& e);

// R a rational power series in z1..zd; result in (t, z2, ..., zd).
ResidueRep diag_to_residue(const RatFun& R);

// Eulerian numerator: sum_{n>=0} n^a x^n = A_a(x) / (1-x)^{a+1}
std::vector<Z> eulerian(int a);

}  // namespace bs
