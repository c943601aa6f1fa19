#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bs/ratfun.hpp"

namespace bs {

// sum p[i] * D^i with D t = t D + 1, D = d/d(var).
struct DiffOp {
    int nvars = 1;
    int var = 0;
    std::vector<MPoly> p;

    int order() const { return static_cast<int>(p.size()) - 1; }  // -1 for zero
    bool is_zero() const { return p.empty(); }
    const MPoly& lc() const { return p.back(); }
    void trim();
    // Remove the polynomial content, make coefficients coprime integers and lc(lc) positive.
    DiffOp& normalize();
    bool univariate() const;

    static DiffOp dx(int nvars, int var);
    static DiffOp mult(const MPoly& c, int var);

    bool operator==(const DiffOp& o) const;
    std::string to_string(const std::vector<std::string>& names) const;
};

DiffOp operator+(const DiffOp& a, const DiffOp& b);
DiffOp operator-(const DiffOp& a, const DiffOp& b);
DiffOp operator*(const DiffOp& a, const DiffOp& b);
// Operator in the given variable names plus "D" (or "∂") for the derivation;
// coefficients are read to the left of every D.
DiffOp parse_diffop(const std::string& text, const std::vector<std::string>& names, int var = 0);

// Same with rational function coefficients, used for exact division.
struct RatDiffOp {
    int nvars = 1;
    int var = 0;
    std::vector<RatFun> c;

    int order() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    void trim();

    static RatDiffOp from(const DiffOp& L);
    // Clear denominators and normalize.
    DiffOp to_poly() const;
};

RatDiffOp operator+(const RatDiffOp& a, const RatDiffOp& b);
RatDiffOp operator-(const RatDiffOp& a, const RatDiffOp& b);
RatDiffOp operator*(const RatDiffOp& a, const RatDiffOp& b);

struct RightDivision {
    RatDiffOp q;
    RatDiffOp r;
};

// A = q*B + r with order r < order B.
RightDivision right_divide(const RatDiffOp& A, const RatDiffOp& B);
RightDivision right_divide(const DiffOp& A, const DiffOp& B);
DiffOp right_gcd(const DiffOp& A, const DiffOp& B);
bool right_divides(const DiffOp& B, const DiffOp& A);

// sum q[i](n) * S^i acting on u_n; polynomials in the single variable n.
struct RecOp {
    std::vector<MPoly> q;

    int order() const { return static_cast<int>(q.size()) - 1; }
    RecOp& normalize();
    bool operator==(const RecOp& o) const;
    std::string to_string() const;  // "q0(n)*u(n) + ... = 0"
};

Q eval_univariate(const MPoly& p, const Q& x);

// Coefficients of L(f); the result stops where the prefix runs out.
std::vector<Q> apply_op(const DiffOp& L, const std::vector<Q>& f);
std::vector<Q> apply_op(const DiffOp& L, const std::vector<Q>& f, int n_out);

RecOp ode_to_rec(const DiffOp& L);

struct Indicial {
    MPoly b;  // univariate in a
    int shift = 0;
};

Indicial indicial_polynomial(const DiffOp& L);
// Distinct rational roots, ascending.
std::vector<Q> rational_roots(const MPoly& b);
std::vector<long> nonneg_integer_roots(const MPoly& b);

// Recurrence assumed valid at every integer index with u_k = 0 for k < 0; inits supply
// the values at indices where the leading coefficient vanishes.
std::vector<Q> unroll(const RecOp& r, const std::map<long, Q>& inits, int N);

enum class Provenance { Certified, Conjectural };

struct DFiniteSeries {
    DiffOp op;
    std::map<long, Q> inits;  // keyed by nonnegative integer indicial roots
    Provenance prov = Provenance::Certified;

    std::vector<Q> coefficients(int N) const;
};

// Initial data for op taken from a known prefix.
DFiniteSeries make_series(const DiffOp& op, const std::vector<Q>& prefix, Provenance prov = Provenance::Certified);

bool is_annihilated(const DFiniteSeries& f, const DiffOp& M);

struct SeriesVerdict {
    bool equal = false;
    bool certified = true;
};

SeriesVerdict series_equal(const DFiniteSeries& f, const DFiniteSeries& g);

}  // namespace bs
