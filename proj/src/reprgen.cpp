#include "bs/reprgen.hpp"

#include <map>

namespace bs {

std::vector<Z> eulerian(int a) {
    if (a < 0) throw MathError("eulerian: negative order");
    // A_{k+1}(x) = x ((1-x) A_k'(x) + (k+1) A_k(x))
    std::vector<Z> A{1};
    for (int k = 0; k < a; ++k) {
        std::vector<Z> B(A.size() + 1, 0);
        for (std::size_t m = 0; m < A.size(); ++m) {
            // x * (k+1) a_m x^m
            B[m + 1] += (k + 1) * A[m];
            if (m > 0) {
                // x * (1-x) m a_m x^{m-1}
                B[m] += Z(static_cast<long>(m)) * A[m];
                B[m + 1] -= Z(static_cast<long>(m)) * A[m];
            }
        }
        while (B.size() > 1 && B.back() == 0) B.pop_back();
        A = std::move(B);
    }
    return A;
}

namespace {

// Faulhaber antiderivative: P(n+1) - P(n) = n^beta, P(0) = 0.
std::vector<Q> faulhaber(int beta) {
    std::vector<Q> p(beta + 2, Q(0));
    p[beta + 1] = Q(1, beta + 1);
    for (int m = beta - 1; m >= 0; --m) {
        Q s = 0;
        for (int l = m + 2; l <= beta + 1; ++l) s += p[l] * Q(binomial(Z(l), m));
        p[m + 1] = -s / Q(m + 1);
    }
    return p;
}

bool is_one(const RatFun& T) { return T.is_constant() && T.coeff() == 1; }

}  // namespace

std::vector<RatFun> discrete_antidiff(int alpha, const RatFun& A) {
    if (alpha < 0) throw MathError("discrete_antidiff: negative degree");
    int N = A.nvars();
    if (is_one(A)) {
        std::vector<RatFun> out;
        for (const Q& q : faulhaber(alpha)) out.push_back(RatFun::constant(N, q));
        return out;
    }
    // p_m (A-1) + A sum_{l>m} C(l,m) p_l = [m = alpha]
    RatFun inv = (A - RatFun::constant(N, 1)).inv();
    std::vector<RatFun> p(alpha + 1, RatFun::constant(N, 0));
    p[alpha] = inv;
    for (int m = alpha - 1; m >= 0; --m) {
        RatFun s = RatFun::constant(N, 0);
        for (int l = m + 1; l <= alpha; ++l) s += p[l] * Q(binomial(Z(l), m));
        p[m] = -(A * s * inv);
    }
    return p;
}

std::vector<Q> discrete_antidiff(int alpha, const Q& A) {
    if (A == 0) throw MathError("discrete_antidiff: zero base");
    std::vector<Q> out;
    for (const RatFun& r : discrete_antidiff(alpha, RatFun::constant(0, A))) out.push_back(r.coeff());
    // exact check: sum_l p_l ((n+1)^l A - n^l) = n^alpha, coefficientwise
    std::vector<Q> lhs(out.size() + 1, Q(0));
    for (std::size_t l = 0; l < out.size(); ++l) {
        for (std::size_t m = 0; m <= l; ++m) lhs[m] += out[l] * A * Q(binomial(Z(static_cast<long>(l)), static_cast<long>(m)));
        lhs[l] -= out[l];
    }
    for (std::size_t m = 0; m < lhs.size(); ++m)
        if (lhs[m] != (static_cast<int>(m) == alpha ? 1 : 0)) throw MathError("discrete_antidiff: verification failed");
    return out;
}

bool geom_summable(const RatFun& T) {
    if (T.is_zero()) return true;
    if (is_one(T)) return false;
    return monomial_below_one(T.leading_monomial().first);
}

int residue_var_count(const NodeRef& n) {
    switch (n->kind) {
    case NodeKind::Delta:
    case NodeKind::Heaviside:
    case NodeKind::Binom:
    case NodeKind::BinomRev:
    case NodeKind::Motzkin: return 1;
    case NodeKind::BinomNat: return 2;
    case NodeKind::Geometric:
    case NodeKind::Poly:
    case NodeKind::Constant: return 0;
    case NodeKind::Sum: {
        int m = 0;
        for (const auto& k : n->kids) m = std::max(m, residue_var_count(k));
        return m;
    }
    case NodeKind::Product: {
        int s = 0;
        for (const auto& k : n->kids) s += residue_var_count(k);
        return s;
    }
    case NodeKind::StdSum: return residue_var_count(n->kids[0]) + 1;
    case NodeKind::DirectedSum:
    case NodeKind::InfSum:
    case NodeKind::Subst: return residue_var_count(n->kids[0]);
    }
    return 0;
}

namespace {

using Terms = std::vector<CTTerm>;

class CTBuilder {
public:
    CTBuilder(int params, int residue, int indices) : d_(params), N_(params + residue), idx_(indices) {
        if (N_ > kMaxVars) throw MathError("too many residue variables");
        if (idx_ > kMaxVars) throw MathError("too many summation indices");
    }

    Terms build(const NodeRef& n, int base) {
        switch (n->kind) {
        case NodeKind::Delta: {
            CTTerm t = unit();
            mul_aff(t, z(base), n->args[0], 1);
            return {t};
        }
        case NodeKind::Heaviside: return {heaviside(base, n->args[0])};
        case NodeKind::Binom: {
            CTTerm t = unit();
            mul_aff(t, one() + z(base), n->args[0], 1);
            mul_aff(t, z(base), n->args[1], -1);
            return {t};
        }
        case NodeKind::BinomNat: {
            RatFun x = z(base), y = z(base + 1);
            CTTerm t = unit();
            t.R0 = (one() - x - y).inv();
            mul_aff(t, x, n->args[1] - n->args[0], 1);
            mul_aff(t, y, n->args[1], -1);
            return {t};
        }
        case NodeKind::BinomRev: {
            RatFun x = z(base);
            CTTerm t = unit();
            t.R0 = (one() - x).inv();
            mul_aff(t, one() - x, n->args[1], -1);
            mul_aff(t, x, n->args[1] - n->args[0], 1);
            return {t};
        }
        case NodeKind::Motzkin: {
            RatFun x = z(base);
            CTTerm t = unit();
            t.R0 = (one() - x) * (one() + x).pow(2) / x;
            mul_aff(t, (one() + x + x * x) / x, n->args[0], 1);
            return {t};
        }
        case NodeKind::Geometric: {
            CTTerm t = unit();
            mul_aff(t, RatFun::constant(N_, n->value), n->args[0], 1);
            return {t};
        }
        case NodeKind::Poly: {
            Terms out;
            const Affine& a = n->args[0];
            for (const auto& [id, c] : a.c) {
                CTTerm t = unit();
                t.alpha[id] = 1;
                t.R0 = RatFun::constant(N_, Q(c));
                out.push_back(t);
            }
            if (a.k != 0) {
                CTTerm t = unit();
                t.R0 = RatFun::constant(N_, Q(a.k));
                out.push_back(t);
            }
            return out;
        }
        case NodeKind::Constant: {
            if (n->value == 0) return {};
            CTTerm t = unit();
            t.R0 = RatFun::constant(N_, n->value);
            return {t};
        }
        case NodeKind::Sum: {
            Terms out;
            for (const auto& k : n->kids) {
                Terms s = build(k, base);
                out.insert(out.end(), s.begin(), s.end());
            }
            return out;
        }
        case NodeKind::Product: {
            Terms acc{unit()};
            int b = base;
            for (const auto& k : n->kids) {
                acc = product(acc, build(k, b));
                b += residue_var_count(k);
                if (acc.empty()) break;
            }
            return acc;
        }
        case NodeKind::DirectedSum:
            return directed(build(n->kids[0], base), n->index, n->args[0], n->args[1]);
        case NodeKind::StdSum: {
            Terms body = directed(build(n->kids[0], base), n->index, n->args[0], n->args[1]);
            int hb = base + residue_var_count(n->kids[0]);
            return product(body, {heaviside(hb, n->args[1] - n->args[0])});
        }
        case NodeKind::InfSum: return infinite(build(n->kids[0], base), n->index);
        case NodeKind::Subst: return subst(build(n->kids[0], base), n->repl);
        }
        throw MathError("sum_to_ct: unknown node");
    }

private:
    int d_, N_, idx_;

    RatFun one() const { return RatFun::constant(N_, 1); }
    RatFun z(int k) const { return RatFun::variable(N_, d_ + k); }

    CTTerm unit() const {
        CTTerm t;
        t.alpha.assign(idx_, 0);
        t.R0 = one();
        t.Rs.assign(idx_, one());
        return t;
    }

    static void mul_aff(CTTerm& t, const RatFun& b, const Affine& a, int sign) {
        if (a.k) t.R0 *= b.pow(static_cast<int>(sign * a.k));
        for (const auto& [id, c] : a.c)
            if (c) t.Rs[id] *= b.pow(static_cast<int>(sign * c));
    }

    CTTerm heaviside(int base, const Affine& a) const {
        CTTerm t = unit();
        t.R0 = (one() - z(base)).inv();
        mul_aff(t, z(base), a, -1);
        return t;
    }

    Terms product(const Terms& A, const Terms& B) const {
        Terms out;
        out.reserve(A.size() * B.size());
        for (const auto& a : A)
            for (const auto& b : B) {
                CTTerm t;
                t.R0 = a.R0 * b.R0;
                if (t.R0.is_zero()) continue;
                t.alpha.resize(idx_);
                t.Rs.resize(idx_);
                for (int i = 0; i < idx_; ++i) {
                    t.alpha[i] = a.alpha[i] + b.alpha[i];
                    t.Rs[i] = a.Rs[i] * b.Rs[i];
                }
                out.push_back(std::move(t));
            }
        return out;
    }

    MPoly aff_poly(const Affine& a) const {
        MPoly p = MPoly::constant(idx_, Q(a.k));
        for (const auto& [id, c] : a.c) p = p + MPoly::variable(idx_, id) * MPoly::constant(idx_, Q(c));
        return p;
    }

    // t * sum_l coef_l * a^l, one output term per index monomial
    void push_poly(Terms& out, const CTTerm& t, const std::vector<RatFun>& coef, const Affine& a) const {
        MPoly ap = aff_poly(a);
        std::map<std::vector<int>, RatFun> acc;
        MPoly pw = MPoly::constant(idx_, 1);
        for (std::size_t l = 0; l < coef.size(); ++l) {
            if (l) pw = pw * ap;
            if (coef[l].is_zero()) continue;
            for (const auto& term : pw.terms()) {
                auto key = term.m.to_vector();
                RatFun v = coef[l] * term.c;
                auto it = acc.find(key);
                if (it == acc.end()) acc.emplace(key, v);
                else it->second += v;
            }
        }
        for (auto& [m, c] : acc) {
            if (c.is_zero()) continue;
            CTTerm u = t;
            for (int i = 0; i < idx_; ++i) u.alpha[i] += m[i];
            u.R0 *= c;
            if (!u.R0.is_zero()) out.push_back(std::move(u));
        }
    }

    Terms directed(const Terms& body, int j, const Affine& lo, const Affine& hi) const {
        Terms out;
        for (const auto& t : body) {
            RatFun T = t.Rs[j];
            int beta = t.alpha[j];
            CTTerm b = t;
            b.alpha[j] = 0;
            b.Rs[j] = one();
            std::vector<RatFun> P = discrete_antidiff(beta, T);
            std::vector<RatFun> negP;
            for (const auto& p : P) negP.push_back(-p);
            CTTerm upper = b, lower = b;
            Affine hi1 = hi + Affine::constant(1);
            if (!is_one(T)) {
                mul_aff(upper, T, hi1, 1);
                mul_aff(lower, T, lo, 1);
            }
            push_poly(out, upper, P, hi1);
            push_poly(out, lower, negP, lo);
        }
        return out;
    }

    Terms infinite(const Terms& body, int j) const {
        Terms out;
        for (const auto& t : body) {
            const RatFun& T = t.Rs[j];
            if (!geom_summable(T)) throw DivergentSum("divergent infinite sum");
            CTTerm b = t;
            b.R0 *= series_closed_form(t.alpha[j], T);
            b.alpha[j] = 0;
            b.Rs[j] = one();
            if (!b.R0.is_zero()) out.push_back(std::move(b));
        }
        return out;
    }

    Terms subst(const Terms& body, const std::map<int, Affine>& repl) const {
        Terms out;
        for (const auto& t : body) {
            CTTerm u = unit();
            u.R0 = t.R0;
            MPoly mono = MPoly::constant(idx_, 1);
            for (int i = 0; i < idx_; ++i) {
                auto it = repl.find(i);
                if (it == repl.end()) {
                    u.Rs[i] *= t.Rs[i];
                    if (t.alpha[i]) mono = mono * MPoly::variable(idx_, i, t.alpha[i]);
                } else {
                    mul_aff(u, t.Rs[i], it->second, 1);
                    if (t.alpha[i]) mono = mono * aff_poly(it->second).pow(static_cast<unsigned>(t.alpha[i]));
                }
            }
            for (const auto& term : mono.terms()) {
                CTTerm v = u;
                for (int i = 0; i < idx_; ++i) v.alpha[i] = term.m[i];
                v.R0 = v.R0 * term.c;
                out.push_back(std::move(v));
            }
        }
        return out;
    }

public:
    // sum_{n>=0} n^beta x^n
    RatFun series_closed_form(int beta, const RatFun& x) const {
        std::vector<Z> A = eulerian(beta);
        RatFun num = RatFun::constant(N_, 0), p = one();
        for (std::size_t m = 0; m < A.size(); ++m) {
            if (m) p *= x;
            if (A[m] != 0) num += p * Q(A[m]);
        }
        return num / (one() - x).pow(beta + 1);
    }
};

std::vector<std::string> param_names(int d) {
    if (d == 1) return {"t"};
    std::vector<std::string> out;
    for (int i = 1; i <= d; ++i) out.push_back("t" + std::to_string(i));
    return out;
}

}  // namespace

CTRep sum_to_ct(const BSExpr& e) {
    CTRep ct;
    ct.params = e.params;
    ct.residue = residue_var_count(e.root);
    ct.ord.names = param_names(e.params);
    ct.ord.param_count = e.params;
    for (int i = 1; i <= ct.residue; ++i) ct.ord.names.push_back("z" + std::to_string(i));
    CTBuilder b(e.params, ct.residue, e.index_count());
    ct.terms = b.build(e.root, 0);
    return ct;
}

Q ct_value(const CTRep& ct, const std::vector<long>& n) {
    if (static_cast<int>(n.size()) != ct.params) throw MathError("ct_value: wrong parameter count");
    int N = ct.params + ct.residue;
    CoeffExtractor ex;
    Q total = 0;
    for (const auto& t : ct.terms) {
        Q w = 1;
        RatFun f = t.R0;
        for (int i = 0; i < ct.params; ++i) {
            for (int a = 0; a < t.alpha[i]; ++a) w *= n[i];
            f *= t.Rs[i].pow(static_cast<int>(n[i]));
        }
        if (w == 0) continue;
        total += w * ex.extract(f, ExpVec(N));
    }
    return total;
}

std::vector<ResidueRep> ct_to_residue_terms(const CTRep& ct) {
    int d = ct.params, N = d + ct.residue;
    CTBuilder b(d, ct.residue, ct.terms.empty() ? 0 : static_cast<int>(ct.terms[0].alpha.size()));
    ExpVec inv(N);
    for (int i = d; i < N; ++i) inv[i] = -1;
    RatFun zs = RatFun::monomial(inv);
    std::vector<ResidueRep> out;
    for (const auto& t : ct.terms) {
        for (std::size_t i = d; i < t.alpha.size(); ++i)
            if (t.alpha[i] || !is_one(t.Rs[i])) throw MathError("ct_to_residue: bound index left free");
        RatFun g = t.R0;
        for (int i = 0; i < d; ++i) {
            RatFun x = RatFun::variable(N, i) * t.Rs[i];
            if (is_one(x)) throw MathError("ct_to_residue: degenerate geometric term");
            g *= b.series_closed_form(t.alpha[i], x);
        }
        out.push_back(ResidueRep{g * zs, ct.ord});
    }
    return out;
}

ResidueRep ct_to_residue(const CTRep& ct) {
    RatFun fun = RatFun::constant(ct.params + ct.residue, 0);
    for (const auto& r : ct_to_residue_terms(ct)) fun += r.fun;
    return ResidueRep{fun, ct.ord};
}

ResidueRep residue_rep(const BSExpr& e) { return ct_to_residue(sum_to_ct(e)); }

ResidueRep diag_to_residue(const RatFun& R) {
    int d = R.nvars();
    if (d < 1) throw MathError("diag_to_residue: no variables");
    for (int i = 0; i < d; ++i)
        if (R.mono()[i] < 0) throw MathError("diag_to_residue: not a power series");
    MPoly den = R.denominator();
    ExpVec zero(d);
    bool unit_const = false;
    for (const auto& t : den.terms())
        if (t.m == zero) unit_const = true;
    if (!unit_const) throw MathError("diag_to_residue: denominator vanishes at the origin");
    ExpVec others(d);
    for (int i = 1; i < d; ++i) others[i] = 1;
    MPoly zs = MPoly::monomial(others, Q(1));
    RatFun f = R.subst(0, MPoly::variable(d, 0), zs) / RatFun::from_poly(zs);
    VarOrder ord;
    ord.names.push_back("t");
    for (int i = 2; i <= d; ++i) ord.names.push_back("z" + std::to_string(i));
    ord.param_count = 1;
    return ResidueRep{f, ord};
}

}  // namespace bs
