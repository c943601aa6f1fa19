#include "bs/telescoper.hpp"

#include <chrono>
#include <unordered_map>

#include "bs/linalg.hpp"

namespace bs {

DiffOp annihilator_of_rational(const RatFun& y, int var, bool* was_zero) {
    int n = y.nvars();
    if (was_zero) *was_zero = y.is_zero();
    if (y.is_zero()) return DiffOp::dx(n, var);
    MPoly p = y.numerator(), q = y.denominator();
    DiffOp L;
    L.nvars = n;
    L.var = var;
    L.p = {-(p.derivative(var) * q - p * q.derivative(var)), p * q};
    L.trim();
    return L.normalize();
}

std::vector<Q> residue_prefix(const ResidueRep& rep, int N) { return residue_series(rep, N); }

namespace {

std::vector<Q> problem_prefix(const TelescoperProblem& p, int N) {
    if (static_cast<int>(p.known_prefix.size()) >= N)
        return std::vector<Q>(p.known_prefix.begin(), p.known_prefix.begin() + N);
    return residue_prefix(p.rep, N);
}

}  // namespace

std::optional<RecOp> guess_recurrence(const std::vector<Q>& prefix, int max_order, int max_degree) {
    int L = static_cast<int>(prefix.size());
    for (int r = 1; r <= max_order; ++r)
        for (int d = 0; d <= max_degree; ++d) {
            int unknowns = (r + 1) * (d + 1), eqs = L - r;
            if (eqs < unknowns + 10) break;
            std::vector<std::vector<Q>> A;
            for (int n = 0; n < eqs; ++n) {
                std::vector<Q> row;
                for (int i = 0; i <= r; ++i) {
                    Q pw = 1;
                    for (int k = 0; k <= d; ++k, pw *= n) row.push_back(pw * prefix[n + i]);
                }
                A.push_back(std::move(row));
            }
            auto ker = nullspace(std::move(A), unknowns);
            if (ker.empty()) continue;
            RecOp rec;
            for (int i = 0; i <= r; ++i) {
                std::vector<MPoly::Term> ts;
                for (int k = 0; k <= d; ++k) ts.push_back({ExpVec::unit(1, 0, k), ker[0][i * (d + 1) + k]});
                rec.q.push_back(MPoly::from_terms(1, ts));
            }
            rec.normalize();
            if (rec.q.empty()) continue;
            return rec;
        }
    return std::nullopt;
}

std::optional<DiffOp> guess_ode(const std::vector<Q>& prefix, int max_order, int max_degree) {
    int L = static_cast<int>(prefix.size());
    for (int m = 1; m <= max_order; ++m)
        for (int D = 0; D <= max_degree; ++D) {
            int unknowns = (m + 1) * (D + 1), eqs = L - m;
            if (eqs < unknowns + 10) break;
            std::vector<std::vector<Q>> A;
            for (int n = 0; n < eqs; ++n) {
                std::vector<Q> row;
                for (int i = 0; i <= m; ++i)
                    for (int k = 0; k <= D; ++k) {
                        // [t^n] t^k D^i f
                        long src = n - k;
                        Q v = 0;
                        if (src >= 0) {
                            v = prefix[src + i];
                            for (int l = 1; l <= i; ++l) v *= src + l;
                        }
                        row.push_back(v);
                    }
                A.push_back(std::move(row));
            }
            auto ker = nullspace(std::move(A), unknowns);
            if (ker.empty()) continue;
            DiffOp op;
            for (int i = 0; i <= m; ++i) {
                std::vector<MPoly::Term> ts;
                for (int k = 0; k <= D; ++k) ts.push_back({ExpVec::unit(1, 0, k), ker[0][i * (D + 1) + k]});
                op.p.push_back(MPoly::from_terms(1, ts));
            }
            op.normalize();
            if (op.order() < 1) continue;
            return op;
        }
    return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

MPoly lift(const MPoly& c, int n) {
    std::vector<int> target{0};
    return c.rename(target, n);
}

// b_j/F^kappa summed derivative and the LHS, both as rational functions
bool identity_holds(const std::vector<MPoly>& c, const ResidueRep& rep, const Certificate& cert) {
    const RatFun& R = rep.fun;
    int n = R.nvars();
    RatFun lhs = RatFun::constant(n, 0), d = R;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i > 0) d = d.derivative(0);
        if (!c[i].is_zero()) lhs += RatFun::from_poly(lift(c[i], n)) * d;
    }
    RatFun rhs = RatFun::constant(n, 0);
    RatFun denom = RatFun::power_of(cert.F, -cert.kappa);
    for (std::size_t j = 0; j < cert.b.size(); ++j) {
        if (cert.b[j].is_zero()) continue;
        rhs += (RatFun::from_poly(cert.b[j]) * denom).derivative(static_cast<int>(j) + 1);
    }
    return lhs.equals(rhs);
}

struct Setup {
    int n = 0, r = 0;
    MPoly F;
    int max_e = 1;
    std::vector<RatFun> derivs;
};

struct Attempt {
    int m, D, kappa, K, Tb;
    std::vector<int> E;
};

struct Solved {
    std::vector<MPoly> c;  // raw operator coefficients in t
    Certificate cert;
    int primes = 0;
};

class Search {
public:
    Search(const TelescoperProblem& p) : p_(p), start_(Clock::now()) {
        const RatFun& R = p.rep.fun;
        s_.n = R.nvars();
        s_.r = s_.n - 1;
        s_.F = MPoly::constant(s_.n, 1);
        for (const auto& [f, e] : R.denominator_factors()) {
            s_.F = s_.F * f;
            s_.max_e = std::max(s_.max_e, e);
        }
        s_.derivs.push_back(R);
    }

    void check() const {
        double lim = p_.bounds.timeout_seconds;
        if (lim > 0 && std::chrono::duration<double>(Clock::now() - start_).count() > lim)
            throw BudgetExceeded("telescoper not found within budget");
    }

    const RatFun& deriv(int i) {
        while (static_cast<int>(s_.derivs.size()) <= i) s_.derivs.push_back(s_.derivs.back().derivative(0));
        return s_.derivs[i];
    }

    const Setup& setup() const { return s_; }

    std::optional<Solved> attempt(int m, int D, int slack, std::size_t* unknowns_out);

private:
    const TelescoperProblem& p_;
    Clock::time_point start_;
    Setup s_;
};

std::optional<Solved> Search::attempt(int m, int D, int slack, std::size_t* unknowns_out) {
    int n = s_.n, r = s_.r;
    Attempt a;
    a.m = m;
    a.D = D;
    a.K = s_.max_e + m;
    a.kappa = p_.bounds.pole_order > 0 ? p_.bounds.pole_order : a.K - 1;
    a.K = std::max(a.K, a.kappa + 1);
    MPoly FK = s_.F.pow(static_cast<unsigned>(a.K));
    std::vector<MPoly> Ls;
    int degt = 0;
    std::vector<int> degz(r, 0);
    for (int i = 0; i <= m; ++i) {
        check();
        const RatFun& d = deriv(i);
        auto q = (d.numerator() * FK).divide_exact(d.denominator());
        if (!q) throw MathError("picard_fuchs: derivative denominator does not divide F^K");
        Ls.push_back(*q);
        degt = std::max(degt, q->degree(0));
        for (int j = 0; j < r; ++j) degz[j] = std::max(degz[j], q->degree(j + 1));
    }
    MPoly tail = s_.F.pow(static_cast<unsigned>(a.K - a.kappa - 1));
    a.Tb = std::max(0, degt + D - s_.F.degree(0) - tail.degree(0));
    a.E.resize(r);
    std::size_t box = 1;
    for (int j = 0; j < r; ++j) {
        a.E[j] = std::max(0, degz[j] - s_.F.degree(j + 1) - tail.degree(j + 1) + 1 + slack);
        box *= static_cast<std::size_t>(a.E[j] + 1);
    }
    std::size_t nb = static_cast<std::size_t>(r) * (a.Tb + 1) * box;
    std::size_t nc = static_cast<std::size_t>(m + 1) * (D + 1);
    if (unknowns_out) *unknowns_out = nb + nc;
    if (nb + nc > p_.bounds.max_unknowns) return std::nullopt;

    // columns: certificates first, operator coefficients last
    std::vector<MPoly> cols;
    struct BCol {
        int j;
        ExpVec mu;
    };
    std::vector<BCol> bcols;
    std::vector<MPoly> dF;
    for (int j = 0; j < r; ++j) dF.push_back(s_.F.derivative(j + 1));
    for (int j = 0; j < r; ++j) {
        std::vector<int> beta(r, 0);
        while (true) {
            for (int ta = 0; ta <= a.Tb; ++ta) {
                ExpVec mu(n);
                mu[0] = static_cast<int16_t>(ta);
                for (int k = 0; k < r; ++k) mu[k + 1] = static_cast<int16_t>(beta[k]);
                MPoly m1 = MPoly::monomial(mu, Q(1));
                MPoly col = m1.derivative(j + 1) * s_.F - m1 * dF[j] * Q(a.kappa);
                if (!tail.is_constant()) col = col * tail;
                cols.push_back(std::move(col));
                bcols.push_back({j, mu});
            }
            int k = 0;
            while (k < r && ++beta[k] > a.E[k]) beta[k++] = 0;
            if (k == r) break;
        }
        check();
    }
    std::size_t first_c = cols.size();
    for (int i = 0; i <= m; ++i)
        for (int d = 0; d <= D; ++d) cols.push_back(Ls[i].mul_monomial(ExpVec::unit(n, 0, d)));

    std::unordered_map<ExpVec, int, ExpVecHash> row_of;
    for (const auto& c : cols)
        for (const auto& t : c.terms()) row_of.emplace(t.m, static_cast<int>(row_of.size()));
    int nrows = static_cast<int>(row_of.size()), ncols = static_cast<int>(cols.size());

    auto build = [&](uint64_t prime) {
        ModMatrix M(prime, nrows, ncols);
        for (int c = 0; c < ncols; ++c)
            for (const auto& t : cols[c].terms()) M.at(row_of[t.m], c) = q_mod(t.c, prime);
        return M;
    };
    auto checker = [this] { check(); };

    std::vector<int> pivots;
    int free_col = -1;
    Z modulus = 1;
    std::vector<Z> acc;
    std::vector<Q> last;
    int used = 0;
    for (int k = 0; k < 80; ++k) {
        uint64_t prime = nth_prime(k);
        ModRref rr = [&] {
            try {
                return rref_mod(build(prime), checker);
            } catch (const MathError&) {
                return ModRref{{-1}, ModMatrix(prime, 0, 0)};
            }
        }();
        if (!rr.pivots.empty() && rr.pivots[0] == -1) continue;
        if (free_col < 0) {
            std::vector<bool> piv(ncols, false);
            for (int c : rr.pivots) piv[c] = true;
            for (int c = static_cast<int>(first_c); c < ncols; ++c)
                if (!piv[c]) {
                    free_col = c;
                    break;
                }
            if (free_col < 0) return std::nullopt;
            pivots = rr.pivots;
        } else if (rr.pivots != pivots) {
            continue;  // unlucky prime
        }
        std::vector<uint64_t> v = kernel_vector(rr, free_col);
        Z P(static_cast<unsigned long>(prime));
        if (acc.empty()) {
            acc.assign(v.size(), Z(0));
            for (std::size_t i = 0; i < v.size(); ++i) acc[i] = Z(static_cast<unsigned long>(v[i]));
            modulus = P;
        } else {
            // CRT: x = acc + modulus * ((v - acc) / modulus mod P)
            Z minv;
            mpz_invert(minv.get_mpz_t(), Z(modulus % P).get_mpz_t(), P.get_mpz_t());
            for (std::size_t i = 0; i < v.size(); ++i) {
                Z diff = (Z(static_cast<unsigned long>(v[i])) - acc[i] % P) % P;
                if (diff < 0) diff += P;
                Z h = diff * minv % P;
                acc[i] += modulus * h;
            }
            modulus *= P;
        }
        ++used;
        std::vector<Q> rec;
        bool ok = true;
        for (const auto& x : acc) {
            auto q = rational_reconstruct(x, modulus);
            if (!q) {
                ok = false;
                break;
            }
            rec.push_back(*q);
        }
        if (!ok) continue;
        if (rec != last) {
            last = std::move(rec);
            continue;
        }
        // stable over two primes: assemble and check exactly
        Solved out;
        out.primes = used;
        out.cert.F = s_.F;
        out.cert.kappa = a.kappa;
        out.cert.b.assign(r, MPoly(n));
        for (std::size_t c = 0; c < first_c; ++c)
            if (sgn(last[c]) != 0) out.cert.b[bcols[c].j] -= MPoly::monomial(bcols[c].mu, last[c]);
        if (!tail.is_constant())
            for (auto& b : out.cert.b) b = b * tail;
        for (int i = 0; i <= m; ++i) {
            std::vector<MPoly::Term> ts;
            for (int d = 0; d <= D; ++d) ts.push_back({ExpVec::unit(1, 0, d), last[first_c + i * (D + 1) + d]});
            out.c.push_back(MPoly::from_terms(1, ts));
        }
        check();
        if (identity_holds(out.c, p_.rep, out.cert)) return out;
    }
    return std::nullopt;
}

}  // namespace

bool telescoping_identity_holds(const DiffOp& op, const ResidueRep& rep, const Certificate& cert) {
    if (cert.left.is_zero()) return identity_holds(op.p, rep, cert);
    return identity_holds((DiffOp::mult(cert.left, 0) * op).p, rep, cert);
}

bool verify_telescoper(const DiffOp& op, const TelescoperProblem& p, const Certificate& cert) {
    if (!telescoping_identity_holds(op, p.rep, cert)) return false;
    int T = p.bounds.series_check_terms;
    std::vector<Q> pre = problem_prefix(p, T + op.order() + 1);
    for (const auto& x : apply_op(op, pre, T))
        if (x != 0) return false;
    return true;
}

PicardFuchs picard_fuchs(const TelescoperProblem& p) {
    const ResidueRep& R = p.rep;
    if (R.params() != 1) throw MathError("picard_fuchs: exactly one parameter expected");
    PicardFuchs out;
    if (R.residue_count() == 0) {
        out.op = annihilator_of_rational(R.fun, 0);
        out.record.op = out.op;
        out.record.order = out.op.order();
        out.record.identity_checked = true;
        return out;
    }
    Search search(p);
    const TelescoperBounds& B = p.bounds;
    // seed order and degree from a guessed equation of the series
    int m0 = 1, D0 = 1;
    std::vector<Q> pre = problem_prefix(p, std::max(B.series_check_terms + B.max_order + 1, 24));
    {
        if (auto g = guess_ode(pre, std::min(B.max_order, 4), std::min(B.max_degree, 6))) {
            m0 = g->order();
            D0 = std::max(1, g->p.back().degree(0));
        }
    }
    for (int m = m0; m <= B.max_order; ++m) {
        std::vector<int> degrees;
        for (int D = (m == m0 ? D0 : std::max(1, D0)); D <= B.max_degree; D += 2) degrees.push_back(D);
        for (int D : degrees)
            for (int slack : {0, B.z_slack}) {
                search.check();
                std::size_t unknowns = 0;
                auto sol = search.attempt(m, D, slack, &unknowns);
                if (!sol) continue;
                DiffOp raw;
                raw.p = sol->c;
                raw.trim();
                if (raw.order() < 1) continue;
                DiffOp op = raw;
                op.normalize();
                // raw = left * op with left a polynomial in t
                MPoly left = *raw.lc().divide_exact(op.lc());
                Certificate cert = sol->cert;
                cert.left = left;
                out.op = op;
                out.record.op = op;
                out.record.order = op.order();
                out.record.degree = D;
                out.record.kappa = cert.kappa;
                out.record.z_slack = slack;
                out.record.unknowns = unknowns;
                out.record.primes = sol->primes;
                out.record.identity_checked = telescoping_identity_holds(op, R, cert);
                out.record.cert = cert;
                for (const auto& x : apply_op(op, pre, B.series_check_terms))
                    if (x != 0) throw MathError("picard_fuchs: operator fails the series check");
                out.record.series_check_terms = B.series_check_terms;
                return out;
            }
    }
    throw BudgetExceeded("telescoper not found within budget");
}

}  // namespace bs
