#include "bs/ore.hpp"

#include <algorithm>
#include <numeric>

namespace bs {

namespace {

MPoly zero_poly(int n) { return MPoly(n); }

Q falling(const Q& x, int k) {
    Q r = 1;
    for (int i = 0; i < k; ++i) r *= x - i;
    return r;
}

// Scale polys so their coefficients are coprime integers; returns the factor used.
Q integer_scale(const std::vector<MPoly>& ps) {
    Z den = 1, num = 0;
    for (const auto& p : ps)
        for (const auto& t : p.terms()) {
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.c.get_den_mpz_t());
            mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), t.c.get_num_mpz_t());
        }
    if (num == 0) return 1;
    return Q(den, num);
}

// common polynomial content, then integer content, then sign of the leading coefficient
void normalize_coeffs(std::vector<MPoly>& ps) {
    while (!ps.empty() && ps.back().is_zero()) ps.pop_back();
    if (ps.empty()) return;
    MPoly g = zero_poly(ps[0].nvars());
    for (const auto& p : ps)
        if (!p.is_zero()) g = g.is_zero() ? p : gcd(g, p);
    if (!g.is_constant())
        for (auto& p : ps)
            if (!p.is_zero()) p = *p.divide_exact(g);
    Q s = integer_scale(ps);
    if (sgn(ps.back().lead().c) < 0) s = -s;
    for (auto& p : ps) p = p * s;
}

// N/D in lowest terms; univariate gcds keep Euclid's coefficient growth in check
RatFun reduced(const RatFun& r) {
    if (r.is_zero() || r.is_constant()) return r;
    MPoly N = r.numerator(), D = r.denominator();
    MPoly g = gcd(N, D);
    if (!g.is_constant()) {
        N = *N.divide_exact(g);
        D = *D.divide_exact(g);
    }
    return RatFun::quotient(N, D);
}

std::string paren(const std::string& s) {
    bool bare = s.find_first_of("+-", 1) == std::string::npos;
    return bare ? s : "(" + s + ")";
}

}  // namespace

// ---- DiffOp ----

void DiffOp::trim() {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

DiffOp& DiffOp::normalize() {
    normalize_coeffs(p);
    return *this;
}

bool DiffOp::univariate() const {
    for (const auto& c : p)
        for (const auto& t : c.terms())
            for (int i = 0; i < nvars; ++i)
                if (i != var && t.m[i] != 0) return false;
    return true;
}

DiffOp DiffOp::dx(int nvars, int var) {
    DiffOp L;
    L.nvars = nvars;
    L.var = var;
    L.p = {zero_poly(nvars), MPoly::constant(nvars, 1)};
    return L;
}

DiffOp DiffOp::mult(const MPoly& c, int var) {
    DiffOp L;
    L.nvars = c.nvars();
    L.var = var;
    L.p = {c};
    L.trim();
    return L;
}

bool DiffOp::operator==(const DiffOp& o) const { return var == o.var && p == o.p; }

std::string DiffOp::to_string(const std::vector<std::string>& names) const {
    if (p.empty()) return "0";
    std::string out;
    for (int i = order(); i >= 0; --i) {
        if (p[i].is_zero()) continue;
        std::string c = p[i].to_string(names), d;
        if (i == 1) d = "∂";
        else if (i > 1) d = "∂^" + std::to_string(i);
        std::string term;
        if (d.empty()) term = c;
        else if (c == "1") term = d;
        else if (c == "-1") term = "-" + d;
        else term = paren(c) + d;
        if (!out.empty() && term[0] != '-') out += "+";
        out += term;
    }
    return out;
}

DiffOp operator+(const DiffOp& a, const DiffOp& b) {
    DiffOp r = a.p.size() >= b.p.size() ? a : b;
    const DiffOp& s = a.p.size() >= b.p.size() ? b : a;
    for (std::size_t i = 0; i < s.p.size(); ++i) r.p[i] += s.p[i];
    r.trim();
    return r;
}

DiffOp operator-(const DiffOp& a, const DiffOp& b) {
    DiffOp nb = b;
    for (auto& c : nb.p) c = -c;
    return a + nb;
}

DiffOp operator*(const DiffOp& a, const DiffOp& b) {
    DiffOp r;
    r.nvars = a.nvars;
    r.var = a.var;
    if (a.is_zero() || b.is_zero()) return r;
    r.p.assign(a.p.size() + b.p.size() - 1, zero_poly(a.nvars));
    for (int j = 0; j <= b.order(); ++j) {
        // a_i D^i b_j D^j = a_i sum_k C(i,k) b_j^(k) D^(i+j-k)
        MPoly der = b.p[j];
        for (int k = 0; k <= a.order() && !der.is_zero(); ++k) {
            for (int i = k; i <= a.order(); ++i)
                if (!a.p[i].is_zero()) r.p[i + j - k] += a.p[i] * der * Q(binomial(Z(i), k));
            der = der.derivative(a.var);
        }
    }
    r.trim();
    return r;
}

DiffOp parse_diffop(const std::string& text, const std::vector<std::string>& names, int var) {
    std::string s;
    const std::string partial = "∂";
    for (std::size_t i = 0; i < text.size();) {
        if (text.compare(i, partial.size(), partial) == 0) {
            s += "D";
            i += partial.size();
        } else {
            s += text[i++];
        }
    }
    std::vector<std::string> ext = names;
    ext.push_back("D");
    int n = static_cast<int>(names.size());
    MPoly P = parse_poly(s, ext);
    std::vector<int> target(n + 1);
    std::iota(target.begin(), target.end(), 0);
    target[n] = -1;
    DiffOp L;
    L.nvars = n;
    L.var = var;
    for (const auto& c : P.coeffs_in(n)) L.p.push_back(c.rename(target, n));
    L.trim();
    return L;
}

// ---- RatDiffOp ----

void RatDiffOp::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

RatDiffOp RatDiffOp::from(const DiffOp& L) {
    RatDiffOp r;
    r.nvars = L.nvars;
    r.var = L.var;
    for (const auto& p : L.p) r.c.push_back(RatFun::from_poly(p));
    return r;
}

DiffOp RatDiffOp::to_poly() const {
    DiffOp L;
    L.nvars = nvars;
    L.var = var;
    MPoly den = MPoly::constant(nvars, 1);
    for (const auto& x : c) {
        if (x.is_zero()) continue;
        MPoly d = x.denominator();
        den = *(den * d).divide_exact(gcd(den, d));
    }
    for (const auto& x : c) {
        if (x.is_zero()) {
            L.p.push_back(zero_poly(nvars));
            continue;
        }
        L.p.push_back(x.numerator() * *den.divide_exact(x.denominator()));
    }
    return L.normalize();
}

RatDiffOp operator+(const RatDiffOp& a, const RatDiffOp& b) {
    RatDiffOp r = a.c.size() >= b.c.size() ? a : b;
    const RatDiffOp& s = a.c.size() >= b.c.size() ? b : a;
    for (std::size_t i = 0; i < s.c.size(); ++i) r.c[i] = reduced(r.c[i] + s.c[i]);
    r.trim();
    return r;
}

RatDiffOp operator-(const RatDiffOp& a, const RatDiffOp& b) {
    RatDiffOp nb = b;
    for (auto& x : nb.c) x = -x;
    return a + nb;
}

RatDiffOp operator*(const RatDiffOp& a, const RatDiffOp& b) {
    RatDiffOp r;
    r.nvars = a.nvars;
    r.var = a.var;
    if (a.is_zero() || b.is_zero()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, RatFun::constant(a.nvars, 0));
    for (int j = 0; j <= b.order(); ++j) {
        RatFun der = b.c[j];
        for (int k = 0; k <= a.order() && !der.is_zero(); ++k) {
            for (int i = k; i <= a.order(); ++i)
                if (!a.c[i].is_zero()) r.c[i + j - k] += a.c[i] * der * Q(binomial(Z(i), k));
            der = reduced(der.derivative(a.var));
        }
    }
    for (auto& x : r.c) x = reduced(x);
    r.trim();
    return r;
}

RightDivision right_divide(const RatDiffOp& A, const RatDiffOp& B) {
    if (B.is_zero()) throw MathError("right_divide: division by zero operator");
    RightDivision out;
    out.q.nvars = out.r.nvars = A.nvars;
    out.q.var = out.r.var = A.var;
    out.r = A;
    RatFun ilc = B.c.back().inv();
    while (!out.r.is_zero() && out.r.order() >= B.order()) {
        int k = out.r.order() - B.order();
        RatDiffOp mono;
        mono.nvars = A.nvars;
        mono.var = A.var;
        mono.c.assign(k + 1, RatFun::constant(A.nvars, 0));
        mono.c[k] = reduced(out.r.c.back() * ilc);
        int before = out.r.order();
        out.q = out.q + mono;
        out.r = out.r - mono * B;
        if (!out.r.is_zero() && out.r.order() >= before) throw MathError("right_divide: no progress");
    }
    return out;
}

RightDivision right_divide(const DiffOp& A, const DiffOp& B) {
    return right_divide(RatDiffOp::from(A), RatDiffOp::from(B));
}

DiffOp right_gcd(const DiffOp& A, const DiffOp& B) {
    if (A.is_zero() && B.is_zero()) throw MathError("right_gcd: both operators zero");
    RatDiffOp a = RatDiffOp::from(A), b = RatDiffOp::from(B);
    while (!b.is_zero()) {
        RatDiffOp r = right_divide(a, b).r;
        a = std::move(b);
        // the remainder is only defined up to a left unit; clearing keeps sizes small
        b = r.is_zero() ? r : RatDiffOp::from(r.to_poly());
    }
    return a.to_poly();
}

bool right_divides(const DiffOp& B, const DiffOp& A) { return right_divide(A, B).r.is_zero(); }

// ---- recurrences ----

RecOp& RecOp::normalize() {
    normalize_coeffs(q);
    return *this;
}

bool RecOp::operator==(const RecOp& o) const { return q == o.q; }

std::string RecOp::to_string() const {
    std::string out;
    for (int i = 0; i <= order(); ++i) {
        if (q[i].is_zero()) continue;
        std::string c = q[i].to_string(std::vector<std::string>{"n"});
        std::string u = i == 0 ? "u(n)" : "u(n+" + std::to_string(i) + ")";
        std::string term = c == "1" ? u : (c == "-1" ? "-" + u : paren(c) + "*" + u);
        if (!out.empty() && term[0] != '-') out += "+";
        out += term;
    }
    return (out.empty() ? "0" : out) + " = 0";
}

Q eval_univariate(const MPoly& p, const Q& x) {
    Q r = 0;
    for (const auto& t : p.terms()) {
        Q m = 1;
        int e = 0;
        for (int i = 0; i < t.m.size(); ++i) e += t.m[i];
        for (int k = 0; k < e; ++k) m *= x;
        r += t.c * m;
    }
    return r;
}

std::vector<Q> apply_op(const DiffOp& L, const std::vector<Q>& f) {
    if (!L.univariate()) throw MathError("apply_op: coefficients must be univariate");
    long limit = static_cast<long>(f.size());
    bool any = false;
    for (int i = 0; i <= L.order(); ++i)
        for (const auto& t : L.p[i].terms()) {
            limit = std::min(limit, static_cast<long>(f.size()) - i + t.m[L.var]);
            any = true;
        }
    if (!any) limit = static_cast<long>(f.size());
    limit = std::max(limit, 0L);
    std::vector<Q> out(static_cast<std::size_t>(limit), Q(0));
    for (long n = 0; n < limit; ++n)
        for (int i = 0; i <= L.order(); ++i)
            for (const auto& t : L.p[i].terms()) {
                long src = n - t.m[L.var];
                if (src < 0) continue;
                out[n] += t.c * falling(Q(src + i), i) * f[src + i];
            }
    return out;
}

std::vector<Q> apply_op(const DiffOp& L, const std::vector<Q>& f, int n_out) {
    std::vector<Q> out = apply_op(L, f);
    if (static_cast<int>(out.size()) < n_out) throw MathError("apply_op: insufficient prefix");
    out.resize(static_cast<std::size_t>(n_out));
    return out;
}

RecOp ode_to_rec(const DiffOp& L) {
    if (!L.univariate()) throw MathError("ode_to_rec: coefficients must be univariate");
    std::map<int, MPoly> by_shift;
    MPoly n = MPoly::variable(1, 0);
    for (int i = 0; i <= L.order(); ++i)
        for (const auto& t : L.p[i].terms()) {
            int a = t.m[L.var];
            // [t^n] t^a D^i y = (n-a+1)...(n-a+i) u_{n-a+i}
            MPoly c = MPoly::constant(1, t.c);
            for (int l = 1; l <= i; ++l) c = c * (n + MPoly::constant(1, Q(l - a)));
            auto it = by_shift.find(i - a);
            if (it == by_shift.end()) by_shift.emplace(i - a, c);
            else it->second += c;
        }
    RecOp r;
    for (auto it = by_shift.begin(); it != by_shift.end();)
        it = it->second.is_zero() ? by_shift.erase(it) : std::next(it);
    if (by_shift.empty()) return r;
    int smin = by_shift.begin()->first, smax = by_shift.rbegin()->first;
    r.q.assign(static_cast<std::size_t>(smax - smin + 1), MPoly(1));
    for (const auto& [s, c] : by_shift) r.q[s - smin] = c.subst(0, n - MPoly::constant(1, Q(smin)));
    return r.normalize();
}

Indicial indicial_polynomial(const DiffOp& L) {
    if (L.is_zero()) throw MathError("indicial_polynomial: zero operator");
    Indicial ind;
    bool first = true;
    for (int i = 0; i <= L.order(); ++i)
        for (const auto& t : L.p[i].terms()) {
            int e = t.m[L.var] - i;
            if (first || e < ind.shift) ind.shift = e;
            first = false;
        }
    MPoly a = MPoly::variable(1, 0);
    ind.b = MPoly(1);
    for (int i = 0; i <= L.order(); ++i)
        for (const auto& t : L.p[i].terms()) {
            if (t.m[L.var] - i != ind.shift) continue;
            MPoly f = MPoly::constant(1, t.c);
            for (int l = 0; l < i; ++l) f = f * (a - MPoly::constant(1, Q(l)));
            ind.b += f;
        }
    return ind;
}

namespace {

std::vector<Z> prime_factors(Z x) {
    std::vector<Z> ps;
    if (x < 0) x = -x;
    for (unsigned long p = 2; p < 1000000 && Z(p) * p <= x; ++p) {
        if (x % p != 0) continue;
        ps.emplace_back(p);
        while (x % p == 0) x /= p;
    }
    if (x > 1) ps.push_back(x);  // treated as prime
    return ps;
}

std::vector<Z> divisors(const Z& x) {
    Z y = abs(x);
    std::vector<Z> ds{1};
    for (const Z& p : prime_factors(y)) {
        std::vector<Z> next;
        for (const Z& d : ds) {
            Z pw = 1, rest = y;
            while (true) {
                next.push_back(d * pw);
                if (rest % p != 0) break;
                rest /= p;
                pw *= p;
            }
        }
        ds = std::move(next);
    }
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    return ds;
}

// integer coefficient list of a univariate poly, lowest degree first
std::vector<Z> int_coeffs(const MPoly& b) {
    int d = b.degree(0);
    std::vector<Q> c(static_cast<std::size_t>(std::max(d, 0)) + 1, Q(0));
    for (const auto& t : b.terms()) c[t.m[0]] += t.c;
    Z den = 1;
    for (const auto& x : c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
    std::vector<Z> out;
    for (const auto& x : c) out.push_back(Z(x * den));
    return out;
}

Q eval_z(const std::vector<Z>& c, const Q& x) {
    Q r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + Q(*it);
    return r;
}

}  // namespace

std::vector<Q> rational_roots(const MPoly& b) {
    if (b.is_zero()) throw MathError("rational_roots: zero polynomial");
    std::vector<Z> c = int_coeffs(b);
    std::vector<Q> roots;
    std::size_t low = 0;
    while (low < c.size() && c[low] == 0) ++low;
    if (low > 0) roots.emplace_back(0);
    c.erase(c.begin(), c.begin() + static_cast<long>(low));
    if (c.size() > 1) {
        for (const Z& p : divisors(c.front()))
            for (const Z& q : divisors(c.back()))
                for (int sg : {1, -1}) {
                    Q x(Z(sg * p), q);
                    x.canonicalize();
                    if (eval_z(c, x) == 0) roots.push_back(x);
                }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

std::vector<long> nonneg_integer_roots(const MPoly& b) {
    if (b.is_zero()) throw MathError("nonneg_integer_roots: zero polynomial");
    std::vector<Z> c = int_coeffs(b);
    std::vector<long> out;
    if (c.size() <= 1) return out;
    // Cauchy bound; a scan is cheaper than factoring when it is small
    Q bound = 0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        Q r = Q(abs(c[i])) / Q(abs(c.back()));
        if (r > bound) bound = r;
    }
    if (bound < 100000) {
        long hi = static_cast<long>(Z(bound).get_si()) + 1;
        for (long k = 0; k <= hi; ++k)
            if (eval_z(c, Q(k)) == 0) out.push_back(k);
        return out;
    }
    for (const Q& r : rational_roots(b))
        if (r.get_den() == 1 && r >= 0 && r.get_num().fits_slong_p()) out.push_back(r.get_num().get_si());
    return out;
}

std::vector<Q> unroll(const RecOp& r, const std::map<long, Q>& inits, int N) {
    if (r.q.empty()) throw MathError("unroll: zero recurrence");
    int s = r.order();
    std::vector<Q> u;
    for (long k = 0; k < N; ++k) {
        auto it = inits.find(k);
        if (it != inits.end()) {
            u.push_back(it->second);
            continue;
        }
        long m = k - s;
        Q lead = eval_univariate(r.q[s], Q(m));
        if (lead == 0) throw MathError("unroll: singular index " + std::to_string(k));
        Q acc = 0;
        for (int i = 0; i < s; ++i) {
            long j = m + i;
            if (j < 0 || r.q[i].is_zero()) continue;
            acc += eval_univariate(r.q[i], Q(m)) * u[j];
        }
        u.push_back(-acc / lead);
    }
    return u;
}

// ---- D-finite series ----

std::vector<Q> DFiniteSeries::coefficients(int N) const { return unroll(ode_to_rec(op), inits, N); }

DFiniteSeries make_series(const DiffOp& op, const std::vector<Q>& prefix, Provenance prov) {
    DFiniteSeries f;
    f.op = op;
    f.prov = prov;
    for (long k : nonneg_integer_roots(indicial_polynomial(op).b)) {
        if (k >= static_cast<long>(prefix.size()))
            throw MathError("make_series: prefix too short for initial condition at " + std::to_string(k));
        f.inits[k] = prefix[k];
    }
    return f;
}

bool is_annihilated(const DFiniteSeries& f, const DiffOp& M) {
    if (M.is_zero()) return true;
    DiffOp D = right_gcd(M, f.op);
    DiffOp Lp = right_divide(f.op, D).q.to_poly();
    std::vector<long> roots = nonneg_integer_roots(indicial_polynomial(Lp).b);
    if (roots.empty()) return true;
    long top = *std::max_element(roots.begin(), roots.end());
    int N = static_cast<int>(top) + 1;
    std::vector<Q> g = apply_op(D, f.coefficients(N + D.order() + 1), N);
    for (long r : roots)
        if (g[r] != 0) return false;
    return true;
}

SeriesVerdict series_equal(const DFiniteSeries& f, const DFiniteSeries& g) {
    SeriesVerdict v;
    v.certified = f.prov == Provenance::Certified && g.prov == Provenance::Certified;
    if (!is_annihilated(g, f.op)) return v;
    std::vector<long> roots = nonneg_integer_roots(indicial_polynomial(f.op).b);
    long top = roots.empty() ? 0 : *std::max_element(roots.begin(), roots.end());
    std::vector<Q> a = f.coefficients(static_cast<int>(top) + 1), b = g.coefficients(static_cast<int>(top) + 1);
    v.equal = true;
    for (long r : roots)
        if (a[r] != b[r]) v.equal = false;
    return v;
}

}  // namespace bs
