#include "bs/geomred.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>

namespace bs {

namespace {

struct StepOverrun {};

thread_local std::optional<std::chrono::steady_clock::time_point> g_deadline;

// ---- modular coprimality filter ----

constexpr uint64_t kPrime = 2147483647ULL;

uint64_t mulm(uint64_t a, uint64_t b) { return a * b % kPrime; }

uint64_t powm(uint64_t a, uint64_t e) {
    uint64_t r = 1;
    for (; e; e >>= 1, a = mulm(a, a))
        if (e & 1) r = mulm(r, a);
    return r;
}

std::optional<uint64_t> mod_of(const Q& q) {
    Z num = q.get_num() % Z(static_cast<unsigned long>(kPrime));
    Z den = q.get_den() % Z(static_cast<unsigned long>(kPrime));
    if (num < 0) num += Z(static_cast<unsigned long>(kPrime));
    uint64_t d = den.get_ui();
    if (d == 0) return std::nullopt;
    return mulm(num.get_ui(), powm(d, kPrime - 2));
}

using ModPoly = std::vector<uint64_t>;

void mod_trim(ModPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// Image of p in F_P[v] with the other variables at pt; nullopt when a denominator vanishes.
std::optional<ModPoly> mod_image(const MPoly& p, int v, const std::vector<uint64_t>& pt) {
    ModPoly out(static_cast<std::size_t>(std::max(p.degree(v), 0)) + 1, 0);
    for (const auto& t : p.terms()) {
        auto c = mod_of(t.c);
        if (!c) return std::nullopt;
        uint64_t x = *c;
        for (int i = 0; i < p.nvars(); ++i) {
            if (i == v || t.m[i] == 0) continue;
            uint64_t b = t.m[i] > 0 ? pt[i] : powm(pt[i], kPrime - 2);
            x = mulm(x, powm(b, static_cast<uint64_t>(std::abs(t.m[i]))));
        }
        uint64_t& slot = out[static_cast<std::size_t>(t.m[v])];
        slot = (slot + x) % kPrime;
    }
    mod_trim(out);
    return out;
}

int mod_gcd_degree(ModPoly a, ModPoly b) {
    while (!b.empty()) {
        uint64_t il = powm(b.back(), kPrime - 2);
        while (a.size() >= b.size()) {
            uint64_t k = mulm(a.back(), il);
            std::size_t s = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) a[i + s] = (a[i + s] + kPrime - mulm(k, b[i])) % kPrime;
            mod_trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return static_cast<int>(a.size()) - 1;
}

// True only when p and q provably share no factor of positive degree in v: a common
// factor g keeps its v-degree in any image where lc_v(p) does not vanish.
bool certainly_coprime_in(int v, const MPoly& p, const MPoly& q) {
    if (p.degree(v) <= 0 || q.degree(v) <= 0) return true;
    uint64_t seed = 0x9e3779b97f4a7c15ULL;
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<uint64_t> pt(static_cast<std::size_t>(p.nvars()));
        for (auto& x : pt) {
            seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
            x = (seed >> 33) % (kPrime - 2) + 2;
        }
        auto a = mod_image(p, v, pt), b = mod_image(q, v, pt);
        if (!a || !b || static_cast<int>(a->size()) - 1 != p.degree(v)) continue;
        return mod_gcd_degree(*a, *b) <= 0;
    }
    return false;
}

void check_deadline() {
    if (g_deadline && std::chrono::steady_clock::now() > *g_deadline) throw StepOverrun{};
}

}  // namespace

// ---- UPoly ----

void UPoly::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

UPoly UPoly::from_poly(const MPoly& p, int v) {
    UPoly u;
    for (const auto& q : p.coeffs_in(v)) u.c.push_back(RatFun::from_poly(q));
    u.trim();
    return u;
}

RatFun UPoly::to_ratfun(int nvars, int v) const {
    RatFun r = RatFun::constant(nvars, 0);
    for (int i = deg(); i >= 0; --i) {
        r *= RatFun::variable(nvars, v);
        r += c[i];
    }
    return r;
}

UPoly operator+(const UPoly& a, const UPoly& b) {
    UPoly r = a.c.size() >= b.c.size() ? a : b;
    const UPoly& s = a.c.size() >= b.c.size() ? b : a;
    for (std::size_t i = 0; i < s.c.size(); ++i) r.c[i] += s.c[i];
    r.trim();
    return r;
}

UPoly operator-(const UPoly& a, const UPoly& b) {
    UPoly nb = b;
    for (auto& x : nb.c) x = -x;
    return a + nb;
}

UPoly operator*(const UPoly& a, const UPoly& b) {
    UPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    int n = a.c[0].nvars();
    r.c.assign(a.c.size() + b.c.size() - 1, RatFun::constant(n, 0));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        check_deadline();
        if (a.c[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            if (!b.c[j].is_zero()) r.c[i + j] += a.c[i] * b.c[j];
    }
    r.trim();
    return r;
}

UPoly operator*(const UPoly& a, const RatFun& s) {
    UPoly r;
    if (s.is_zero()) return r;
    for (const auto& x : a.c) r.c.push_back(x * s);
    r.trim();
    return r;
}

void divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r) {
    if (b.is_zero()) throw MathError("divmod: division by zero");
    r = a;
    q = UPoly{};
    if (r.deg() < b.deg()) return;
    int n = b.c[0].nvars();
    q.c.assign(r.deg() - b.deg() + 1, RatFun::constant(n, 0));
    RatFun ilc = b.lc().inv();
    while (!r.is_zero() && r.deg() >= b.deg()) {
        check_deadline();
        int s = r.deg() - b.deg();
        RatFun k = r.lc() * ilc;
        q.c[s] = k;
        for (int i = 0; i < b.deg(); ++i)
            if (!b.c[i].is_zero()) r.c[i + s] = r.c[i + s] - k * b.c[i];
        r.c.pop_back();
        r.trim();
    }
    q.trim();
}

UPoly rem(const UPoly& a, const UPoly& b) {
    UPoly q, r;
    divmod(a, b, q, r);
    return r;
}

std::optional<UPoly> inverse_mod(const UPoly& a, const UPoly& m) {
    if (m.deg() < 1) throw MathError("inverse_mod: modulus of degree < 1");
    UPoly r0 = m, r1 = rem(a, m);
    if (r1.is_zero()) return std::nullopt;
    int n = m.c[0].nvars();
    UPoly s0, s1;
    s1.c.push_back(RatFun::constant(n, 1));
    while (!r1.is_zero()) {
        UPoly q, r;
        divmod(r0, r1, q, r);
        UPoly s = s0 - q * s1;
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r0.deg() != 0) return std::nullopt;
    return rem(s0 * r0.c[0].inv(), m);
}

// ---- all large or all small ----

std::string Largeness::to_string() const {
    if (in && out) return "in,out";
    if (in) return "in";
    if (out) return "out";
    return "-";
}

namespace {

Largeness alls(const std::vector<ExpVec>& S, int first, int k) {
    auto mk = [&](const std::vector<ExpVec>& T, bool mx) {
        int r = T[0][k];
        for (const auto& m : T) r = mx ? std::max<int>(r, m[k]) : std::min<int>(r, m[k]);
        return r;
    };
    Largeness r;
    int smax = mk(S, true), smin = mk(S, false);
    if (smax == smin) return r;
    if (k == first) {
        r.out = true;
        return r;
    }
    int mu = S[0][first];
    for (const auto& m : S) mu = std::min<int>(mu, m[first]);
    std::vector<ExpVec> M;
    for (const auto& m : S)
        if (m[first] == mu) M.push_back(m);
    r = alls(M, first + 1, k);
    if (smax > mk(M, true)) r.out = true;
    if (smin < mk(M, false)) r.in = true;
    return r;
}

}  // namespace

Largeness all_large_or_all_small(const std::vector<ExpVec>& S, int k) {
    if (S.empty()) throw MathError("all_large_or_all_small: empty support");
    if (k < 0 || k >= S[0].size()) throw MathError("all_large_or_all_small: bad variable");
    return alls(S, 0, k);
}

Largeness all_large_or_all_small(const MPoly& f, int k) {
    std::vector<ExpVec> S;
    for (const auto& t : f.terms()) S.push_back(t.m);
    return all_large_or_all_small(S, k);
}

// ---- decomposition in one variable ----

namespace {

struct VSplit {
    RatFun K;                                  // v-free part
    MPoly N;                                   // v-dependent numerator
    std::vector<std::pair<MPoly, int>> dens;   // v-dependent denominator factors
};

VSplit split_in(const RatFun& F, int v) {
    int n = F.nvars();
    VSplit s;
    ExpVec m = F.mono();
    int mv = m[v];
    m[v] = 0;
    s.K = RatFun::monomial(m, F.coeff());
    s.N = MPoly::variable(n, v, std::max(mv, 0));
    for (const auto& f : F.factors()) {
        if (!f.f->p.depends_on(v))
            s.K *= RatFun::power_of(f.f->p, f.e);
        else if (f.e > 0)
            s.N = s.N * f.f->p.pow(static_cast<unsigned>(f.e));
        else
            s.dens.emplace_back(f.f->p, -f.e);
    }
    if (mv < 0) s.dens.emplace_back(MPoly::variable(n, v), -mv);
    return s;
}

struct Group {
    std::vector<std::pair<MPoly, int>> members;
    UPoly D;
    Largeness lg;
};

MPoly group_poly(const Group& g) {
    MPoly P = MPoly::constant(g.members[0].first.nvars(), 1);
    for (const auto& [p, e] : g.members) P = P * p.pow(static_cast<unsigned>(e));
    return P;
}

// Denominator factors merged until pairwise coprime in v.
std::vector<Group> coprime_groups(const std::vector<std::pair<MPoly, int>>& dens, int v) {
    std::vector<Group> gs;
    for (const auto& d : dens) {
        Group g;
        g.members.push_back(d);
        for (std::size_t i = 0; i < gs.size();) {
            bool shared = false;
            for (const auto& [p, e] : gs[i].members) {
                if (certainly_coprime_in(v, p, d.first)) continue;
                check_deadline();
                if (poly_gcd_in(v, p, d.first).degree(v) > 0) {
                    shared = true;
                    break;
                }
            }
            if (shared) {
                g.members.insert(g.members.end(), gs[i].members.begin(), gs[i].members.end());
                gs.erase(gs.begin() + static_cast<long>(i));
            } else {
                ++i;
            }
        }
        gs.push_back(std::move(g));
    }
    for (auto& g : gs) g.D = UPoly::from_poly(group_poly(g), v);
    return gs;
}

// Numerator of the partial fraction part over group k: N / (other groups) mod D_k,
// inverting each other factor on its own.
std::optional<UPoly> part_numerator(const UPoly& N, const std::vector<Group>& gs, std::size_t k, int v) {
    const UPoly& Dk = gs[k].D;
    UPoly a = rem(N, Dk);
    for (std::size_t j = 0; j < gs.size(); ++j) {
        if (j == k) continue;
        for (const auto& [p, e] : gs[j].members) {
            auto inv = inverse_mod(UPoly::from_poly(p, v), Dk);
            if (!inv) return std::nullopt;
            for (int i = 0; i < e; ++i) a = rem(a * *inv, Dk);
        }
    }
    return a;
}

// coefficient of v^{deg m - 1} in a mod m over lc(m): the sum of finite residues of a/m
RatFun finite_residue_sum(const UPoly& a, const UPoly& m) {
    UPoly r = rem(a, m);
    int n = m.c[0].nvars();
    int k = m.deg() - 1;
    if (k < 0 || r.deg() < k) return RatFun::constant(n, 0);
    return r.c[k] / m.lc();
}

RatFun eval_at_zero(const RatFun& H, int v) {
    if (H.mono()[v] > 0) return RatFun::constant(H.nvars(), 0);
    if (H.mono()[v] < 0) throw MathError("residue: pole left at v = 0");
    return H.subst(v, MPoly(H.nvars()), MPoly::constant(H.nvars(), 1));
}

UPoly truncate(UPoly a, int m) {
    if (a.deg() >= m) a.c.resize(m);
    a.trim();
    return a;
}

// [v^{m-1}] N / prod dens, every den nonzero at v = 0
RatFun residue_at_zero(const MPoly& N, const std::vector<std::pair<MPoly, int>>& dens, int m, int v) {
    int n = N.nvars();
    UPoly num = truncate(UPoly::from_poly(N, v), m), den;
    den.c.push_back(RatFun::constant(n, 1));
    for (const auto& [p, e] : dens) {
        UPoly f = truncate(UPoly::from_poly(p, v), m);
        for (int i = 0; i < e; ++i) den = truncate(den * f, m);
    }
    if (den.is_zero() || den.c[0].is_zero()) throw MathError("residue_at_zero: pole at the origin");
    RatFun i0 = den.c[0].inv();
    std::vector<RatFun> q;
    for (int j = 0; j < m; ++j) {
        check_deadline();
        RatFun acc = j <= num.deg() ? num.c[j] : RatFun::constant(n, 0);
        for (int i = 1; i <= j && i <= den.deg(); ++i)
            if (!den.c[i].is_zero() && !q[j - i].is_zero()) acc = acc - den.c[i] * q[j - i];
        q.push_back(acc * i0);
    }
    return q[m - 1];
}

bool root_is_small(const MPoly& f, int v) {
    MPoly c1 = f.coeff_of(v, 1), c0 = f.coeff_of(v, 0);
    if (c0.terms().empty()) return true;
    ExpVec e = c0.lead().m - c1.lead().m;
    return monomial_below_one(e - ExpVec::unit(e.size(), v));
}

}  // namespace

RatFun PFDecomp::recombine() const {
    RatFun r = poly_part.to_ratfun(nvars, v);
    for (const auto& p : parts) r += p.a.to_ratfun(nvars, v) * RatFun::power_of(p.f, -p.n);
    return r;
}

PFDecomp partial_fractions(const RatFun& F, int v) {
    PFDecomp out;
    out.v = v;
    out.nvars = F.nvars();
    VSplit s = split_in(F, v);
    UPoly N = UPoly::from_poly(s.N, v);
    std::vector<Group> gs = coprime_groups(s.dens, v);
    UPoly D;
    D.c.push_back(RatFun::constant(F.nvars(), 1));
    for (const auto& g : gs) D = D * g.D;
    UPoly Qp, R;
    divmod(N, D, Qp, R);
    out.poly_part = Qp * s.K;
    for (std::size_t k = 0; k < gs.size(); ++k) {
        auto a = part_numerator(R, gs, k, v);
        if (!a) throw MathError("partial_fractions: factors not coprime");
        PFPart part;
        part.a = *a * s.K;
        if (gs[k].members.size() == 1) {
            part.f = gs[k].members[0].first;
            part.n = gs[k].members[0].second;
        } else {
            part.f = group_poly(gs[k]);
            part.n = 1;
        }
        out.parts.push_back(std::move(part));
    }
    return out;
}

RatFun residue_at_rational_pole(const RatFun& F, int v, const MPoly& f, int n) {
    if (f.degree(v) != 1) throw MathError("residue_at_rational_pole: factor not of degree 1");
    if (n < 1) throw MathError("residue_at_rational_pole: bad order");
    MPoly c1 = f.coeff_of(v, 1), c0 = f.coeff_of(v, 0);
    RatFun H = F * RatFun::power_of(f, n);
    Z fact = 1;
    for (int i = 1; i < n; ++i) {
        check_deadline();
        H = H.derivative(v);
        fact *= i;
    }
    RatFun at = c0.terms().empty() ? eval_at_zero(H, v) : H.subst(v, -c0, c1);
    return at / RatFun::from_poly(c1).pow(n) * Q(Z(1), fact);
}

RatFun sum_of_all_residues(const RatFun& F, int v) {
    VSplit s = split_in(F, v);
    if (s.dens.empty()) return RatFun::constant(F.nvars(), 0);
    MPoly D = MPoly::constant(F.nvars(), 1);
    for (const auto& [p, e] : s.dens) D = D * p.pow(static_cast<unsigned>(e));
    return finite_residue_sum(UPoly::from_poly(s.N, v), UPoly::from_poly(D, v)) * s.K;
}

namespace {

std::optional<ResidueRep> red_step(const ResidueRep& R, int v, StepTrace* trace) {
    if (v < R.ord.param_count || v >= R.ord.size()) throw MathError("geom_red_step: not a residue variable");
    const RatFun& F = R.fun;
    int n = F.nvars();
    StepTrace tr;
    tr.var = R.ord.names[v];
    RatFun res = RatFun::constant(n, 0);
    auto finish = [&](const std::string& rule) -> std::optional<ResidueRep> {
        tr.rule = rule;
        if (trace) *trace = tr;
        if (rule == "fail") return std::nullopt;
        std::vector<int> target(n);
        for (int i = 0; i < n; ++i) target[i] = i < v ? i : (i == v ? -1 : i - 1);
        ResidueRep out;
        out.fun = cancel_common(res.rename(target, n - 1));
        out.ord = R.ord;
        out.ord.names.erase(out.ord.names.begin() + v);
        return out;
    };
    if (F.is_zero()) return finish("zero");

    VSplit s = split_in(F, v);
    std::vector<Group> gs = coprime_groups(s.dens, v);
    bool all_linear = true;
    for (auto& g : gs) {
        if (g.members.size() > 1) all_linear = false;
        for (const auto& [p, e] : g.members) {
            Largeness lg;
            if (p.degree(v) == 1) {
                (root_is_small(p, v) ? lg.in : lg.out) = true;
            } else {
                all_linear = false;
                lg = all_large_or_all_small(p, v);
                if (!lg.in && !lg.out) lg.out = true;
            }
            g.lg.in |= lg.in;
            g.lg.out |= lg.out;
            tr.factors.emplace_back(p.to_string(R.ord.names), lg.to_string());
        }
    }
    for (const auto& g : gs)
        if (g.lg.mixed()) return finish("fail");

    bool any_small = false, any_large = false;
    for (const auto& g : gs) (g.lg.in ? any_small : any_large) = true;
    if (!any_small) return finish("all-large");
    UPoly N = UPoly::from_poly(s.N, v);
    if (!any_large && !all_linear && gs.size() > 1) {
        UPoly S;
        S.c.push_back(RatFun::constant(n, 1));
        for (const auto& g : gs) S = S * g.D;
        res = finite_residue_sum(N, S) * s.K;
        return finish("all-small");
    }
    for (std::size_t k = 0; k < gs.size(); ++k) {
        const Group& g = gs[k];
        if (!g.lg.in) continue;
        if (g.members.size() == 1 && g.members[0].first.degree(v) == 1) {
            const auto& [p, e] = g.members[0];
            if (p.coeff_of(v, 0).terms().empty()) {
                std::vector<std::pair<MPoly, int>> others;
                for (const auto& d : s.dens)
                    if (!(d.first == p)) others.push_back(d);
                res += residue_at_zero(s.N, others, e, v) * s.K;
            } else {
                res += residue_at_rational_pole(F, v, p, e);
            }
            continue;
        }
        auto a = part_numerator(N, gs, k, v);
        if (!a) return finish("fail");
        res += finite_residue_sum(*a, g.D) * s.K;
    }
    return finish(all_linear ? "simple-poles" : "partial-fractions");
}

}  // namespace

std::optional<ResidueRep> geom_red_step(const ResidueRep& R, int v, StepTrace* trace, const ReduceBudget& budget) {
    if (budget.step_seconds > 0)
        g_deadline = std::chrono::steady_clock::now() +
                     std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                         std::chrono::duration<double>(budget.step_seconds));
    std::optional<ResidueRep> out;
    try {
        out = red_step(R, v, trace);
    } catch (const StepOverrun&) {
        g_deadline.reset();
        if (trace) *trace = StepTrace{R.ord.names[v], "budget", {}};
        return std::nullopt;
    }
    g_deadline.reset();
    if (out && budget.max_terms > 0 && out->fun.numerator().size() > budget.max_terms) {
        if (trace) trace->rule = "budget";
        return std::nullopt;
    }
    return out;
}

ResidueRep reduce_fixpoint(const ResidueRep& R, std::vector<StepTrace>* trace, const ReduceBudget& budget) {
    ResidueRep cur = R;
    for (bool progress = true; progress;) {
        progress = false;
        for (int v = cur.ord.param_count; v < cur.ord.size(); ++v) {
            StepTrace tr;
            auto next = geom_red_step(cur, v, &tr, budget);
            if (!next) continue;
            if (trace) trace->push_back(tr);
            cur = std::move(*next);
            progress = true;
            break;
        }
    }
    return cur;
}

ResidueRep reduce_terms(const std::vector<ResidueRep>& terms, std::vector<StepTrace>* trace,
                        const ReduceBudget& budget) {
    if (terms.empty()) throw MathError("reduce_terms: no terms");
    const VarOrder& base = terms[0].ord;
    std::vector<ResidueRep> red;
    std::vector<bool> keep(base.size(), false);
    for (int i = 0; i < base.param_count; ++i) keep[i] = true;
    for (const auto& t : terms) {
        if (t.ord.names != base.names) throw MathError("reduce_terms: variable orders differ");
        if (t.fun.is_zero()) continue;
        ResidueRep r = reduce_fixpoint(t, trace, budget);
        if (r.fun.is_zero()) continue;
        for (const auto& nm : r.ord.names) keep[base.index(nm)] = true;
        red.push_back(std::move(r));
    }
    VarOrder ord;
    ord.param_count = base.param_count;
    for (int i = 0; i < base.size(); ++i)
        if (keep[i]) ord.names.push_back(base.names[i]);
    int n = ord.size();
    RatFun sum = RatFun::constant(n, 0);
    for (const auto& r : red) {
        std::vector<int> target;
        for (const auto& nm : r.ord.names) target.push_back(ord.index(nm));
        RatFun f = r.fun.rename(target, n);
        // variables this term already eliminated: res_v (g / v) = g
        ExpVec m(n);
        for (int i = ord.param_count; i < n; ++i)
            if (r.ord.index(ord.names[i]) < 0) m[i] = -1;
        sum += f * RatFun::monomial(m);
    }
    return reduce_fixpoint(ResidueRep{cancel_common(sum), ord}, trace, budget);
}

}  // namespace bs
