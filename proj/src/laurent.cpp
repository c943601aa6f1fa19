#include "bs/laurent.hpp"

#include <algorithm>

namespace bs {

// ---- LinComb ----

LinComb LinComb::of(const RatFun& r) {
    LinComb l(r.nvars());
    l.add(r);
    return l;
}

void LinComb::add(const RatFun& r, const Q& w) {
    if (r.is_zero() || sgn(w) == 0) return;
    if (n_ == 0) n_ = r.nvars();
    Q weight = r.coeff() * w;
    std::size_t h = r.signature_hash();
    auto& slot = index_[h];
    for (std::size_t idx : slot) {
        if (items_[idx].first.same_signature(r)) {
            items_[idx].second += weight;
            return;
        }
    }
    RatFun shape = r * Q(1 / r.coeff());
    slot.push_back(items_.size());
    items_.emplace_back(std::move(shape), std::move(weight));
}

void LinComb::add(const LinComb& o, const Q& w) {
    for (const auto& [r, c] : o.items_)
        if (sgn(c) != 0) add(r, c * w);
}

LinComb LinComb::times(const RatFun& r) const {
    LinComb out(std::max(n_, r.nvars()));
    if (r.is_zero()) return out;
    for (const auto& [s, c] : items_)
        if (sgn(c) != 0) out.add(s * r, c);
    return out;
}

LinComb LinComb::times(const LinComb& o) const {
    LinComb out(std::max(n_, o.n_));
    for (const auto& [s, c] : items_) {
        if (sgn(c) == 0) continue;
        for (const auto& [s2, c2] : o.items_)
            if (sgn(c2) != 0) out.add(s * s2, c * c2);
    }
    return out;
}

bool LinComb::is_zero() const {
    for (const auto& it : items_)
        if (sgn(it.second) != 0) return false;
    return true;
}

std::size_t LinComb::size() const {
    std::size_t k = 0;
    for (const auto& it : items_)
        if (sgn(it.second) != 0) ++k;
    return k;
}

std::vector<std::pair<RatFun, Q>> LinComb::terms() const {
    std::vector<std::pair<RatFun, Q>> out;
    for (const auto& it : items_)
        if (sgn(it.second) != 0) out.push_back(it);
    return out;
}

RatFun LinComb::sum() const {
    RatFun r(n_);
    for (const auto& [s, c] : items_)
        if (sgn(c) != 0) r = r + s * c;
    return r;
}

Q LinComb::constant_value() const {
    Q v = 0;
    for (const auto& [s, c] : items_) {
        if (sgn(c) == 0) continue;
        if (!s.is_constant()) throw MathError("LinComb::constant_value: non-constant term");
        v += c * s.coeff();
    }
    return v;
}

// ---- per-factor series ----

struct CoeffExtractor::Series {
    FactorRef f;
    int e = 0;
    int v = 0;
    RatFun content;           // v-free part raised to e
    std::vector<MPoly> a;     // coefficients in v of the primitive part
    enum Kind { Binomial, Positive, Miller } kind = Miller;
    int j = 0;                // second exponent of a binomial
    RatFun A0, Aj;
    MPoly expanded;           // Positive: pp^e truncated
    int expanded_to = -1;
    std::vector<MPoly> P;     // Miller numerators
    std::vector<MPoly> a0pow;
    std::vector<LinComb> s;
};

CoeffExtractor::CoeffExtractor(std::size_t term_budget) : budget_(term_budget) {}
CoeffExtractor::~CoeffExtractor() = default;

void CoeffExtractor::charge(std::size_t n) {
    work_ += n;
    if (work_ > budget_) throw BudgetExceeded("coefficient extraction exceeded its term budget");
}

namespace {

MPoly truncate_in(const MPoly& p, int v, int K) {
    std::vector<MPoly::Term> ts;
    for (const auto& t : p.terms())
        if (t.m[v] <= K) ts.push_back(t);
    return MPoly::from_terms(p.nvars(), std::move(ts));
}

MPoly trunc_pow(const MPoly& p, unsigned e, int v, int K) {
    MPoly r = MPoly::constant(p.nvars(), Q(1));
    MPoly b = truncate_in(p, v, K);
    while (e) {
        if (e & 1) r = truncate_in(r * b, v, K);
        e >>= 1;
        if (e) b = truncate_in(b * b, v, K);
    }
    return r;
}

}  // namespace

CoeffExtractor::Series& CoeffExtractor::series_for(const FactorRef& f, int e, int v) {
    std::size_t key = f->h * 1315423911u + static_cast<std::size_t>(e) * 2654435761u + static_cast<std::size_t>(v);
    auto& bucket = cache_[key];
    for (auto& s : bucket)
        if (s->e == e && s->v == v && same_factor(s->f, f)) return *s;
    auto s = std::make_unique<Series>();
    s->f = f;
    s->e = e;
    s->v = v;
    const MPoly& p = f->p;
    int n = p.nvars();
    MPoly cont = content_in(v, p);
    MPoly pp = p;
    if (!cont.is_constant()) {
        pp = *p.divide_exact(cont);
        s->content = RatFun::power_of(cont, e);
    } else {
        s->content = RatFun::constant(n, Q(1));
    }
    s->a = pp.coeffs_in(v);
    if (s->a.empty() || s->a[0].is_zero()) throw MathError("factor vanishes at the expansion point");
    int nz = 0, last = 0;
    for (std::size_t k = 0; k < s->a.size(); ++k)
        if (!s->a[k].is_zero()) {
            ++nz;
            last = static_cast<int>(k);
        }
    if (nz == 2) {
        s->kind = Series::Binomial;
        s->j = last;
        s->A0 = RatFun::from_poly(s->a[0]);
        s->Aj = RatFun::from_poly(s->a[last]);
    } else if (e > 0) {
        s->kind = Series::Positive;
        s->expanded = pp;
    } else {
        s->kind = Series::Miller;
        s->P.push_back(MPoly::constant(n, Q(1)));
        s->a0pow.push_back(MPoly::constant(n, Q(1)));
        s->A0 = RatFun::from_poly(s->a[0]);
    }
    bucket.push_back(std::move(s));
    return *bucket.back();
}

void CoeffExtractor::extend(Series& s, int K) {
    int n = s.f->p.nvars();
    int have = static_cast<int>(s.s.size());
    if (have > K) return;
    switch (s.kind) {
    case Series::Binomial:
        for (int k = have; k <= K; ++k) {
            LinComb c(n);
            if (k % s.j == 0) {
                int q = k / s.j;
                Z b = binomial(Z(s.e), q);
                if (b != 0) c.add(s.A0.pow(s.e - q) * s.Aj.pow(q), Q(b));
            }
            charge(1);
            s.s.push_back(std::move(c));
        }
        break;
    case Series::Positive: {
        if (s.expanded_to < K) {
            int target = std::max(K, 2 * s.expanded_to + 1);
            MPoly pp = MPoly::from_coeffs(n, s.v, s.a);
            s.expanded = trunc_pow(pp, static_cast<unsigned>(s.e), s.v, target);
            s.expanded_to = target;
            charge(s.expanded.size());
        }
        for (int k = have; k <= K; ++k) {
            LinComb c(n);
            MPoly ck = s.expanded.coeff_of(s.v, k);
            if (!ck.is_zero()) c.add(RatFun::from_poly(ck));
            s.s.push_back(std::move(c));
        }
        break;
    }
    case Series::Miller: {
        int deg = static_cast<int>(s.a.size()) - 1;
        while (static_cast<int>(s.a0pow.size()) < deg) s.a0pow.push_back(s.a0pow.back() * s.a[0]);
        for (int k = static_cast<int>(s.P.size()); k <= K; ++k) {
            PolyBuilder b(n);
            for (int j = 1; j <= std::min(k, deg); ++j) {
                if (s.a[j].is_zero()) continue;
                long w = static_cast<long>(s.e + 1) * j - k;
                if (w == 0) continue;
                b.add_product(s.a[j] * s.a0pow[j - 1], s.P[k - j], Q(w, k));
            }
            MPoly pk = b.build();
            charge(pk.size() + 1);
            s.P.push_back(std::move(pk));
        }
        for (int k = have; k <= K; ++k) {
            LinComb c(n);
            if (!s.P[k].is_zero()) c.add(RatFun::from_poly(s.P[k]) * s.A0.pow(s.e - k));
            s.s.push_back(std::move(c));
        }
        break;
    }
    }
}

void CoeffExtractor::split(const RatFun& R, int v, RatFun& base, std::vector<Series*>& dep, int& shift) {
    int n = R.nvars();
    ExpVec m = R.mono();
    shift = m[v];
    m[v] = 0;
    std::vector<Factor> keep;
    dep.clear();
    for (const auto& f : R.factors()) {
        if (f.f->p.depends_on(v))
            dep.push_back(&series_for(f.f, f.e, v));
        else
            keep.push_back(f);
    }
    base = RatFun::raw(n, R.coeff(), m, keep);
    for (Series* s : dep) base = base * s->content;
}

std::vector<LinComb> CoeffExtractor::coeffs(const RatFun& R, int v, int lo, int hi) {
    int n = R.nvars();
    std::vector<LinComb> out(hi >= lo ? hi - lo + 1 : 0, LinComb(n));
    if (R.is_zero() || hi < lo) return out;
    RatFun base;
    std::vector<Series*> dep;
    int shift = 0;
    split(R, v, base, dep, shift);
    int K = hi - shift;
    if (K < 0) return out;
    int from = std::max(0, lo - shift);
    std::vector<LinComb> cur(K + 1, LinComb(n));
    cur[0].add(RatFun::constant(n, Q(1)));
    for (std::size_t d = 0; d < dep.size(); ++d) {
        Series& s = *dep[d];
        extend(s, K);
        bool last = d + 1 == dep.size();
        std::vector<LinComb> nxt(K + 1, LinComb(n));
        for (int k = last ? from : 0; k <= K; ++k) {
            for (int i = 0; i <= k; ++i) {
                if (cur[i].is_zero() || s.s[k - i].is_zero()) continue;
                charge(cur[i].size() * s.s[k - i].size());
                nxt[k].add(cur[i].times(s.s[k - i]));
            }
        }
        cur = std::move(nxt);
    }
    for (int k = from; k <= K; ++k) {
        if (cur[k].is_zero()) continue;
        charge(cur[k].size());
        out[k + shift - lo] = cur[k].times(base);
    }
    return out;
}

LinComb CoeffExtractor::coeff(const RatFun& R, int v, int m) { return coeffs(R, v, m, m)[0]; }

LinComb CoeffExtractor::coeff(const LinComb& L, int v, int m) {
    LinComb out(L.nvars());
    for (const auto& [r, w] : L.terms()) out.add(coeff(r, v, m), w);
    return out;
}

Q CoeffExtractor::extract_from(const LinComb& L0, const ExpVec& target, int first_var) {
    LinComb L = L0;
    for (int v = first_var; v < target.n; ++v) {
        L = coeff(L, v, target[v]);
        if (L.is_zero()) return Q(0);
    }
    return L.constant_value();
}

Q CoeffExtractor::extract(const RatFun& R, const ExpVec& target) {
    return extract_from(LinComb::of(R), target, 0);
}

std::vector<Q> CoeffExtractor::series(const RatFun& R, int v, int N, const ExpVec& rest_target) {
    std::vector<Q> out(N);
    if (N <= 0) return out;
    auto cs = coeffs(R, v, 0, N - 1);
    for (int k = 0; k < N; ++k) out[k] = cs[k].is_zero() ? Q(0) : extract_from(cs[k], rest_target, v + 1);
    return out;
}

LaurentPrefix laurent_expand(const RatFun& R, int v, int n_terms) {
    LaurentPrefix lp;
    lp.var = v;
    int val = R.is_zero() ? 0 : R.mono()[v];
    lp.order = val + n_terms;
    if (R.is_zero() || n_terms <= 0) return lp;
    CoeffExtractor ex;
    auto cs = ex.coeffs(R, v, val, val + n_terms - 1);
    for (int k = 0; k < n_terms; ++k) {
        RatFun c = cs[k].sum();
        if (!c.is_zero()) lp.coeffs.emplace(val + k, c);
    }
    return lp;
}

Q coeff_extract(const RatFun& R, const ExpVec& target) {
    CoeffExtractor ex;
    return ex.extract(R, target);
}

}  // namespace bs
