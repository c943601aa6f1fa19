#include "bs/ratfun.hpp"

#include <algorithm>

namespace bs {

bool same_factor(const FactorRef& a, const FactorRef& b) {
    return a == b || (a->h == b->h && a->p == b->p);
}

FactorRef make_factor(const MPoly& normalized) { return std::make_shared<const FactorPoly>(normalized); }

PolySplit split_poly(const MPoly& p) {
    PolySplit s;
    int n = p.nvars();
    if (p.is_zero()) {
        s.c = 0;
        s.mono = ExpVec(n);
        s.rest = MPoly::constant(n, Q(1));
        return s;
    }
    s.mono = p.min_exponents();
    MPoly q = s.mono.is_zero() ? p : *p.divide_exact(MPoly::monomial(s.mono, Q(1)));
    s.c = q.content();
    s.rest = s.c == 1 ? q : q * Q(1 / s.c);
    return s;
}

namespace {

bool factor_before(const Factor& a, const Factor& b) {
    if (a.f->h != b.f->h) return a.f->h < b.f->h;
    return a.f->p.less_than(b.f->p);
}

}  // namespace

void RatFun::insert_factor(const FactorRef& f, int e) {
    if (e == 0) return;
    for (auto it = f_.begin(); it != f_.end(); ++it) {
        if (same_factor(it->f, f)) {
            it->e += e;
            if (it->e == 0) f_.erase(it);
            return;
        }
    }
    Factor nf{f, e};
    auto pos = std::lower_bound(f_.begin(), f_.end(), nf, factor_before);
    f_.insert(pos, nf);
}

void RatFun::absorb_poly(const MPoly& p, int e) {
    PolySplit s = split_poly(p);
    if (sgn(s.c) == 0) {
        if (e < 0) throw MathError("division by zero");
        c_ = 0;
        mono_ = ExpVec(n_);
        f_.clear();
        return;
    }
    if (e >= 0) {
        Q ce;
        mpz_pow_ui(ce.get_num_mpz_t(), s.c.get_num_mpz_t(), e);
        mpz_pow_ui(ce.get_den_mpz_t(), s.c.get_den_mpz_t(), e);
        ce.canonicalize();
        c_ *= ce;
    } else {
        Q ce;
        mpz_pow_ui(ce.get_num_mpz_t(), s.c.get_den_mpz_t(), -e);
        mpz_pow_ui(ce.get_den_mpz_t(), s.c.get_num_mpz_t(), -e);
        ce.canonicalize();
        c_ *= ce;
    }
    mono_ = mono_ + s.mono.scaled(e);
    if (!s.rest.is_constant()) insert_factor(make_factor(s.rest), e);
}

RatFun RatFun::constant(int nvars, const Q& c) {
    RatFun r(nvars);
    r.c_ = c;
    return r;
}

RatFun RatFun::from_poly(const MPoly& p) { return power_of(p, 1); }

RatFun RatFun::monomial(const ExpVec& m, const Q& c) {
    RatFun r(m.n);
    r.c_ = c;
    if (sgn(c) != 0) r.mono_ = m;
    return r;
}

RatFun RatFun::power_of(const MPoly& p, int e) {
    RatFun r = constant(p.nvars(), Q(1));
    r.absorb_poly(p, e);
    return r;
}

RatFun RatFun::quotient(const MPoly& num, const MPoly& den) {
    RatFun r = constant(num.nvars(), Q(1));
    r.absorb_poly(den, -1);
    r.absorb_poly(num, 1);
    return r;
}

RatFun RatFun::raw(int nvars, Q c, ExpVec mono, std::vector<Factor> fs) {
    RatFun r(nvars);
    r.c_ = std::move(c);
    if (sgn(r.c_) == 0) return r;
    r.mono_ = mono;
    for (auto& f : fs) r.insert_factor(f.f, f.e);
    return r;
}

bool RatFun::is_constant() const { return is_zero() || (mono_.is_zero() && f_.empty()); }

bool RatFun::is_polynomial() const {
    if (!mono_.nonnegative()) return false;
    for (const auto& f : f_)
        if (f.e < 0) return false;
    return true;
}

bool RatFun::depends_on(int v) const {
    if (is_zero()) return false;
    if (mono_[v] != 0) return true;
    for (const auto& f : f_)
        if (f.f->p.depends_on(v)) return true;
    return false;
}

MPoly RatFun::numerator() const {
    if (is_zero()) return MPoly(n_);
    ExpVec m(n_);
    for (int i = 0; i < n_; ++i) m[i] = std::max<int16_t>(mono_[i], 0);
    MPoly r = MPoly::monomial(m, c_);
    for (const auto& f : f_)
        if (f.e > 0) r = r * f.f->p.pow(f.e);
    return r;
}

MPoly RatFun::denominator() const {
    ExpVec m(n_);
    for (int i = 0; i < n_; ++i) m[i] = std::max<int16_t>(static_cast<int16_t>(-mono_[i]), 0);
    MPoly r = MPoly::monomial(m, Q(1));
    for (const auto& f : f_)
        if (f.e < 0) r = r * f.f->p.pow(-f.e);
    return r;
}

std::vector<std::pair<MPoly, int>> RatFun::denominator_factors() const {
    std::vector<std::pair<MPoly, int>> out;
    for (int i = 0; i < n_; ++i)
        if (mono_[i] < 0) out.emplace_back(MPoly::variable(n_, i), -mono_[i]);
    for (const auto& f : f_)
        if (f.e < 0) out.emplace_back(f.f->p, -f.e);
    return out;
}

RatFun RatFun::operator*(const RatFun& o) const {
    if (is_zero() || o.is_zero()) return RatFun(std::max(n_, o.n_));
    RatFun r = *this;
    r.c_ *= o.c_;
    r.mono_ = r.mono_ + o.mono_;
    for (const auto& f : o.f_) r.insert_factor(f.f, f.e);
    return r;
}

RatFun RatFun::operator*(const Q& q) const {
    if (sgn(q) == 0) return RatFun(n_);
    RatFun r = *this;
    r.c_ *= q;
    return r;
}

RatFun RatFun::operator-() const {
    RatFun r = *this;
    r.c_ = -r.c_;
    return r;
}

RatFun RatFun::inv() const {
    if (is_zero()) throw MathError("inverse of zero");
    RatFun r = *this;
    r.c_ = 1 / c_;
    r.mono_ = -mono_;
    for (auto& f : r.f_) f.e = -f.e;
    return r;
}

RatFun RatFun::pow(int k) const {
    if (k < 0) return inv().pow(-k);
    if (k == 0) return constant(n_, Q(1));
    if (is_zero()) return *this;
    RatFun r = *this;
    mpz_pow_ui(r.c_.get_num_mpz_t(), c_.get_num_mpz_t(), k);
    mpz_pow_ui(r.c_.get_den_mpz_t(), c_.get_den_mpz_t(), k);
    r.mono_ = mono_.scaled(k);
    for (auto& f : r.f_) f.e *= k;
    return r;
}

RatFun RatFun::operator+(const RatFun& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    int n = std::max(n_, o.n_);
    // common part G: min exponents
    ExpVec mg(n);
    for (int i = 0; i < n; ++i) mg[i] = std::min(mono_[i], o.mono_[i]);
    std::vector<Factor> g;
    auto exp_in = [](const std::vector<Factor>& fs, const FactorRef& f) {
        for (const auto& x : fs)
            if (same_factor(x.f, f)) return x.e;
        return 0;
    };
    for (const auto& f : f_) {
        int e = std::min(f.e, exp_in(o.f_, f.f));
        if (e) g.push_back({f.f, e});
    }
    for (const auto& f : o.f_) {
        if (exp_in(f_, f.f) != 0) continue;
        if (f.e < 0) g.push_back({f.f, f.e});
    }
    auto cofactor = [&](const RatFun& x) {
        MPoly p = MPoly::monomial(x.mono_ - mg, x.c_);
        for (const auto& f : x.f_) {
            int e = f.e - exp_in(g, f.f);
            if (e) p = p * f.f->p.pow(e);
        }
        for (const auto& f : g) {
            if (exp_in(x.f_, f.f) == 0) p = p * f.f->p.pow(-f.e);
        }
        return p;
    };
    MPoly s = cofactor(*this) + cofactor(o);
    if (s.is_zero()) return RatFun(n);
    RatFun r = raw(n, Q(1), mg, g);
    PolySplit sp = split_poly(s);
    r.c_ = sp.c;
    r.mono_ = r.mono_ + sp.mono;
    MPoly rest = sp.rest;
    // cancel shared denominator factors
    for (const auto& f : g) {
        if (f.e >= 0 || rest.is_constant()) continue;
        int e = f.e;
        while (e < 0 && !rest.is_constant()) {
            auto q = rest.divide_exact(f.f->p);
            if (!q) break;
            rest = *q;
            ++e;
            r.insert_factor(f.f, 1);
        }
    }
    if (!rest.is_constant()) {
        r.insert_factor(make_factor(rest), 1);
    } else {
        r.c_ *= rest.constant_value();
    }
    return r;
}

RatFun RatFun::operator-(const RatFun& o) const { return *this + (-o); }

RatFun RatFun::derivative(int v) const {
    if (is_zero()) return *this;
    std::vector<const Factor*> dep;
    for (const auto& f : f_)
        if (f.f->p.depends_on(v)) dep.push_back(&f);
    int mv = mono_[v];
    if (dep.empty() && mv == 0) return RatFun(n_);
    // R' = R * (mv/v + sum e f'/f) = R * P / (v^[mv!=0] * prod f)
    PolyBuilder b(n_);
    MPoly vpoly = MPoly::variable(n_, v);
    MPoly all = MPoly::constant(n_, Q(1));
    for (const Factor* f : dep) all = all * f->f->p;
    if (mv != 0) b.add(all, Q(mv));
    for (std::size_t i = 0; i < dep.size(); ++i) {
        MPoly term = dep[i]->f->p.derivative(v) * Q(dep[i]->e);
        for (std::size_t j = 0; j < dep.size(); ++j)
            if (j != i) term = term * dep[j]->f->p;
        if (mv != 0) term = term * vpoly;
        b.add(term);
    }
    MPoly p = b.build();
    RatFun r = *this;
    if (mv != 0) r.mono_[v] = static_cast<int16_t>(r.mono_[v] - 1);
    for (const Factor* f : dep) r.insert_factor(f->f, -1);
    r.absorb_poly(p, 1);
    return r;
}

RatFun RatFun::subst(int v, const MPoly& num, const MPoly& den) const {
    if (!depends_on(v)) return *this;
    RatFun r = constant(n_, c_);
    ExpVec m = mono_;
    int mv = m[v];
    m[v] = 0;
    r.mono_ = m;
    if (mv) {
        r.absorb_poly(num, mv);
        r.absorb_poly(den, -mv);
    }
    for (const auto& f : f_) {
        if (!f.f->p.depends_on(v)) {
            r.insert_factor(f.f, f.e);
            continue;
        }
        int d = f.f->p.degree(v);
        r.absorb_poly(f.f->p.subst_homogenized(v, num, den), f.e);
        r.absorb_poly(den, -d * f.e);
    }
    return r;
}

RatFun RatFun::subst(int v, const RatFun& val) const {
    return subst(v, val.numerator(), val.denominator());
}

RatFun RatFun::rename(const std::vector<int>& target, int new_nvars) const {
    RatFun r = constant(new_nvars, c_);
    if (is_zero()) return r;
    for (int i = 0; i < n_; ++i) {
        if (mono_[i] == 0) continue;
        if (target[i] < 0) throw MathError("rename: dropped variable occurs");
        r.mono_[target[i]] = static_cast<int16_t>(r.mono_[target[i]] + mono_[i]);
    }
    for (const auto& f : f_) r.absorb_poly(f.f->p.rename(target, new_nvars), f.e);
    return r;
}

std::pair<ExpVec, Q> RatFun::leading_monomial() const {
    if (is_zero()) throw MathError("leading monomial of zero");
    ExpVec m = mono_;
    Q c = c_;
    for (const auto& f : f_) {
        const auto& t = f.f->p.lead();
        m = m + t.m.scaled(f.e);
        Q ce;
        int a = f.e < 0 ? -f.e : f.e;
        mpz_pow_ui(ce.get_num_mpz_t(), t.c.get_num_mpz_t(), a);
        mpz_pow_ui(ce.get_den_mpz_t(), t.c.get_den_mpz_t(), a);
        ce.canonicalize();
        if (f.e < 0)
            c /= ce;
        else
            c *= ce;
    }
    return {m, c};
}

bool RatFun::same_form(const RatFun& o) const { return c_ == o.c_ && same_signature(o); }

std::size_t RatFun::signature_hash() const {
    std::size_t h = mono_.hash();
    for (const auto& f : f_) h = h * 1000003u ^ (f.f->h + 0x9e3779b97f4a7c15ULL * static_cast<std::size_t>(f.e + 1000));
    return h;
}

bool RatFun::same_signature(const RatFun& o) const {
    if (!(mono_ == o.mono_) || f_.size() != o.f_.size()) return false;
    for (std::size_t i = 0; i < f_.size(); ++i)
        if (f_[i].e != o.f_[i].e || !same_factor(f_[i].f, o.f_[i].f)) return false;
    return true;
}

std::string RatFun::to_string(const std::vector<std::string>& names) const {
    if (is_zero()) return "0";
    MPoly num = numerator();
    std::string ns = num.to_string(names);
    std::vector<std::string> den;
    auto var_name = [&](int i) { return i < static_cast<int>(names.size()) ? names[i] : "x" + std::to_string(i); };
    std::vector<const Factor*> neg;
    for (const auto& f : f_)
        if (f.e < 0) neg.push_back(&f);
    std::sort(neg.begin(), neg.end(), [](const Factor* a, const Factor* b) {
        int da = a->f->p.total_degree(), db = b->f->p.total_degree();
        if (da != db) return da < db;
        return a->f->p.less_than(b->f->p);
    });
    for (int i = 0; i < n_; ++i) {
        if (mono_[i] >= 0) continue;
        std::string s = var_name(i);
        if (mono_[i] != -1) s += "^" + std::to_string(-mono_[i]);
        den.push_back(s);
    }
    bool single = neg.size() + den.size() == 1;
    for (const Factor* f : neg) {
        std::string s = f->f->p.to_string(names);
        if (!single || f->e != -1) {
            if (f->f->p.size() > 1) s = "(" + s + ")";
            if (f->e != -1) s += "^" + std::to_string(-f->e);
        }
        den.push_back(s);
    }
    if (den.empty()) return ns;
    if (num.size() > 1) ns = "(" + ns + ")";
    std::string ds;
    for (std::size_t i = 0; i < den.size(); ++i) ds += (i ? "*" : "") + den[i];
    return ns + "/(" + ds + ")";
}

RatFun cancel_common(const RatFun& r) {
    if (r.is_zero()) return r;
    int n = r.nvars();
    MPoly N = MPoly::constant(n, 1);
    bool any_pos = false;
    for (const auto& f : r.factors())
        if (f.e > 0) {
            N = N * f.f->p.pow(f.e);
            any_pos = true;
        }
    if (!any_pos) return r;
    RatFun den = RatFun::monomial(r.mono(), r.coeff());
    bool changed = false;
    for (const auto& f : r.factors()) {
        if (f.e > 0) continue;
        int k = 0;
        while (k < -f.e) {
            auto q = N.divide_exact(f.f->p);
            if (!q) break;
            N = std::move(*q);
            ++k;
        }
        changed |= k > 0;
        den *= RatFun::power_of(f.f->p, f.e + k);
    }
    if (!changed) return r;
    return den * RatFun::from_poly(N);
}

}  // namespace bs
