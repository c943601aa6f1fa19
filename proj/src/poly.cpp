#include "bs/poly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace bs {

// ---- ExpVec ----

ExpVec ExpVec::from(const std::vector<int>& v) {
    if (v.size() > static_cast<std::size_t>(kMaxVars)) throw MathError("too many variables");
    ExpVec r(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) r.e[i] = static_cast<int16_t>(v[i]);
    return r;
}

ExpVec ExpVec::unit(int nvars, int i, int power) {
    ExpVec r(nvars);
    r.e[i] = static_cast<int16_t>(power);
    return r;
}

ExpVec ExpVec::operator+(const ExpVec& o) const {
    ExpVec r(n);
    for (int i = 0; i < n; ++i) r.e[i] = static_cast<int16_t>(e[i] + o.e[i]);
    return r;
}

ExpVec ExpVec::operator-(const ExpVec& o) const {
    ExpVec r(n);
    for (int i = 0; i < n; ++i) r.e[i] = static_cast<int16_t>(e[i] - o.e[i]);
    return r;
}

ExpVec ExpVec::operator-() const {
    ExpVec r(n);
    for (int i = 0; i < n; ++i) r.e[i] = static_cast<int16_t>(-e[i]);
    return r;
}

ExpVec ExpVec::scaled(int k) const {
    ExpVec r(n);
    for (int i = 0; i < n; ++i) r.e[i] = static_cast<int16_t>(e[i] * k);
    return r;
}

bool ExpVec::is_zero() const {
    for (int i = 0; i < n; ++i)
        if (e[i]) return false;
    return true;
}

bool ExpVec::nonnegative() const {
    for (int i = 0; i < n; ++i)
        if (e[i] < 0) return false;
    return true;
}

int ExpVec::total() const {
    int s = 0;
    for (int i = 0; i < n; ++i) s += e[i];
    return s;
}

std::size_t ExpVec::hash() const {
    uint64_t h = 1469598103934665603ULL ^ n;
    for (int i = 0; i < n; ++i) {
        h ^= static_cast<uint16_t>(e[i]);
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

std::vector<int> ExpVec::to_vector() const { return std::vector<int>(e.begin(), e.begin() + n); }

int exp_lex(const ExpVec& a, const ExpVec& b) {
    for (int i = 0; i < a.n; ++i) {
        if (a.e[i] != b.e[i]) return a.e[i] < b.e[i] ? -1 : 1;
    }
    return 0;
}

std::strong_ordering lex_cmp(const ExpVec& a, const ExpVec& b) {
    if (a.n != b.n) throw MathError("lex_cmp: length mismatch");
    int c = exp_lex(a, b);
    if (c < 0) return std::strong_ordering::greater;
    if (c > 0) return std::strong_ordering::less;
    return std::strong_ordering::equal;
}

std::strong_ordering lex_cmp(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw MathError("lex_cmp: length mismatch");
    return lex_cmp(ExpVec::from(a), ExpVec::from(b));
}

bool monomial_below_one(const ExpVec& a) {
    for (int i = 0; i < a.n; ++i) {
        if (a.e[i] > 0) return true;
        if (a.e[i] < 0) return false;
    }
    return false;
}

// ---- VarOrder ----

int VarOrder::index(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names[i] == name) return i;
    return -1;
}

void VarOrder::validate() const {
    if (size() > kMaxVars) throw MathError("too many variables");
    if (param_count < 0 || param_count > size()) throw MathError("bad parameter count");
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw MathError("duplicate variable name");
}

// ---- helpers ----

namespace {

bool term_less(const MPoly::Term& a, const MPoly::Term& b) { return exp_lex(a.m, b.m) < 0; }

struct ExpDesc {
    bool operator()(const ExpVec& a, const ExpVec& b) const { return exp_lex(a, b) > 0; }
};

void sort_merge(std::vector<MPoly::Term>& buf) {
    std::sort(buf.begin(), buf.end(), term_less);
    std::size_t w = 0;
    for (std::size_t i = 0; i < buf.size();) {
        std::size_t j = i + 1;
        while (j < buf.size() && buf[j].m == buf[i].m) {
            buf[i].c += buf[j].c;
            ++j;
        }
        if (sgn(buf[i].c) != 0) {
            if (w != i) buf[w] = std::move(buf[i]);
            ++w;
        }
        i = j;
    }
    buf.resize(w);
}

}  // namespace

void PolyBuilder::add(const ExpVec& m, const Q& c) {
    if (sgn(c) != 0) buf_.push_back({m, c});
}

void PolyBuilder::add(const MPoly& p, const Q& scale) {
    if (sgn(scale) == 0) return;
    for (const auto& t : p.terms()) buf_.push_back({t.m, t.c * scale});
}

void PolyBuilder::add_product(const MPoly& a, const MPoly& b, const Q& scale) {
    if (sgn(scale) == 0) return;
    buf_.reserve(buf_.size() + a.size() * b.size());
    for (const auto& x : a.terms()) {
        Q xs = x.c * scale;
        for (const auto& y : b.terms()) buf_.push_back({x.m + y.m, xs * y.c});
    }
}

MPoly PolyBuilder::build() {
    sort_merge(buf_);
    MPoly p(n_);
    p.t_ = std::move(buf_);
    buf_.clear();
    return p;
}

// ---- MPoly ----

MPoly MPoly::constant(int nvars, const Q& c) {
    MPoly p(nvars);
    if (sgn(c) != 0) p.t_.push_back({ExpVec(nvars), c});
    return p;
}

MPoly MPoly::variable(int nvars, int i, int power) {
    MPoly p(nvars);
    p.t_.push_back({ExpVec::unit(nvars, i, power), Q(1)});
    return p;
}

MPoly MPoly::monomial(const ExpVec& m, const Q& c) {
    MPoly p(m.n);
    if (sgn(c) != 0) p.t_.push_back({m, c});
    return p;
}

MPoly MPoly::from_terms(int nvars, std::vector<Term> terms) {
    sort_merge(terms);
    MPoly p(nvars);
    p.t_ = std::move(terms);
    return p;
}

bool MPoly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.is_zero()); }

Q MPoly::constant_value() const {
    if (!t_.empty() && t_[0].m.is_zero()) return t_[0].c;
    return Q(0);
}

bool MPoly::operator==(const MPoly& o) const {
    if (t_.size() != o.t_.size()) return false;
    for (std::size_t i = 0; i < t_.size(); ++i)
        if (!(t_[i].m == o.t_[i].m) || t_[i].c != o.t_[i].c) return false;
    return true;
}

MPoly MPoly::operator+(const MPoly& o) const {
    MPoly r(std::max(n_, o.n_));
    r.t_.reserve(t_.size() + o.t_.size());
    std::size_t i = 0, j = 0;
    while (i < t_.size() || j < o.t_.size()) {
        if (j == o.t_.size() || (i < t_.size() && exp_lex(t_[i].m, o.t_[j].m) < 0)) {
            r.t_.push_back(t_[i++]);
        } else if (i == t_.size() || exp_lex(t_[i].m, o.t_[j].m) > 0) {
            r.t_.push_back(o.t_[j++]);
        } else {
            Q c = t_[i].c + o.t_[j].c;
            if (sgn(c) != 0) r.t_.push_back({t_[i].m, c});
            ++i;
            ++j;
        }
    }
    return r;
}

MPoly MPoly::operator-() const {
    MPoly r = *this;
    for (auto& t : r.t_) t.c = -t.c;
    return r;
}

MPoly MPoly::operator-(const MPoly& o) const { return *this + (-o); }

MPoly& MPoly::operator+=(const MPoly& o) { return *this = *this + o; }
MPoly& MPoly::operator-=(const MPoly& o) { return *this = *this - o; }

MPoly MPoly::operator*(const MPoly& o) const {
    if (is_zero() || o.is_zero()) return MPoly(std::max(n_, o.n_));
    if (o.size() == 1) return mul_monomial(o.t_[0].m) * o.t_[0].c;
    if (size() == 1) return o.mul_monomial(t_[0].m) * t_[0].c;
    PolyBuilder b(std::max(n_, o.n_));
    b.add_product(*this, o);
    return b.build();
}

MPoly MPoly::operator*(const Q& c) const {
    if (sgn(c) == 0) return MPoly(n_);
    MPoly r = *this;
    for (auto& t : r.t_) t.c *= c;
    return r;
}

MPoly MPoly::pow(unsigned k) const {
    MPoly r = constant(n_, Q(1));
    MPoly b = *this;
    while (k) {
        if (k & 1) r = r * b;
        k >>= 1;
        if (k) b = b * b;
    }
    return r;
}

MPoly MPoly::mul_monomial(const ExpVec& m) const {
    MPoly r = *this;
    for (auto& t : r.t_) t.m = t.m + m;
    return r;
}

bool MPoly::depends_on(int v) const {
    for (const auto& t : t_)
        if (t.m[v] != 0) return true;
    return false;
}

int MPoly::degree(int v) const {
    int d = -1;
    for (const auto& t : t_) d = std::max<int>(d, t.m[v]);
    return d;
}

int MPoly::min_degree(int v) const {
    if (t_.empty()) return -1;
    int d = t_[0].m[v];
    for (const auto& t : t_) d = std::min<int>(d, t.m[v]);
    return d;
}

int MPoly::total_degree() const {
    int d = -1;
    for (const auto& t : t_) d = std::max(d, t.m.total());
    return d;
}

ExpVec MPoly::min_exponents() const {
    ExpVec r(n_);
    if (t_.empty()) return r;
    r = t_[0].m;
    for (const auto& t : t_)
        for (int i = 0; i < n_; ++i) r.e[i] = std::min(r.e[i], t.m.e[i]);
    return r;
}

ExpVec MPoly::max_exponents() const {
    ExpVec r(n_);
    for (const auto& t : t_)
        for (int i = 0; i < n_; ++i) r.e[i] = std::max(r.e[i], t.m.e[i]);
    return r;
}

MPoly MPoly::derivative(int v) const {
    PolyBuilder b(n_);
    for (const auto& t : t_) {
        if (t.m[v] == 0) continue;
        ExpVec m = t.m;
        m[v] = static_cast<int16_t>(m[v] - 1);
        b.add(m, t.c * t.m[v]);
    }
    return b.build();
}

std::vector<MPoly> MPoly::coeffs_in(int v) const {
    int d = degree(v);
    std::vector<std::vector<Term>> parts(d < 0 ? 0 : d + 1);
    for (const auto& t : t_) {
        ExpVec m = t.m;
        int k = m[v];
        m[v] = 0;
        parts[k].push_back({m, t.c});
    }
    std::vector<MPoly> out;
    out.reserve(parts.size());
    for (auto& p : parts) {
        // Terms are already in ascending order after zeroing v within one slice.
        MPoly q(n_);
        q.t_ = std::move(p);
        out.push_back(std::move(q));
    }
    return out;
}

MPoly MPoly::from_coeffs(int nvars, int v, const std::vector<MPoly>& cs) {
    PolyBuilder b(nvars);
    for (std::size_t k = 0; k < cs.size(); ++k) {
        for (const auto& t : cs[k].terms()) {
            ExpVec m = t.m;
            m[v] = static_cast<int16_t>(m[v] + k);
            b.add(m, t.c);
        }
    }
    return b.build();
}

MPoly MPoly::coeff_of(int v, int power) const {
    MPoly q(n_);
    for (const auto& t : t_) {
        if (t.m[v] != power) continue;
        ExpVec m = t.m;
        m[v] = 0;
        q.t_.push_back({m, t.c});
    }
    return q;
}

MPoly MPoly::subst_homogenized(int v, const MPoly& num, const MPoly& den) const {
    auto cs = coeffs_in(v);
    if (cs.empty()) return MPoly(n_);
    int d = static_cast<int>(cs.size()) - 1;
    std::vector<MPoly> dp(d + 1);
    dp[0] = constant(n_, Q(1));
    for (int j = 1; j <= d; ++j) dp[j] = dp[j - 1] * den;
    MPoly r = cs[d];
    for (int j = d - 1; j >= 0; --j) {
        r = r * num;
        if (!cs[j].is_zero()) r += cs[j] * dp[d - j];
    }
    return r;
}

MPoly MPoly::subst(int v, const MPoly& val) const {
    return subst_homogenized(v, val, constant(n_, Q(1)));
}

MPoly MPoly::rename(const std::vector<int>& target, int new_nvars) const {
    PolyBuilder b(new_nvars);
    for (const auto& t : t_) {
        ExpVec m(new_nvars);
        for (int i = 0; i < n_; ++i) {
            if (t.m[i] == 0) continue;
            if (target[i] < 0) throw MathError("rename: dropped variable occurs");
            m[target[i]] = static_cast<int16_t>(m[target[i]] + t.m[i]);
        }
        b.add(m, t.c);
    }
    return b.build();
}

MPoly MPoly::reverse_in(int v) const {
    int d = degree(v);
    PolyBuilder b(n_);
    for (const auto& t : t_) {
        ExpVec m = t.m;
        m[v] = static_cast<int16_t>(d - m[v]);
        b.add(m, t.c);
    }
    return b.build();
}

std::optional<MPoly> MPoly::divide_exact(const MPoly& d) const {
    if (d.is_zero()) throw MathError("division by zero polynomial");
    if (is_zero()) return MPoly(n_);
    if (d.size() == 1) {
        const auto& dt = d.t_[0];
        MPoly r(n_);
        r.t_.reserve(t_.size());
        for (const auto& t : t_) {
            ExpVec m = t.m - dt.m;
            if (!m.nonnegative()) return std::nullopt;
            r.t_.push_back({m, t.c / dt.c});
        }
        return r;
    }
    ExpVec mx = max_exponents(), dmx = d.max_exponents();
    ExpVec mn = min_exponents(), dmn = d.min_exponents();
    for (int i = 0; i < n_; ++i)
        if (dmx[i] > mx[i] || dmn[i] > mn[i]) return std::nullopt;

    const Term& dl = d.t_.back();
    std::map<ExpVec, Q, ExpDesc> rem;
    for (const auto& t : t_) rem.emplace(t.m, t.c);
    std::vector<Term> q;
    while (!rem.empty()) {
        auto it = rem.begin();
        ExpVec m = it->first - dl.m;
        if (!m.nonnegative()) return std::nullopt;
        Q c = it->second / dl.c;
        rem.erase(it);
        for (std::size_t k = 0; k + 1 < d.t_.size(); ++k) {
            ExpVec mm = m + d.t_[k].m;
            auto [jt, inserted] = rem.try_emplace(mm, Q(0));
            jt->second -= c * d.t_[k].c;
            if (sgn(jt->second) == 0) rem.erase(jt);
        }
        q.push_back({m, c});
    }
    std::reverse(q.begin(), q.end());
    MPoly r(n_);
    r.t_ = std::move(q);
    return r;
}

Q MPoly::content() const {
    if (t_.empty()) return Q(0);
    Z g = 0, l = 1;
    for (const auto& t : t_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_num_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.get_den_mpz_t());
    }
    Q c(g, l);
    c.canonicalize();
    if (sgn(t_[0].c) < 0) c = -c;
    return c;
}

MPoly MPoly::primitive() const {
    if (t_.empty()) return *this;
    Q c = content();
    if (c == 1) return *this;
    Q ic = 1 / c;
    return *this * ic;
}

std::size_t MPoly::hash() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : t_) {
        h ^= t.m.hash();
        h *= 1099511628211ULL;
        h ^= mpz_get_ui(t.c.get_num_mpz_t()) + 31 * static_cast<uint64_t>(sgn(t.c) + 1);
        h *= 1099511628211ULL;
        h ^= mpz_get_ui(t.c.get_den_mpz_t());
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

bool MPoly::less_than(const MPoly& o) const {
    if (t_.size() != o.t_.size()) return t_.size() < o.t_.size();
    for (std::size_t i = 0; i < t_.size(); ++i) {
        int c = exp_lex(t_[i].m, o.t_[i].m);
        if (c) return c < 0;
        int cc = cmp(t_[i].c, o.t_[i].c);
        if (cc) return cc < 0;
    }
    return false;
}

std::string q_to_string(const Q& q) { return q.get_str(); }

std::string MPoly::to_string(const VarOrder& ord) const { return to_string(ord.names); }

std::string MPoly::to_string(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::vector<const Term*> ts;
    for (const auto& t : t_) ts.push_back(&t);
    std::stable_sort(ts.begin(), ts.end(), [](const Term* a, const Term* b) {
        int da = a->m.total(), db = b->m.total();
        if (da != db) return da < db;
        return exp_lex(a->m, b->m) > 0;
    });
    std::string out;
    bool first = true;
    for (const Term* t : ts) {
        Q c = t->c;
        bool neg = sgn(c) < 0;
        if (neg) c = -c;
        if (neg)
            out += "-";
        else if (!first)
            out += "+";
        first = false;
        std::string mono;
        for (int i = 0; i < t->m.n; ++i) {
            if (t->m[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += i < static_cast<int>(names.size()) ? names[i] : ("x" + std::to_string(i));
            if (t->m[i] != 1) mono += "^" + std::to_string(t->m[i]);
        }
        if (mono.empty()) {
            out += c.get_str();
        } else {
            if (c != 1) out += c.get_str() + "*";
            out += mono;
        }
    }
    return out;
}

Z binomial(const Z& n, long k) {
    if (k < 0) return Z(0);
    Z r;
    mpz_bin_ui(r.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(k));
    return r;
}

// ---- gcd ----

namespace {

MPoly one_like(int n) { return MPoly::constant(n, Q(1)); }

MPoly lc_in(const MPoly& p, int v) { return p.coeff_of(v, p.degree(v)); }

MPoly normalize(const MPoly& p) { return p.primitive(); }

MPoly gcd_rec(const MPoly& a, const MPoly& b);

// gcd of the polynomial coefficients of p in v
MPoly content_rec(int v, const MPoly& p) {
    auto cs = p.coeffs_in(v);
    std::vector<MPoly> nz;
    for (auto& c : cs)
        if (!c.is_zero()) nz.push_back(std::move(c));
    std::sort(nz.begin(), nz.end(), [](const MPoly& x, const MPoly& y) { return x.size() < y.size(); });
    if (nz.empty()) return MPoly(p.nvars());
    MPoly g = normalize(nz[0]);
    for (std::size_t i = 1; i < nz.size() && !g.is_constant(); ++i) g = gcd_rec(g, nz[i]);
    if (g.is_constant()) return one_like(p.nvars());
    return g;
}

MPoly gcd_rec(const MPoly& a0, const MPoly& b0) {
    int n = std::max(a0.nvars(), b0.nvars());
    if (a0.is_zero()) return normalize(b0);
    if (b0.is_zero()) return normalize(a0);
    if (a0.is_constant() || b0.is_constant()) return one_like(n);

    // monomial content
    ExpVec ma = a0.min_exponents(), mb = b0.min_exponents();
    ExpVec mg(n);
    for (int i = 0; i < n; ++i) mg[i] = std::min(ma[i], mb[i]);
    MPoly a = ma.is_zero() ? a0 : *a0.divide_exact(MPoly::monomial(ma, Q(1)));
    MPoly b = mb.is_zero() ? b0 : *b0.divide_exact(MPoly::monomial(mb, Q(1)));
    MPoly mono = MPoly::monomial(mg, Q(1));
    if (a.is_constant() || b.is_constant()) return mono;

    if (a.size() <= b.size()) {
        if (b.divisible_by(a)) return mono * normalize(a);
    } else if (a.divisible_by(b)) {
        return mono * normalize(b);
    }

    // variable appearing in only one side
    for (int v = 0; v < n; ++v) {
        bool da = a.depends_on(v), db = b.depends_on(v);
        if (da && !db) return mono * gcd_rec(content_rec(v, a), b);
        if (db && !da) return mono * gcd_rec(a, content_rec(v, b));
    }

    int v = -1, best = 1 << 30;
    for (int i = 0; i < n; ++i) {
        if (!a.depends_on(i)) continue;
        int d = std::max(a.degree(i), b.degree(i));
        if (d < best) {
            best = d;
            v = i;
        }
    }

    MPoly ca = content_rec(v, a), cb = content_rec(v, b);
    MPoly gc = gcd_rec(ca, cb);
    MPoly pa = ca.is_constant() ? a : *a.divide_exact(ca);
    MPoly pb = cb.is_constant() ? b : *b.divide_exact(cb);
    if (pa.degree(v) < pb.degree(v)) std::swap(pa, pb);
    while (!pb.is_zero() && pb.degree(v) > 0) {
        MPoly r = prem(pa, pb, v);
        pa = std::move(pb);
        if (r.is_zero()) {
            pb = MPoly(n);
            break;
        }
        MPoly cr = content_rec(v, r);
        pb = cr.is_constant() ? normalize(r) : normalize(*r.divide_exact(cr));
    }
    MPoly g = pb.is_zero() ? normalize(pa) : one_like(n);
    return normalize(mono * gc * g);
}

}  // namespace

MPoly prem(const MPoly& a, const MPoly& b, int v) {
    int db = b.degree(v);
    if (db < 0) throw MathError("prem by zero");
    MPoly lcb = lc_in(b, v);
    MPoly r = a;
    while (!r.is_zero() && r.degree(v) >= db) {
        int dr = r.degree(v);
        MPoly lcr = lc_in(r, v);
        MPoly g = gcd_rec(lcb, lcr);
        MPoly fb = g.is_constant() ? lcb : *lcb.divide_exact(g);
        MPoly fr = g.is_constant() ? lcr : *lcr.divide_exact(g);
        r = r * fb - (b * fr).mul_monomial(ExpVec::unit(a.nvars(), v, dr - db));
        r = r.primitive();
    }
    return r;
}

MPoly gcd(const MPoly& a, const MPoly& b) {
    if (a.is_zero() && b.is_zero()) throw MathError("gcd of two zero polynomials");
    return gcd_rec(a, b);
}

MPoly content_in(int v, const MPoly& p) {
    if (p.is_zero()) return p;
    return content_rec(v, p);
}

MPoly poly_gcd_in(int v, const MPoly& p, const MPoly& q) {
    if (p.is_zero() && q.is_zero()) throw MathError("poly_gcd_in: both inputs zero");
    MPoly g = gcd(p, q);
    if (!g.depends_on(v)) return one_like(g.nvars());
    MPoly c = content_rec(v, g);
    return c.is_constant() ? g : normalize(*g.divide_exact(c));
}

// ---- parser ----

namespace {

class PolyParser {
public:
    PolyParser(const std::string& s, const std::vector<std::string>& names) : s_(s), names_(names) {}

    MPoly parse() {
        MPoly p = expr();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return p;
    }

private:
    const std::string& s_;
    const std::vector<std::string>& names_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw MathError("polynomial parse error at " + std::to_string(i_) + ": " + what);
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    int nv() const { return static_cast<int>(names_.size()); }

    MPoly expr() {
        MPoly r(nv());
        bool neg = eat('-');
        if (!neg) eat('+');
        r = term();
        if (neg) r = -r;
        while (true) {
            if (eat('+'))
                r += term();
            else if (eat('-'))
                r -= term();
            else
                break;
        }
        return r;
    }
    MPoly term() {
        MPoly r = factor();
        while (true) {
            if (eat('*')) {
                r = r * factor();
            } else if (eat('/')) {
                MPoly d = factor();
                if (!d.is_constant() || d.is_zero()) fail("division by non-constant");
                r = r * (1 / d.constant_value());
            } else {
                break;
            }
        }
        return r;
    }
    MPoly factor() {
        MPoly b = atom();
        if (eat('^')) {
            skip();
            std::size_t st = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            if (st == i_) fail("expected exponent");
            b = b.pow(static_cast<unsigned>(std::stoul(s_.substr(st, i_ - st))));
        }
        return b;
    }
    MPoly atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            MPoly r = expr();
            if (!eat(')')) fail("expected )");
            return r;
        }
        if (c == '-') {
            ++i_;
            return -factor();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t st = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            return MPoly::constant(nv(), Q(Z(s_.substr(st, i_ - st))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t st = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            std::string id = s_.substr(st, i_ - st);
            for (int k = 0; k < nv(); ++k)
                if (names_[k] == id) return MPoly::variable(nv(), k);
            i_ = st;
            fail("unknown variable '" + id + "'");
        }
        fail(std::string("unexpected '") + c + "'");
    }
};

}  // namespace

MPoly parse_poly(const std::string& text, const std::vector<std::string>& names) {
    return PolyParser(text, names).parse();
}

}  // namespace bs
