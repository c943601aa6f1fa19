#include "bs/sumlang.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace bs {

// ---- Affine ----

Affine Affine::var(int id, long coef) {
    Affine a;
    if (coef) a.c[id] = coef;
    return a;
}

long Affine::coef(int id) const {
    auto it = c.find(id);
    return it == c.end() ? 0 : it->second;
}

long Affine::eval(const std::vector<long>& env) const {
    long v = k;
    for (const auto& [id, co] : c) v += co * env[id];
    return v;
}

Affine Affine::operator+(const Affine& o) const {
    Affine r = *this;
    r.k += o.k;
    for (const auto& [id, co] : o.c) {
        long& x = r.c[id];
        x += co;
        if (x == 0) r.c.erase(id);
    }
    return r;
}

Affine Affine::operator-(const Affine& o) const { return *this + o * -1; }

Affine Affine::operator*(long s) const {
    Affine r;
    if (s == 0) return r;
    r.k = k * s;
    for (const auto& [id, co] : c) r.c[id] = co * s;
    return r;
}

Affine Affine::subst(const std::map<int, Affine>& m) const {
    Affine r = Affine::constant(k);
    for (const auto& [id, co] : c) {
        auto it = m.find(id);
        r = r + (it == m.end() ? Affine::var(id, co) : it->second * co);
    }
    return r;
}

std::string Affine::to_string(const std::vector<std::string>& names) const {
    std::string out;
    for (const auto& [id, co] : c) {
        std::string nm = id >= 0 && id < static_cast<int>(names.size()) ? names[id] : "i" + std::to_string(id);
        if (co < 0)
            out += "-";
        else if (!out.empty())
            out += "+";
        long a = co < 0 ? -co : co;
        if (a != 1) out += std::to_string(a) + "*";
        out += nm;
    }
    if (k != 0 || out.empty()) {
        if (k >= 0 && !out.empty()) out += "+";
        out += std::to_string(k);
    }
    return out;
}

// ---- node construction ----

namespace {

std::atomic<int> g_node_ids{0};

void add_vars(std::set<int>& s, const Affine& a) {
    for (const auto& [id, co] : a.c) s.insert(id);
}

std::shared_ptr<Node> new_node(NodeKind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->id = g_node_ids++;
    return n;
}

void finish(Node& n) {
    std::set<int> s;
    for (const auto& a : n.args) add_vars(s, a);
    switch (n.kind) {
    case NodeKind::DirectedSum:
    case NodeKind::StdSum:
    case NodeKind::InfSum: {
        std::set<int> inner(n.kids[0]->free.begin(), n.kids[0]->free.end());
        inner.erase(n.index);
        s.insert(inner.begin(), inner.end());
        break;
    }
    case NodeKind::Subst:
        for (int id : n.kids[0]->free) {
            auto it = n.repl.find(id);
            if (it == n.repl.end())
                s.insert(id);
            else
                add_vars(s, it->second);
        }
        break;
    default:
        for (const auto& k : n.kids) s.insert(k->free.begin(), k->free.end());
    }
    n.free.assign(s.begin(), s.end());
}

}  // namespace

NodeRef make_atom(NodeKind kind, std::vector<Affine> args, Q value) {
    auto n = new_node(kind);
    n->args = std::move(args);
    n->value = value;
    finish(*n);
    return n;
}

NodeRef make_constant(const Q& v) { return make_atom(NodeKind::Constant, {}, v); }

NodeRef make_geometric(const Q& base, const Affine& exponent) {
    if (sgn(base) == 0) throw BindingError("geometric base must be nonzero");
    return make_atom(NodeKind::Geometric, {exponent}, base);
}

NodeRef make_sum(std::vector<NodeRef> kids) {
    if (kids.size() == 1) return kids[0];
    auto n = new_node(NodeKind::Sum);
    n->kids = std::move(kids);
    finish(*n);
    return n;
}

NodeRef make_product(std::vector<NodeRef> kids) {
    if (kids.size() == 1) return kids[0];
    auto n = new_node(NodeKind::Product);
    n->kids = std::move(kids);
    finish(*n);
    return n;
}

NodeRef make_bounded_sum(NodeKind kind, int index, const Affine& lo, const Affine& hi, NodeRef body) {
    if (body->kind == NodeKind::Constant && body->value == 0) return body;
    auto n = new_node(kind);
    n->index = index;
    n->args = {lo, hi};
    n->kids = {std::move(body)};
    finish(*n);
    return n;
}

NodeRef make_inf_sum(int index, NodeRef body) {
    if (body->kind == NodeKind::Constant && body->value == 0) return body;
    auto n = new_node(NodeKind::InfSum);
    n->index = index;
    n->kids = {std::move(body)};
    finish(*n);
    return n;
}

NodeRef make_subst(std::map<int, Affine> repl, NodeRef body) {
    auto n = new_node(NodeKind::Subst);
    n->repl = std::move(repl);
    n->kids = {std::move(body)};
    finish(*n);
    return n;
}

// ---- parser ----

namespace {

std::optional<Q> const_value(const NodeRef& n) {
    if (n->kind == NodeKind::Constant) return n->value;
    return std::nullopt;
}

Q qpow(const Q& b, long e) {
    Q r = 1;
    Q x = e < 0 ? Q(1 / b) : b;
    unsigned long k = e < 0 ? -e : e;
    while (k) {
        if (k & 1) r *= x;
        k >>= 1;
        if (k) x *= x;
    }
    return r;
}

class Parser {
public:
    Parser(const std::string& src, std::vector<std::string> params, bool collect)
        : s_(src), collect_(collect) {
        names_ = std::move(params);
        nparams_ = static_cast<int>(names_.size());
    }

    NodeRef run() {
        NodeRef r = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected trailing input");
        return r;
    }

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::string>& found() const { return found_; }

private:
    const std::string& s_;
    std::size_t i_ = 0;
    bool collect_;
    std::vector<std::string> names_;
    int nparams_;
    std::vector<std::pair<std::string, int>> scope_;
    std::vector<std::string> found_;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, i_); }

    void skip() {
        while (i_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
                ++i_;
            } else if (s_.compare(i_, 2, "//") == 0) {
                while (i_ < s_.size() && s_[i_] != '\n') ++i_;
            } else {
                break;
            }
        }
    }
    bool peek(char c) {
        skip();
        return i_ < s_.size() && s_[i_] == c;
    }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++i_;
        return true;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    bool at_ident() {
        skip();
        return i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_');
    }
    bool at_digit() {
        skip();
        return i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]));
    }
    std::string ident() {
        if (!at_ident()) fail("expected identifier");
        std::size_t st = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        return s_.substr(st, i_ - st);
    }
    Z integer() {
        if (!at_digit()) fail("expected integer");
        std::size_t st = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        return Z(s_.substr(st, i_ - st));
    }
    long small_int() {
        Z z = integer();
        if (!z.fits_slong_p()) fail("integer too large");
        return z.get_si();
    }

    std::optional<int> lookup(const std::string& nm) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->first == nm) return it->second;
        for (int p = 0; p < nparams_; ++p)
            if (names_[p] == nm) return p;
        return std::nullopt;
    }

    int resolve_affine_ident(const std::string& nm) {
        if (auto id = lookup(nm)) return *id;
        if (collect_) {
            if (std::find(found_.begin(), found_.end(), nm) == found_.end()) found_.push_back(nm);
            return 0;
        }
        fail("unbound index '" + nm + "'");
    }

    static bool reserved(const std::string& nm) {
        static const std::set<std::string> kw{"binom", "binomnat", "binomrev", "delta", "H",   "pow",
                                              "motzkin", "sum", "dsum", "isum"};
        return kw.count(nm) > 0;
    }

    // ---- affine forms ----
    Affine affine() {
        Affine r;
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        r = aterm();
        if (neg) r = r * -1;
        while (true) {
            if (eat('+'))
                r = r + aterm();
            else if (eat('-'))
                r = r - aterm();
            else
                break;
        }
        return r;
    }
    Affine aterm() {
        Affine r = aprim();
        while (eat('*')) {
            Affine b = aprim();
            if (r.is_const())
                r = b * r.k;
            else if (b.is_const())
                r = r * b.k;
            else
                fail("nonlinear index arithmetic");
        }
        return r;
    }
    Affine aprim() {
        if (eat('-')) return aprim() * -1;
        if (eat('(')) {
            Affine a = affine();
            expect(')');
            return a;
        }
        if (at_digit()) return Affine::constant(small_int());
        std::string nm = ident();
        if (reserved(nm)) fail("'" + nm + "' is not an index");
        return Affine::var(resolve_affine_ident(nm));
    }

    // ---- expressions ----
    NodeRef negate(const NodeRef& n) {
        if (auto c = const_value(n)) return make_constant(-*c);
        return make_product({make_constant(Q(-1)), n});
    }

    NodeRef expr() {
        std::vector<NodeRef> terms;
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        NodeRef t = term();
        terms.push_back(neg ? negate(t) : t);
        while (true) {
            if (eat('+'))
                terms.push_back(term());
            else if (eat('-'))
                terms.push_back(negate(term()));
            else
                break;
        }
        bool all_const = true;
        Q sum = 0;
        for (const auto& x : terms) {
            if (auto c = const_value(x))
                sum += *c;
            else
                all_const = false;
        }
        if (all_const) return make_constant(sum);
        return make_sum(std::move(terms));
    }

    NodeRef term() {
        std::vector<NodeRef> fs{factor()};
        while (true) {
            if (eat('*')) {
                fs.push_back(factor());
            } else if (peek('/') && !(i_ + 1 < s_.size() && s_[i_ + 1] == '/')) {
                ++i_;
                std::size_t at = i_;
                NodeRef d = factor();
                auto c = const_value(d);
                if (!c) {
                    i_ = at;
                    fail("division is only allowed by constants");
                }
                if (sgn(*c) == 0) {
                    i_ = at;
                    fail("division by zero");
                }
                fs.push_back(make_constant(1 / *c));
            } else {
                break;
            }
        }
        Q c = 1;
        std::vector<NodeRef> rest;
        for (auto& f : fs) {
            if (auto v = const_value(f))
                c *= *v;
            else
                rest.push_back(f);
        }
        if (rest.empty() || sgn(c) == 0) return make_constant(c);
        if (c != 1) rest.insert(rest.begin(), make_constant(c));
        return make_product(std::move(rest));
    }

    NodeRef factor() {
        std::size_t at = i_;
        NodeRef a = atom();
        if (!eat('^')) return a;
        Affine e;
        if (eat('(')) {
            e = affine();
            expect(')');
        } else if (eat('-')) {
            e = Affine::constant(-small_int());
        } else if (at_digit()) {
            e = Affine::constant(small_int());
        } else {
            std::string nm = ident();
            e = Affine::var(resolve_affine_ident(nm));
        }
        auto c = const_value(a);
        if (c) {
            if (e.is_const()) {
                if (sgn(*c) == 0 && e.k < 0) fail("zero to a negative power");
                return make_constant(qpow(*c, e.k));
            }
            if (sgn(*c) == 0) {
                i_ = at;
                fail("geometric base must be nonzero");
            }
            return make_geometric(*c, e);
        }
        if (!e.is_const()) fail("symbolic exponent on a non-constant base");
        if (e.k < 0) fail("negative exponent on a non-constant base");
        if (e.k == 0) return make_constant(Q(1));
        return make_product(std::vector<NodeRef>(static_cast<std::size_t>(e.k), a));
    }

    NodeRef bounded(NodeKind kind) {
        expect('(');
        std::string idx = ident();
        check_fresh(idx);
        expect(',');
        Affine lo = affine();
        expect(',');
        Affine hi = affine();
        expect(',');
        int id = bind(idx);
        NodeRef body = expr();
        scope_.pop_back();
        expect(')');
        return make_bounded_sum(kind, id, lo, hi, body);
    }

    void check_fresh(const std::string& idx) {
        if (reserved(idx)) fail("'" + idx + "' cannot be an index name");
        if (lookup(idx)) throw BindingError("index '" + idx + "' shadows an index in scope");
    }

    int bind(const std::string& idx) {
        int id = static_cast<int>(names_.size());
        names_.push_back(idx);
        scope_.emplace_back(idx, id);
        return id;
    }

    std::vector<Affine> args(int k) {
        expect('(');
        std::vector<Affine> out;
        for (int j = 0; j < k; ++j) {
            if (j) expect(',');
            out.push_back(affine());
        }
        expect(')');
        return out;
    }

    NodeRef atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of input");
        if (eat('-')) return negate(factor());
        if (eat('(')) {
            NodeRef r = expr();
            expect(')');
            return r;
        }
        if (at_digit()) return make_constant(Q(integer()));
        std::size_t at = i_;
        std::string nm = ident();
        if (nm == "binom") return make_atom(NodeKind::Binom, args(2));
        if (nm == "binomnat") return make_atom(NodeKind::BinomNat, args(2));
        if (nm == "binomrev") return make_atom(NodeKind::BinomRev, args(2));
        if (nm == "delta") return make_atom(NodeKind::Delta, args(1));
        if (nm == "H") return make_atom(NodeKind::Heaviside, args(1));
        if (nm == "motzkin") return make_atom(NodeKind::Motzkin, args(1));
        if (nm == "pow") {
            expect('(');
            bool neg = eat('-');
            Q base(integer());
            if (eat('/')) {
                Z d = integer();
                if (d == 0) fail("zero denominator");
                base /= Q(d);
            }
            if (neg) base = -base;
            expect(',');
            Affine e = affine();
            expect(')');
            if (sgn(base) == 0) {
                i_ = at;
                fail("geometric base must be nonzero");
            }
            if (e.is_const()) return make_constant(qpow(base, e.k));
            return make_geometric(base, e);
        }
        if (nm == "sum") return bounded(NodeKind::StdSum);
        if (nm == "dsum") return bounded(NodeKind::DirectedSum);
        if (nm == "isum") {
            expect('(');
            std::string idx = ident();
            check_fresh(idx);
            expect(',');
            int id = bind(idx);
            NodeRef body = expr();
            scope_.pop_back();
            expect(')');
            return make_inf_sum(id, body);
        }
        if (auto id = lookup(nm)) return make_atom(NodeKind::Poly, {Affine::var(*id)});
        if (collect_) return make_constant(Q(1));
        throw BindingError("unbound identifier '" + nm + "' at " + std::to_string(at));
    }
};

// Blank out front matter lines and read the parameter declaration.
std::string front_matter(const std::string& text, std::optional<std::vector<std::string>>& params) {
    std::string out = text;
    std::size_t pos = 0;
    while (pos < out.size()) {
        std::size_t eol = out.find('\n', pos);
        if (eol == std::string::npos) eol = out.size();
        std::size_t st = out.find_first_not_of(" \t\r", pos);
        if (st != std::string::npos && st < eol && out[st] == '#') {
            std::istringstream ls(out.substr(st + 1, eol - st - 1));
            std::string key;
            ls >> key;
            if (key == "params") {
                std::vector<std::string> ps;
                std::string p;
                while (ls >> p) ps.push_back(p);
                params = ps;
            }
            for (std::size_t k = pos; k < eol; ++k) out[k] = ' ';
        }
        pos = eol + 1;
    }
    return out;
}

}  // namespace

BSExpr parse(const std::string& text, const std::vector<std::string>& params) {
    std::optional<std::vector<std::string>> declared;
    std::string body = front_matter(text, declared);
    Parser p(body, params, false);
    BSExpr e;
    e.root = p.run();
    e.names = p.names();
    e.params = static_cast<int>(params.size());
    return e;
}

BSExpr parse(const std::string& text) {
    std::optional<std::vector<std::string>> declared;
    std::string body = front_matter(text, declared);
    if (declared) return parse(body, *declared);
    Parser c(body, {}, true);
    c.run();
    return parse(body, c.found());
}

std::string to_string_node(const NodeRef& n, const std::vector<std::string>& nm);

std::string to_string_node(const NodeRef& n, const std::vector<std::string>& nm) {
    auto a = [&](std::size_t i) { return n->args[i].to_string(nm); };
    auto idx = [&](int id) { return id >= 0 && id < static_cast<int>(nm.size()) ? nm[id] : "i" + std::to_string(id); };
    switch (n->kind) {
    case NodeKind::Delta: return "delta(" + a(0) + ")";
    case NodeKind::Heaviside: return "H(" + a(0) + ")";
    case NodeKind::Geometric: return "pow(" + n->value.get_str() + "," + a(0) + ")";
    case NodeKind::Binom: return "binom(" + a(0) + "," + a(1) + ")";
    case NodeKind::BinomNat: return "binomnat(" + a(0) + "," + a(1) + ")";
    case NodeKind::BinomRev: return "binomrev(" + a(0) + "," + a(1) + ")";
    case NodeKind::Motzkin: return "motzkin(" + a(0) + ")";
    case NodeKind::Poly: return "(" + a(0) + ")";
    case NodeKind::Constant: return "(" + n->value.get_str() + ")";
    case NodeKind::Sum:
    case NodeKind::Product: {
        std::string s = "(";
        for (std::size_t i = 0; i < n->kids.size(); ++i) {
            if (i) s += n->kind == NodeKind::Sum ? "+" : "*";
            s += to_string_node(n->kids[i], nm);
        }
        return s + ")";
    }
    case NodeKind::DirectedSum:
    case NodeKind::StdSum:
        return std::string(n->kind == NodeKind::StdSum ? "sum(" : "dsum(") + idx(n->index) + "," + a(0) + "," + a(1) +
               "," + to_string_node(n->kids[0], nm) + ")";
    case NodeKind::InfSum: return "isum(" + idx(n->index) + "," + to_string_node(n->kids[0], nm) + ")";
    case NodeKind::Subst: {
        std::string s = "subst(";
        for (const auto& [id, af] : n->repl) s += idx(id) + "=" + af.to_string(nm) + ";";
        return s + to_string_node(n->kids[0], nm) + ")";
    }
    }
    return "?";
}

std::string to_string(const BSExpr& e) {
    std::string s = "#params";
    for (int i = 0; i < e.params; ++i) s += " " + e.names[i];
    return s + "\n" + to_string_node(e.root, e.names);
}

// ---- support inference ----

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

Affine normalize_constraint(const Affine& a) {
    long g = 0;
    for (const auto& [id, co] : a.c) g = std::gcd(g, co < 0 ? -co : co);
    if (g <= 1) return a;
    Affine r;
    for (const auto& [id, co] : a.c) r.c[id] = co / g;
    r.k = floor_div(a.k, g);
    return r;
}

void push_unique(std::vector<Affine>& v, const Affine& a) {
    if (a.is_const()) return;  // constant constraints carry no information here
    Affine n = normalize_constraint(a);
    if (std::find(v.begin(), v.end(), n) == v.end()) v.push_back(n);
}

std::vector<Affine> project(const std::vector<Affine>& cs, int j) {
    std::vector<Affine> out, pos, neg;
    for (const auto& c : cs) {
        long co = c.coef(j);
        if (co > 0)
            pos.push_back(c);
        else if (co < 0)
            neg.push_back(c);
        else
            push_unique(out, c);
    }
    for (const auto& p : pos)
        for (const auto& q : neg) push_unique(out, p * (-q.coef(j)) + q * p.coef(j));
    return out;
}

}  // namespace

std::vector<Affine> support_constraints(const NodeRef& n) {
    std::vector<Affine> out;
    switch (n->kind) {
    case NodeKind::Delta:
        push_unique(out, n->args[0]);
        push_unique(out, n->args[0] * -1);
        break;
    case NodeKind::Heaviside: push_unique(out, n->args[0]); break;
    case NodeKind::BinomNat:
        push_unique(out, n->args[1]);
        push_unique(out, n->args[0] - n->args[1]);
        break;
    case NodeKind::Binom: push_unique(out, n->args[1]); break;
    case NodeKind::BinomRev: push_unique(out, n->args[0] - n->args[1]); break;
    case NodeKind::Motzkin: push_unique(out, n->args[0] + Affine::constant(1)); break;
    case NodeKind::Geometric:
    case NodeKind::Poly:
    case NodeKind::Constant: break;
    case NodeKind::Product:
        for (const auto& k : n->kids)
            for (const auto& c : support_constraints(k)) push_unique(out, c);
        break;
    case NodeKind::Sum: {
        auto first = support_constraints(n->kids[0]);
        for (const auto& c : first) {
            bool all = true;
            for (std::size_t i = 1; i < n->kids.size() && all; ++i) {
                auto other = support_constraints(n->kids[i]);
                all = std::find(other.begin(), other.end(), c) != other.end();
            }
            if (all) push_unique(out, c);
        }
        break;
    }
    case NodeKind::DirectedSum:
        for (const auto& c : support_constraints(n->kids[0]))
            if (c.coef(n->index) == 0) push_unique(out, c);
        break;
    case NodeKind::StdSum: {
        auto cs = support_constraints(n->kids[0]);
        cs.push_back(Affine::var(n->index) - n->args[0]);
        cs.push_back(n->args[1] - Affine::var(n->index));
        out = project(cs, n->index);
        push_unique(out, n->args[1] - n->args[0]);
        break;
    }
    case NodeKind::InfSum: {
        auto cs = support_constraints(n->kids[0]);
        cs.push_back(Affine::var(n->index));
        out = project(cs, n->index);
        break;
    }
    case NodeKind::Subst:
        for (const auto& c : support_constraints(n->kids[0])) push_unique(out, c.subst(n->repl));
        break;
    }
    return out;
}

namespace {

const Node* find_inf_sum(const NodeRef& n, int index) {
    if (n->kind == NodeKind::InfSum && n->index == index) return n.get();
    for (const auto& k : n->kids)
        if (const Node* r = find_inf_sum(k, index)) return r;
    return nullptr;
}

SupportBound bound_of(const Node& s) {
    auto cs = support_constraints(s.kids[0]);
    cs.push_back(Affine::var(s.index));
    SupportBound b;
    for (const auto& c : cs) {
        long co = c.coef(s.index);
        if (co == 0) continue;
        Affine rest = c - Affine::var(s.index, co);
        if (co > 0)
            b.lower.emplace_back(co, rest * -1);  // j >= -rest/co
        else
            b.upper.emplace_back(-co, rest);  // j <= rest/|co|
    }
    return b;
}

}  // namespace

SupportBound infer_support(const BSExpr& e, int index) {
    const Node* s = find_inf_sum(e.root, index);
    if (!s) throw BindingError("index is not bound by an infinite sum");
    return bound_of(*s);
}

// ---- evaluation ----

Z Evaluator::binom(long n, long k) {
    if (k < 0) return Z(0);
    auto key = std::make_pair(n, k);
    auto it = binom_.find(key);
    if (it != binom_.end()) return it->second;
    Z r = binomial(Z(n), k);
    binom_.emplace(key, r);
    return r;
}

Z Evaluator::motzkin(long n) {
    if (n == -1) return Z(1);
    if (n < -1) return Z(0);
    auto it = motzkin_.find(n);
    if (it != motzkin_.end()) return it->second;
    // (n+2) M_n = (2n+1) M_{n-1} + 3(n-1) M_{n-2}
    long start = 0;
    while (start < n && motzkin_.count(start)) ++start;
    for (long m = start; m <= n; ++m) {
        if (motzkin_.count(m)) continue;
        Z v;
        if (m <= 1)
            v = 1;
        else
            v = ((2 * m + 1) * motzkin_.at(m - 1) + 3 * (m - 1) * motzkin_.at(m - 2)) / (m + 2);
        motzkin_.emplace(m, v);
    }
    return motzkin_.at(n);
}

Q Evaluator::eval(const std::vector<long>& n) {
    if (static_cast<int>(n.size()) != e_.params) throw EvalError("wrong number of parameter values");
    std::vector<long> env(std::max(1, e_.index_count()), 0);
    std::copy(n.begin(), n.end(), env.begin());
    return go(e_.root, env);
}

Q Evaluator::go(const NodeRef& n, std::vector<long>& env) {
    auto a = [&](std::size_t i) { return n->args[i].eval(env); };
    switch (n->kind) {
    case NodeKind::Delta: return Q(a(0) == 0 ? 1 : 0);
    case NodeKind::Heaviside: return Q(a(0) >= 0 ? 1 : 0);
    case NodeKind::Geometric: return qpow(n->value, a(0));
    case NodeKind::Binom: return Q(binom(a(0), a(1)));
    case NodeKind::BinomNat: {
        long nn = a(0), kk = a(1);
        return Q(nn >= 0 && kk >= 0 && kk <= nn ? binom(nn, kk) : Z(0));
    }
    case NodeKind::BinomRev: {
        long nn = a(0), kk = a(1);
        return Q(binom(nn, nn - kk));
    }
    case NodeKind::Motzkin: return Q(motzkin(a(0)));
    case NodeKind::Poly: return Q(a(0));
    case NodeKind::Constant: return n->value;
    case NodeKind::Product: {
        Q r = 1;
        for (const auto& k : n->kids) {
            r *= go(k, env);
            if (sgn(r) == 0) break;
        }
        return r;
    }
    case NodeKind::Sum: {
        Q r = 0;
        for (const auto& k : n->kids) r += go(k, env);
        return r;
    }
    default: break;
    }

    std::vector<long> key;
    key.reserve(n->free.size());
    for (int id : n->free) key.push_back(env[id]);
    auto mk = std::make_pair(n->id, key);
    auto it = memo_.find(mk);
    if (it != memo_.end()) return it->second;

    Q r = 0;
    auto run = [&](long lo, long hi) {
        Q acc = 0;
        long saved = env[n->index];
        for (long j = lo; j <= hi; ++j) {
            env[n->index] = j;
            acc += go(n->kids[0], env);
        }
        env[n->index] = saved;
        return acc;
    };
    switch (n->kind) {
    case NodeKind::DirectedSum: {
        long lo = a(0), hi = a(1);
        if (lo <= hi)
            r = run(lo, hi);
        else if (lo > hi + 1)
            r = -run(hi + 1, lo - 1);
        break;
    }
    case NodeKind::StdSum: {
        long lo = a(0), hi = a(1);
        if (lo <= hi) r = run(lo, hi);
        break;
    }
    case NodeKind::InfSum: {
        auto bit = bounds_.find(n->id);
        if (bit == bounds_.end()) bit = bounds_.emplace(n->id, bound_of(*n)).first;
        const SupportBound& b = bit->second;
        if (b.upper.empty()) throw EvalError("unbounded infinite sum");
        long lo = 0, hi = 0;
        bool first = true;
        for (const auto& [d, af] : b.lower) {
            long v = ceil_div(af.eval(env), d);
            lo = first ? v : std::max(lo, v);
            first = false;
        }
        lo = std::max(lo, 0L);
        first = true;
        for (const auto& [d, af] : b.upper) {
            long v = floor_div(af.eval(env), d);
            hi = first ? v : std::min(hi, v);
            first = false;
        }
        if (lo <= hi) r = run(lo, hi);
        break;
    }
    case NodeKind::Subst: {
        std::vector<long> env2 = env;
        for (const auto& [id, af] : n->repl) env2[id] = af.eval(env);
        r = go(n->kids[0], env2);
        break;
    }
    default: throw EvalError("unknown node kind");
    }
    memo_.emplace(std::move(mk), r);
    return r;
}

Q eval_oracle(const BSExpr& e, const std::vector<long>& n) {
    Evaluator ev(e);
    return ev.eval(n);
}

}  // namespace bs
