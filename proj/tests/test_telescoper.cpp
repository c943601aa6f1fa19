#include "doctest.h"

#include <random>

#include "bs/geomred.hpp"
#include "bs/reprgen.hpp"
#include "bs/telescoper.hpp"

using namespace bs;

namespace {

const std::vector<std::string> T{"t"};

DiffOp op(const std::string& s) { return parse_diffop(s, T); }

RecOp rec(const std::vector<std::string>& qs) {
    RecOp r;
    for (const auto& s : qs) r.q.push_back(parse_poly(s, {"n"}));
    return r.normalize();
}

std::vector<Q> oracle_prefix(const BSExpr& e, int N) {
    std::vector<Q> out;
    for (long n = 0; n < N; ++n) out.push_back(eval_oracle(e, {n}));
    return out;
}

TelescoperProblem problem(const std::string& src, bool with_prefix) {
    BSExpr e = parse(src);
    TelescoperProblem p;
    p.rep = reduce_terms(ct_to_residue_terms(sum_to_ct(e)));
    p.bounds.timeout_seconds = 60;
    if (with_prefix) p.known_prefix = oracle_prefix(e, 40);
    return p;
}

ResidueRep rep_of(const RatFun& f, std::vector<std::string> names) {
    ResidueRep r;
    r.fun = f;
    r.ord.names = std::move(names);
    r.ord.param_count = 1;
    return r;
}

// inits at the first `order` indices and wherever the leading coefficient vanishes
std::map<long, Q> inits_for(const RecOp& r, const std::vector<Q>& u) {
    std::map<long, Q> in;
    int s = r.order();
    for (long k = 0; k < static_cast<long>(u.size()); ++k)
        if (k < s || eval_univariate(r.q[s], Q(k - s)) == 0) in[k] = u[k];
    return in;
}

const char* kDixonSum = "sum(k,0,2*n,(-1)^k*binom(2*n,k)^3)";
const char* kDixon = "t*(27*t+1)*D^2+(54*t+1)*D+6";
const char* kAPRight = "t*(16*t-1)*D^2+(48*t-1)*D+12";

}  // namespace

TEST_SUITE("telescoper") {

TEST_CASE("annihilators of rational functions") {
    RatFun y = RatFun::quotient(parse_poly("1", T), parse_poly("1+5*t", T));
    CHECK(annihilator_of_rational(y, 0) == op("(1+5*t)*D+5"));

    bool zero = false;
    CHECK(annihilator_of_rational(RatFun::constant(1, Q(7)), 0, &zero) == op("D"));
    CHECK_FALSE(zero);
    annihilator_of_rational(RatFun::constant(1, Q(0)), 0, &zero);
    CHECK(zero);

    std::vector<std::string> two{"t1", "t2"};
    RatFun dent = RatFun::quotient(parse_poly("1", two), parse_poly("1-2*t1-t2", two));
    DiffOp L = annihilator_of_rational(dent, 0);
    CHECK(L == parse_diffop("(1-2*t1-t2)*D-2", two, 0));
}

TEST_CASE("delannoy from the residue series") {
    TelescoperProblem p = problem("sum(k,0,n,binom(n,k)*binom(n+k,k))", false);
    PicardFuchs pf = picard_fuchs(p);
    CHECK(pf.op == op("(1-6*t+t^2)*D+t-3"));
    CHECK(pf.record.identity_checked);
    CHECK(verify_telescoper(pf.op, p, pf.record.cert));
}

TEST_CASE("dixon operator matches the known one") {
    TelescoperProblem p = problem(kDixonSum, true);
    REQUIRE(p.rep.residue_count() == 2);
    PicardFuchs pf = picard_fuchs(p);
    DiffOp known = op(kDixon);
    CHECK(right_divides(known, pf.op));
    CHECK(right_gcd(pf.op, known).order() == 2);
    CHECK(pf.record.identity_checked);
    CHECK(pf.record.primes >= 2);
    CHECK(verify_telescoper(pf.op, p, pf.record.cert));
}

TEST_CASE("central binomial square weighted by 2n+1") {
    TelescoperProblem p = problem("(2*n+1)*binomnat(2*n,n)^2", true);
    PicardFuchs pf = picard_fuchs(p);
    DiffOp known = op(kAPRight);
    CHECK(pf.op == known.normalize());
    CHECK(verify_telescoper(pf.op, p, pf.record.cert));
}

TEST_CASE("broken certificates are rejected") {
    TelescoperProblem p = problem(kDixonSum, true);
    PicardFuchs pf = picard_fuchs(p);
    Certificate bad = pf.record.cert;
    REQUIRE(!bad.b.empty());
    bad.b[0] += MPoly::monomial(ExpVec::unit(bad.F.nvars(), 1, 1), Q(1));
    CHECK_FALSE(telescoping_identity_holds(pf.op, p.rep, bad));
    CHECK_FALSE(verify_telescoper(pf.op, p, bad));

    std::vector<std::string> tz{"t", "z"};
    RatFun R = RatFun::quotient(parse_poly("1", tz), parse_poly("(1-t*z)*z", tz));
    Certificate none;
    none.F = parse_poly("(1-t*z)*z", tz);
    none.kappa = 1;
    none.b = {MPoly(2)};
    CHECK_FALSE(telescoping_identity_holds(DiffOp::dx(1, 0), rep_of(R, tz), none));
}

TEST_CASE("rational input needs no search") {
    TelescoperProblem p;
    p.rep = rep_of(RatFun::quotient(parse_poly("1", T), parse_poly("1-3*t", T)), T);
    PicardFuchs pf = picard_fuchs(p);
    CHECK(pf.op == op("(1-3*t)*D-3"));
}

TEST_CASE("exhausted budget reports it") {
    TelescoperProblem p = problem(kDixonSum, true);
    p.bounds.max_order = 1;
    p.bounds.max_degree = 2;
    CHECK_THROWS_WITH_AS(picard_fuchs(p), "telescoper not found within budget", BudgetExceeded);
}

TEST_CASE("guessed recurrences") {
    std::vector<Q> dix = oracle_prefix(parse(kDixonSum), 30);
    auto r = guess_recurrence(dix, 3, 3);
    REQUIRE(r);
    CHECK(*r == rec({"3*(3*n+1)*(3*n+2)", "(n+1)^2"}));

    std::vector<Q> geo;
    for (int n = 0; n < 20; ++n) geo.push_back(Q(Z(1) << n));
    auto g = guess_recurrence(geo, 2, 2);
    REQUIRE(g);
    CHECK(*g == rec({"-2", "1"}));

    std::vector<Q> del = oracle_prefix(parse("sum(k,0,n,binom(n,k)*binom(n+k,k))"), 50);
    auto d = guess_recurrence(std::vector<Q>(del.begin(), del.begin() + 30), 3, 3);
    REQUIRE(d);
    CHECK(unroll(*d, inits_for(*d, del), 50) == del);
    CHECK(apply_op(*guess_ode(del, 2, 3), del, 40) == std::vector<Q>(40, Q(0)));

    std::vector<Q> junk{1, 0, 0, 7, 2, 1, 9};
    CHECK_FALSE(guess_recurrence(junk, 2, 2));
}

TEST_CASE("guess then unroll reproduces random hypergeometric prefixes") {
    std::mt19937 rng(11);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int trial = 0; trial < 20; ++trial) {
        // u_{n+1} = (a n + b) / (c n + d) u_n with c, d > 0
        int a = pick(-3, 3), b = pick(1, 4), c = pick(1, 3), d = pick(1, 3);
        std::vector<Q> u{Q(pick(1, 5))};
        for (int n = 0; n + 1 < 45; ++n) u.push_back(u.back() * Q(a * n + b) / Q(c * n + d));
        auto r = guess_recurrence(std::vector<Q>(u.begin(), u.begin() + 30), 2, 2);
        REQUIRE(r);
        CHECK(unroll(*r, inits_for(*r, u), 45) == u);
    }
}

}  // TEST_SUITE
