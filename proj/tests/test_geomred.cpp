#include "doctest.h"

#include <random>

#include "bs/geomred.hpp"
#include "bs/reprgen.hpp"
#include "random_ast.hpp"

using namespace bs;

namespace {

RatFun rf(const std::string& num, const std::string& den, const std::vector<std::string>& names) {
    return RatFun::quotient(parse_poly(num, names), parse_poly(den, names));
}

// num over a product of separately stored factors
RatFun rfp(const std::string& num, const std::vector<std::string>& dens, const std::vector<std::string>& names) {
    RatFun r = RatFun::from_poly(parse_poly(num, names));
    for (const auto& d : dens) r = r / RatFun::from_poly(parse_poly(d, names));
    return r;
}

ResidueRep rep(const RatFun& f, std::vector<std::string> names, int params) {
    ResidueRep r;
    r.fun = f;
    r.ord.names = std::move(names);
    r.ord.param_count = params;
    return r;
}

// Newton polygon after the weight map z_i -> s^{M^{d-1-i}}; smaller variables get larger weights.
Largeness tropical_oracle(const std::vector<ExpVec>& S, int k) {
    int d = S[0].size();
    const long M = 1000;
    std::vector<long> w(d);
    for (int i = 0; i < d; ++i) {
        w[i] = 1;
        for (int j = 0; j < d - 1 - i; ++j) w[i] *= M;
    }
    std::map<int, long> val;
    for (const auto& m : S) {
        long x = 0;
        for (int i = 0; i < d; ++i)
            if (i != k) x += m[i] * w[i];
        auto it = val.find(m[k]);
        if (it == val.end() || x < it->second) val[m[k]] = x;
    }
    std::vector<std::pair<int, long>> pts(val.begin(), val.end());
    // lower convex hull
    std::vector<std::pair<int, long>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            auto [x1, y1] = hull[hull.size() - 2];
            auto [x2, y2] = hull.back();
            // drop middle point when it lies on or above the chord
            if (Q(y2 - y1) * Q(p.first - x1) >= Q(p.second - y1) * Q(x2 - x1)) hull.pop_back();
            else break;
        }
        hull.push_back(p);
    }
    Largeness r;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        Q nu = -Q(hull[i + 1].second - hull[i].second) / Q(hull[i + 1].first - hull[i].first);
        if (nu > Q(w[k])) r.in = true;
        else r.out = true;
    }
    return r;
}

std::vector<Q> coeffs(const ResidueRep& r, int N) {
    std::vector<Q> out;
    CoeffExtractor ex;
    for (int n = 0; n < N; ++n) out.push_back(formal_residue_coeff(r, {n}, &ex));
    return out;
}

}  // namespace

TEST_SUITE("geomred") {

TEST_CASE("all large or all small on worked examples") {
    std::vector<std::string> tz{"t", "z"};
    for (int d = 2; d <= 5; ++d) {
        std::string g = "1";
        for (int j = 0; j < d; ++j) g += "+" + binomial(Z(d), j + 1).get_str() + "*t*z^" + std::to_string(j);
        Largeness l = all_large_or_all_small(parse_poly(g, tz), 1);
        CHECK(l.out);
        CHECK_FALSE(l.in);
    }
    Largeness m = all_large_or_all_small(parse_poly("y^2+y-x", {"x", "y"}), 1);
    CHECK(m.in);
    CHECK(m.out);
    Largeness o = all_large_or_all_small(parse_poly("z2-t*(1+z1)", {"t", "z1", "z2"}), 1);
    CHECK(o.out);
    CHECK_FALSE(o.in);
    Largeness e = all_large_or_all_small(parse_poly("x+x*y^0", {"x", "y"}), 1);
    CHECK_FALSE(e.in);
    CHECK_FALSE(e.out);
}

TEST_CASE("all large or all small agrees with a tropical oracle") {
    std::mt19937 rng(99);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    int nontrivial = 0;
    for (int it = 0; it < 600; ++it) {
        int d = pick(2, 3);
        int terms = pick(2, 6);
        std::vector<ExpVec> S;
        for (int i = 0; i < terms; ++i) {
            ExpVec m(d);
            for (int j = 0; j < d; ++j) m[j] = static_cast<int16_t>(pick(0, 3));
            if (std::find(S.begin(), S.end(), m) == S.end()) S.push_back(m);
        }
        int k = pick(0, d - 1);
        Largeness a = all_large_or_all_small(S, k), b = tropical_oracle(S, k);
        CAPTURE(it);
        CHECK(a.in == b.in);
        CHECK(a.out == b.out);
        if (a.in || a.out) ++nontrivial;
    }
    CHECK(nontrivial > 300);
}

TEST_CASE("partial fractions") {
    std::vector<std::string> v1{"v"};
    RatFun F = rfp("1", {"v-1", "v-2"}, v1);
    PFDecomp pf = partial_fractions(F, 0);
    CHECK(pf.parts.size() == 2);
    CHECK(pf.recombine().equals(F));
    for (const auto& p : pf.parts) {
        RatFun term = p.a.to_ratfun(1, 0) * RatFun::power_of(p.f, -p.n);
        bool minus = term.equals(rf("-1", "v-1", v1)), plus = term.equals(rf("1", "v-2", v1));
        CHECK((minus || plus));
    }
    std::vector<std::string> xy{"x", "y"};
    RatFun G = rfp("1", {"x", "y", "y^2+y-x"}, xy);
    PFDecomp pg = partial_fractions(G, 1);
    REQUIRE(pg.parts.size() == 2);
    CHECK(pg.poly_part.is_zero());
    RatFun expect0 = rf("-1", "x^2*y", xy), expect1 = rf("y+1", "x^2*(y^2+y-x)", xy);
    for (const auto& p : pg.parts) {
        RatFun term = p.a.to_ratfun(2, 1) * RatFun::power_of(p.f, -p.n);
        CHECK((term.equals(expect0) || term.equals(expect1)));
    }
    RatFun P = RatFun::from_poly(parse_poly("x*y^3+2", xy));
    PFDecomp pp = partial_fractions(P, 1);
    CHECK(pp.parts.empty());
    CHECK(pp.recombine().equals(P));
    RatFun H = rfp("y^5+x", {"y", "y", "1-y", "1-y", "1-y", "y-x", "y-x", "1+x"}, xy);
    CHECK(partial_fractions(H, 1).recombine().equals(H));
}

TEST_CASE("classical residues") {
    std::vector<std::string> av{"a", "v"};
    CHECK(sum_of_all_residues(rf("1", "v-a", av), 1).equals(RatFun::constant(2, 1)));
    CHECK(sum_of_all_residues(rf("1", "v^2-a", av), 1).is_zero());
    CHECK(sum_of_all_residues(rf("v", "v^2-a", av), 1).equals(RatFun::constant(2, 1)));
    CHECK(residue_at_rational_pole(rf("a+1", "v-a", av), 1, parse_poly("v-a", av), 1).equals(rf("a+1", "1", av)));
    CHECK(residue_at_rational_pole(rf("1", "v^2", av), 1, parse_poly("v", av), 2).is_zero());
    CHECK(residue_at_rational_pole(rf("1+v", "v^2", av), 1, parse_poly("v", av), 2).equals(RatFun::constant(2, 1)));
    // residues of every pole telescope to the finite residue sum
    RatFun F = rfp("v^3+a", {"v-a", "v-a", "2*v-1", "v+a+1"}, av);
    RatFun s = residue_at_rational_pole(F, 1, parse_poly("v-a", av), 2) +
               residue_at_rational_pole(F, 1, parse_poly("2*v-1", av), 1) +
               residue_at_rational_pole(F, 1, parse_poly("v+a+1", av), 1);
    CHECK(s.equals(sum_of_all_residues(F, 1)));
}

TEST_CASE("geometric reduction of the worked example") {
    std::vector<std::string> names{"t", "z1", "z2"};
    for (int d = 2; d <= 4; ++d) {
        std::string D = std::to_string(d);
        RatFun F = rfp("z2", {"z2-t*(1+z1)", "z1*z2+t*(1+z1)*(1+z2)^" + D}, names);
        StepTrace tr;
        auto s1 = geom_red_step(rep(F, names, 1), 1, &tr);
        REQUIRE(s1.has_value());
        CHECK(tr.rule == "simple-poles");
        CHECK(s1->ord.names == std::vector<std::string>{"t", "z2"});
        CHECK(s1->fun.equals(rf("1", "t*(1+z2)^" + D + "+z2-t", {"t", "z2"})));
        auto s2 = geom_red_step(*s1, 1, &tr);
        REQUIRE(s2.has_value());
        CHECK(s2->fun.equals(rf("1", "1+" + D + "*t", {"t"})));
        CHECK(s2->residue_count() == 0);
    }
}

TEST_CASE("mixed smallness fails") {
    ResidueRep r = rep(rfp("1", {"x", "y", "y^2+y-x"}, {"x", "y"}), {"x", "y"}, 1);
    StepTrace tr;
    CHECK_FALSE(geom_red_step(r, 1, &tr).has_value());
    CHECK(tr.rule == "fail");
}

TEST_CASE("reduction of a sum to a closed form") {
    // sum_k (-1)^k C(n,k) C(d k, n) = (-d)^n
    for (int d = 2; d <= 3; ++d) {
        BSExpr e = parse("sum(k, 0, n, (-1)^k * binom(n, k) * binom(" + std::to_string(d) + "*k, n))");
        ResidueRep r = reduce_fixpoint(residue_rep(e));
        CHECK(r.residue_count() == 0);
        CHECK(r.fun.equals(rf("1", "1+" + std::to_string(d) + "*t", {"t"})));
    }
}

TEST_CASE("dixon reduces to two variables") {
    BSExpr e = parse("sum(k,0,2*n, (-1)^k * binom(2*n,k)^3)");
    ResidueRep raw = residue_rep(e);
    std::vector<StepTrace> trace;
    ResidueRep r = reduce_fixpoint(raw, &trace);
    CHECK(r.residue_count() == 2);
    CHECK(trace.size() == 2);
    CHECK(coeffs(r, 6) == coeffs(raw, 6));
}

TEST_CASE("andrews-paule left side keeps two variables") {
    BSExpr e = parse("isum(i, isum(j, binomnat(4*n-2*i-2*j, 2*n-2*i) * binomnat(i+j,j)^2))");
    ResidueRep raw = residue_rep(e);
    CHECK(raw.residue_count() == 6);
    std::vector<StepTrace> trace;
    ResidueRep r = reduce_fixpoint(raw, &trace);
    CHECK(r.residue_count() == 2);
    REQUIRE(trace.size() == 4);
    CHECK(trace[0].var == "z1");
    std::vector<Q> c = coeffs(r, 10);
    for (int n = 0; n < 10; ++n) {
        Z b = binomial(Z(2 * n), n);
        CHECK(c[n] == Q(Z(2 * n + 1) * b * b));
    }
}

TEST_CASE("dent sum is rational") {
    BSExpr e = parse("#params n1 n2\nsum(k, 0, n1+2*n2, sum(j, 0, k, (-1)^j * binom(k,j) * binom(2*n2+n1-k, 2*n2-j) * binom(n1, k-j)))");
    ResidueRep r = reduce_terms(ct_to_residue_terms(sum_to_ct(e)));
    CHECK(r.residue_count() == 0);
    CHECK(r.fun.equals(rf("1", "1-2*t1-t2", {"t1", "t2"})));
}

TEST_CASE("reduction is sound on random sums") {
    RandomAst gen(7);
    gen.max_depth = 2;
    gen.allow_inf = true;
    ReduceBudget budget;
    budget.step_seconds = 2;
    int steps = 0;
    for (int it = 0; it < 25; ++it) {
        std::string src = gen.program({"n"});
        CAPTURE(src);
        ResidueRep raw;
        try {
            raw = residue_rep(parse(src));
        } catch (const DivergentSum&) {
            continue;
        }
        std::vector<Q> want = coeffs(raw, 8);
        std::vector<StepTrace> trace;
        ResidueRep red = reduce_fixpoint(raw, &trace, budget);
        steps += static_cast<int>(trace.size());
        CHECK(coeffs(red, 8) == want);
        ResidueRep termwise = reduce_terms(ct_to_residue_terms(sum_to_ct(parse(src))), nullptr, budget);
        CHECK(coeffs(termwise, 8) == want);
    }
    CHECK(steps > 10);
}

TEST_CASE("elimination order does not matter") {
    RandomAst gen(31);
    gen.max_depth = 2;
    ReduceBudget budget;
    budget.step_seconds = 1;
    int compared = 0;
    for (int it = 0; it < 30; ++it) {
        std::string src = gen.program({"n"});
        ResidueRep raw;
        try {
            raw = residue_rep(parse(src));
        } catch (const DivergentSum&) {
            continue;
        }
        int p = raw.params(), r = raw.residue_count();
        for (int a = p; a < p + r; ++a)
            for (int b = a + 1; b < p + r; ++b) {
                auto ra = geom_red_step(raw, a, nullptr, budget), rb = geom_red_step(raw, b, nullptr, budget);
                if (!ra || !rb) continue;
                auto rab = geom_red_step(*ra, b - 1, nullptr, budget), rba = geom_red_step(*rb, a, nullptr, budget);
                if (!rab || !rba) continue;
                CAPTURE(src);
                CHECK(rab->fun.equals(rba->fun));
                ++compared;
            }
    }
    CHECK(compared > 5);
}

TEST_CASE("simple-pole route matches the partial fraction route") {
    std::vector<std::string> names{"t", "z1", "z2"};
    RatFun F = rfp("z2", {"z2-t*(1+z1)", "z1*z2+t*(1+z1)*(1+z2)^3"}, names);
    auto viaStep = geom_red_step(rep(F, names, 1), 1);
    REQUIRE(viaStep.has_value());
    PFDecomp pf = partial_fractions(F, 1);
    RatFun small = RatFun::constant(3, 0);
    for (const auto& p : pf.parts) {
        MPoly c1 = p.f.coeff_of(1, 1), c0 = p.f.coeff_of(1, 0);
        ExpVec e = c0.lead().m - c1.lead().m - ExpVec::unit(3, 1);
        if (monomial_below_one(e)) small += sum_of_all_residues(p.a.to_ratfun(3, 1) * RatFun::power_of(p.f, -p.n), 1);
    }
    CHECK(small.rename({0, -1, 1}, 2).equals(viaStep->fun));
}

}
