// Acceptance run: one line per criterion, tolerances fixed below.
// Exit status counts failures that are not listed as known deviations.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "bs/corpus.hpp"
#include "bs/pipeline.hpp"
#include "bs/reprgen.hpp"
#include "bs/residue.hpp"

using namespace bs;

namespace {

constexpr double kDixonSeconds = 60;
constexpr double kAlternatingSeconds = 5;  // per d
constexpr double kDentSeconds = 10;
constexpr double kMoriartySeconds = 30;
constexpr double kApReduceSeconds = 60;
constexpr double kApRhsSeconds = 120;
constexpr double kPropertySeconds = 600;
constexpr int kApSeriesTerms = 40;
constexpr int kApGuessTerms = 80;
constexpr int kStrehlTerms = 50;
constexpr int kSoundnessTerms = 8;

const std::vector<std::string> T{"t"};

int unexpected = 0, known = 0, passed = 0;

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string secs(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

// known: reason a failure is expected, empty if it is not
void report(const std::string& id, const std::string& what, bool ok, const std::string& detail = "",
            const std::string& known_reason = "") {
    std::string tag = ok ? "PASS" : known_reason.empty() ? "FAIL" : "FAIL (known)";
    std::cout << tag << "  " << id << "  " << what;
    if (!detail.empty()) std::cout << "  [" << detail << "]";
    if (!ok && !known_reason.empty()) std::cout << "  -- " << known_reason;
    std::cout << std::endl;
    if (ok) ++passed;
    else if (known_reason.empty()) ++unexpected;
    else ++known;
}

void info(const std::string& id, const std::string& what) { std::cout << "INFO  " << id << "  " << what << std::endl; }

// Runs f, turning exceptions into a failed line.
void guarded(const std::string& id, const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, "raised an exception", false, e.what());
    }
}

std::vector<Q> oracle(const BSExpr& e, int N) {
    Evaluator ev(e);
    std::vector<Q> out;
    for (long n = 0; n < N; ++n) out.push_back(ev.eval({n}));
    return out;
}

RatFun rat(const std::string& num, const std::string& den, const std::vector<std::string>& names) {
    return RatFun::quotient(parse_poly(num, names), parse_poly(den, names));
}

bool annihilates_prefix(const DiffOp& op, const std::vector<Q>& pre) {
    for (const auto& v : apply_op(op, pre, static_cast<int>(pre.size()) - op.order()))
        if (v != 0) return false;
    return true;
}

const char* kDixonLhs = "sum(k, 0, 2*n, (-1)^k * binom(2*n,k)^3)";
const char* kDixonRhs = "(-1)^n * binom(3*n,n) * binom(2*n,n)";
const char* kDent =
    "#params n1 n2\n"
    "sum(k, 0, n1+2*n2, sum(j, 0, k, (-1)^j * binom(k,j) * binom(2*n2+n1-k, 2*n2-j) * binom(n1, k-j)))";
const char* kDentRhs = "pow(2,n1) * binom(n1+n2,n1)";
const char* kMoriartyLhs =
    "#params n m\n"
    "sum(k, m, n, pow(-4,k) * binom(k,m) * (binom(n+k-1,2*k) + 1/2*binom(n+k-1,2*k-1)))";
const char* kMoriartyRhs = "pow(-1,n) * pow(4,m) * (binom(n+m-1,2*m) + 1/2*binom(n+m-1,2*m-1))";
const char* kApLhs = "isum(i, isum(j, binomnat(4*n-2*i-2*j, 2*n-2*i) * binomnat(i+j,j)^2))";
const char* kApRhs = "(2*n+1) * binomnat(2*n,n)^2";
const char* kApOrder6 =
    "16*t^4*(256*t^2+736*t+81)*(16*t-1)^2*D^6+16*t^3*(16*t-1)*(86016*t^3+256256*t^2+20976*t-1053)*D^5"
    "+4*t^2*(36601856*t^4+113760256*t^3+6103168*t^2-908088*t+14823)*D^4"
    "+16*t*(22691840*t^4+75716608*t^3+6677824*t^2-459552*t+3645)*D^3"
    "+(305827840*t^4+1109626112*t^3+139138736*t^2-4247073*t+9720)*D^2"
    "+(60272640*t^3+244005120*t^2+42117840*t-374625)*D+691200*t^2+3369600*t+996300";
const char* kStrehlLhs = "sum(k, 0, n, binom(n,k)^2 * binom(n+k,k)^2)";
const char* kStrehlRhs = "sum(k, 0, n, binom(n,k) * binom(n+k,k) * sum(j, 0, k, binom(k,j)^3))";
const char* kStrehlOp = "t^2*(t^2-34*t+1)*D^3+3*t*(2*t^2-51*t+1)*D^2+(7*t^2-112*t+1)*D+t-5";

void dixon() {
    guarded("1", [] {
        auto t0 = std::chrono::steady_clock::now();
        ProofResult r = prove_equal(parse(kDixonLhs), parse(kDixonRhs));
        double s = since(t0);
        report("1a", "dixon: prove returns PROVED", r.status == ProofStatus::Proved, to_string(r.status));
        DiffOp want = parse_diffop("t*(27*t+1)*D^2+(54*t+1)*D+6", T);
        want.normalize();
        DiffOp g = right_gcd(r.lhs.series.op, want);
        g.normalize();
        report("1b", "dixon: rgcd(computed, t(27t+1)D^2+(54t+1)D+6) is that operator", g == want,
               "computed " + r.lhs.series.op.to_string(T));
        RecOp rec = ode_to_rec(r.lhs.series.op).normalize();
        RecOp target;
        target.q = {parse_poly("3*(3*n+2)*(3*n+1)", {"n"}), parse_poly("(n+1)^2", {"n"})};
        target.normalize();
        report("1c", "dixon: recurrence is 3(3n+2)(3n+1)u(n)+(n+1)^2u(n+1) up to content", rec == target,
               rec.to_string());
        report("1d", "dixon: runtime <= " + secs(kDixonSeconds), s <= kDixonSeconds, secs(s));
    });
}

void alternating() {
    for (int d = 2; d <= 6; ++d) {
        std::string id = "2." + std::to_string(d), D = std::to_string(d);
        guarded(id, [&] {
            auto t0 = std::chrono::steady_clock::now();
            BSExpr lhs = parse("sum(k, 0, n, (-1)^k * binom(n,k) * binom(" + D + "*k, n))");
            ResidueRep red = reduced_rep(lhs);
            bool rational = red.residue_count() == 0 && red.fun.equals(rat("1", "1+" + D + "*t", red.ord.names));
            ProofResult r = prove_equal(lhs, parse("pow(" + std::to_string(-d) + ",n)"));
            double s = since(t0);
            int calls = r.lhs.telescoper_calls + r.rhs.telescoper_calls;
            bool ok = rational && r.status == ProofStatus::Proved && calls == 0 && s <= kAlternatingSeconds;
            report(id, "alternating sum d=" + D + ": reduces to 1/(1+" + D + "t), PROVED, no telescoper, <= " +
                           secs(kAlternatingSeconds),
                   ok, red.fun_string() + ", " + to_string(r.status) + ", calls " + std::to_string(calls) + ", " + secs(s));
        });
    }
}

void dent() {
    guarded("3", [] {
        auto t0 = std::chrono::steady_clock::now();
        BSExpr lhs = parse(kDent), rhs = parse(kDentRhs, lhs.param_names());
        bool both = true;
        std::string forms;
        for (const BSExpr* e : {&lhs, &rhs}) {
            ResidueRep r = reduced_rep(*e);
            both = both && r.residue_count() == 0 && r.fun.equals(rat("1", "1-2*t1-t2", r.ord.names));
            forms += (forms.empty() ? "" : " | ") + r.fun_string();
        }
        ProofResult p = prove_equal(lhs, rhs);
        double s = since(t0);
        report("3a", "dent: both sides reduce to 1/(1-2t1-t2)", both, forms);
        report("3b", "dent: PROVED on the rational path, <= " + secs(kDentSeconds),
               p.status == ProofStatus::Proved && p.lhs.rational && p.rhs.rational && s <= kDentSeconds,
               to_string(p.status) + ", " + secs(s));
    });
}

void moriarty() {
    guarded("4", [] {
        auto t0 = std::chrono::steady_clock::now();
        BSExpr lhs = parse(kMoriartyLhs), rhs = parse(kMoriartyRhs, lhs.param_names());
        ResidueRep rl = reduced_rep(lhs), rr = reduced_rep(rhs);
        ProofResult p = prove_equal(lhs, rhs);
        double s = since(t0);
        const auto& names = rl.ord.names;
        RatFun printed = rat("1-t1^2", "2*(t1^2+4*t1*t2+2*t1+1)", names);
        bool rational = rl.residue_count() == 0 && rr.residue_count() == 0;
        report("4a", "moriarty: both sides reduce to the same rational function, PROVED, <= " + secs(kMoriartySeconds),
               rational && rl.fun.equals(rr.fun) && p.status == ProofStatus::Proved && s <= kMoriartySeconds,
               rr.fun_string() + ", " + secs(s));
        std::string why =
            "the printed function is the computed one minus 1/2; it has constant term 1/2, "
            "while both sides equal 1 at n=m=0";
        report("4b", "moriarty: both sides equal (1/2)(1-t1)(1+t1)/(t1^2+4t1t2+2t1+1)",
               rational && rl.fun.equals(printed) && rr.fun.equals(printed), "", why);
        RatFun offset = rl.fun - printed;
        bool half = offset.equals(RatFun::constant(static_cast<int>(names.size()), Q(1, 2)));
        Q origin = eval_oracle(lhs, {0, 0});
        report("4c", "moriarty: computed minus printed is exactly 1/2 and the oracle gives 1 at n=m=0",
               half && origin == 1, "oracle(0,0) = " + q_to_string(origin));
    });
}

void andrews_paule() {
    BSExpr lhs = parse(kApLhs), rhs = parse(kApRhs);
    std::optional<DFiniteSeries> rseries;
    guarded("5a", [&] {
        auto t0 = std::chrono::steady_clock::now();
        ResidueRep raw = residue_rep(lhs);
        ResidueRep red = reduced_rep(lhs);
        double s = since(t0);
        std::vector<Q> got = residue_series(red, kApSeriesTerms), want = oracle(lhs, kApSeriesTerms);
        report("5a", "andrews-paule: " + std::to_string(raw.residue_count()) +
                         " residue variables reduce to exactly 2, series equal to the oracle for " +
                         std::to_string(kApSeriesTerms) + " terms, reduction <= " + secs(kApReduceSeconds),
               raw.residue_count() == 6 && red.residue_count() == 2 && got == want && s <= kApReduceSeconds,
               "res_{" + red.residue_vars()[0] + "," + red.residue_vars()[1] + "}, " + secs(s));
    });
    guarded("5b", [&] {
        auto t0 = std::chrono::steady_clock::now();
        SideArtifacts a;
        DFiniteSeries f = gf_pipeline(rhs, {}, &a);
        double s = since(t0);
        rseries = f;
        DiffOp B = parse_diffop("t*(16*t-1)*D^2+(48*t-1)*D+12", T);
        report("5b", "andrews-paule: certified rhs operator right-divisible by t(16t-1)D^2+(48t-1)D+12, <= " +
                         secs(kApRhsSeconds),
               f.prov == Provenance::Certified && right_divides(B, f.op) && s <= kApRhsSeconds,
               f.op.to_string(T) + ", " + secs(s));
    });
    guarded("5c", [] {
        DiffOp L = parse_diffop(kApOrder6, T);
        std::vector<Q> roots = rational_roots(indicial_polynomial(L).b);
        std::vector<Q> want{Q(-1, 2), Q(0), Q(1, 2), Q(1)};
        std::string got;
        for (const auto& r : roots) got += (got.empty() ? "" : ", ") + q_to_string(r);
        report("5c", "andrews-paule: indicial roots of the printed order-6 operator are {0, 1, -1/2, 1/2}", roots == want,
               got);
    });
    guarded("5d", [&] {
        auto t0 = std::chrono::steady_clock::now();
        SideArtifacts a;
        DFiniteSeries f = gf_pipeline(lhs, {}, &a);
        double s = since(t0);
        std::vector<Q> want = oracle(lhs, kApGuessTerms);
        if (f.prov == Provenance::Certified) {
            report("5d", "andrews-paule: certified lhs operator (stretch)", f.coefficients(kApGuessTerms) == want,
                   f.op.to_string(T) + ", " + secs(s));
        } else {
            Recurrence r = recurrence_of(f);
            bool ok = unroll(r.rec, r.inits, kApGuessTerms) == want;
            report("5d", "andrews-paule: lhs CONJECTURAL, guessed recurrence reproduces " + std::to_string(kApGuessTerms) +
                             " oracle terms (certified operator not reached)",
                   ok, "order " + std::to_string(f.op.order()) + ", " + secs(s));
            DiffOp L6 = parse_diffop(kApOrder6, T);
            info("5d", std::string("guessed operator right-divides the printed order-6 operator: ") +
                           (right_divides(f.op, L6) ? "yes" : "no"));
        }
        if (rseries) {
            SeriesVerdict v = series_equal(f, *rseries);
            info("5d", std::string("lhs and rhs series equal: ") + (v.equal ? "yes" : "no") +
                           (v.certified ? ", certified" : ", conjectural"));
        }
    });
}

void strehl() {
    guarded("6", [] {
        BSExpr lhs = parse(kStrehlLhs), rhs = parse(kStrehlRhs);
        std::vector<Q> a = oracle(lhs, kStrehlTerms), b = oracle(rhs, kStrehlTerms);
        report("6a", "strehl: both sides agree on " + std::to_string(kStrehlTerms) + " oracle terms", a == b);
        DiffOp L = parse_diffop(kStrehlOp, T);
        report("6b", "strehl: printed operator annihilates both " + std::to_string(kStrehlTerms) + "-term prefixes",
               annihilates_prefix(L, a) && annihilates_prefix(L, b));
        auto t0 = std::chrono::steady_clock::now();
        SideArtifacts art;
        DFiniteSeries f = gf_pipeline(lhs, {}, &art);
        DiffOp g = f.op, want = L;
        g.normalize();
        want.normalize();
        info("6c", std::string("stretch, lhs operator ") + (f.prov == Provenance::Certified ? "CERTIFIED" : "CONJECTURAL") +
                       (g == want ? ", equal to the printed one" : ", differs from the printed one") + ", " +
                       secs(since(t0)));
        info("6c", "stretch, rhs operator not attempted: its telescoper exhausts memory at desk scale");
    });
}

// Runs a selection of the unit-test binary; doctest filters are comma separated.
bool unit_run(const std::string& suite, const std::string& cases) {
    std::string cmd = std::string("'") + BS_UNIT_TESTS + "' --test-suite=" + suite;
    if (!cases.empty()) cmd += " '--test-case=" + cases + "'";
    cmd += " >/dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
}

void properties() {
    auto t0 = std::chrono::steady_clock::now();
    auto timed = [](const std::string& id, const std::string& what, const std::function<bool()>& f) {
        auto s0 = std::chrono::steady_clock::now();
        bool ok = f();
        report(id, what, ok, secs(since(s0)));
    };
    timed("7a", "oracle agreement of the constant-term and residue forms on 25 random sums, |n| <= 5",
          [] { return unit_run("reprgen", "*random sums*") && unit_run("sumlang", "*random trees*"); });
    timed("7b", "geometric reduction sound and order independent on 25 random representations, 8 terms",
          [] { return unit_run("geomred", "reduction is sound*,elimination order*,simple-pole route*"); });
    guarded("7b", [] {
        bool ok = true;
        std::string bad;
        for (const char* src : {kDixonLhs, kDixonRhs, kApLhs, kApRhs, kStrehlLhs, kStrehlRhs}) {
            BSExpr e = parse(src);
            if (residue_series(reduced_rep(e), kSoundnessTerms) != oracle(e, kSoundnessTerms)) {
                ok = false;
                bad = src;
            }
        }
        for (auto [l, r] : {std::pair{kDent, kDentRhs}, std::pair{kMoriartyLhs, kMoriartyRhs}}) {
            BSExpr a = parse(l), b = parse(r, a.param_names());
            for (const BSExpr* e : {&a, &b}) {
                ResidueRep red = reduced_rep(*e);
                for (int i = 0; i < kSoundnessTerms; ++i)
                    for (int j = 0; j < kSoundnessTerms; ++j)
                        if (formal_residue_coeff(red, {i, j}) != eval_oracle(*e, {i, j})) {
                            ok = false;
                            bad = to_string(*e);
                        }
            }
        }
        report("7b", "geometric reduction sound on the corpus sums, " + std::to_string(kSoundnessTerms) + " terms", ok, bad);
    });
    timed("7c", "all-large-or-all-small against the tropical oracle on random polynomials in 2-3 variables",
          [] { return unit_run("geomred", "*tropical oracle*"); });
    timed("7d", "Ore recomposition, right gcd, indicial polynomial and unroll invariants", [] {
        return unit_run("ore", "") && unit_run("telescoper", "*random hypergeometric*");
    });
    double s = since(t0);
    report("7", "property suites within " + secs(kPropertySeconds), s <= kPropertySeconds, secs(s));
}

void excluded() {
    info("8", "excluded: Strehl's second identity (five residue variables after reduction)");
    guarded("8", [] {
        std::vector<CorpusEntry> entries = load_corpus(BS_CORPUS_DIR);
        for (const auto& e : entries) {
            if (e.name != "le_borgne" && e.name != "abs_cubes") continue;
            CorpusOutcome o = run_entry(e);
            std::string detail = secs(o.seconds);
            for (const auto& f : o.failures) detail += "; " + f;
            report("8", "optional " + e.name + ": 30-term series match", o.passed, detail);
        }
    });
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    dixon();
    alternating();
    dent();
    moriarty();
    andrews_paule();
    strehl();
    properties();
    excluded();
    std::cout << passed << " passed, " << known << " known deviations, " << unexpected << " unexpected failures ("
              << secs(since(t0)) << ")" << std::endl;
    return unexpected == 0 ? 0 : 1;
}
