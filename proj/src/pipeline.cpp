#include "bs/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "bs/reprgen.hpp"

namespace bs {

using nlohmann::json;

std::string to_string(ProofStatus s) {
    switch (s) {
    case ProofStatus::Proved: return "PROVED";
    case ProofStatus::Refuted: return "REFUTED";
    case ProofStatus::Conjectural: return "CONJECTURAL";
    case ProofStatus::BudgetExceeded: return "BUDGET_EXCEEDED";
    }
    return "?";
}

// ---- JSON ----

namespace {

const std::vector<std::string> kT{"t"};

json poly_json(const MPoly& p) {
    // dense coefficient list in the single variable
    json out = json::array();
    for (int d = 0; d <= std::max(0, p.degree(0)); ++d) {
        MPoly c = p.coeff_of(0, d);
        out.push_back(q_to_string(c.is_zero() ? Q(0) : c.terms().front().c));
    }
    return out;
}

MPoly poly_from_json(const json& j) {
    std::vector<MPoly::Term> ts;
    for (std::size_t d = 0; d < j.size(); ++d) {
        Q c(j[d].get<std::string>());
        c.canonicalize();
        if (sgn(c) != 0) ts.push_back({ExpVec::unit(1, 0, static_cast<int>(d)), c});
    }
    return MPoly::from_terms(1, ts);
}

DiffOp op_from_json(const json& j) {
    DiffOp op;
    op.nvars = 1;
    op.var = 0;
    for (const auto& c : j) op.p.push_back(poly_from_json(c));
    op.trim();
    return op;
}

json trace_json(const std::vector<StepTrace>& tr) {
    json out = json::array();
    for (const auto& s : tr) {
        json f = json::array();
        for (const auto& [fac, kind] : s.factors) f.push_back({{"factor", fac}, {"roots", kind}});
        out.push_back({{"var", s.var}, {"rule", s.rule}, {"factors", f}});
    }
    return out;
}

std::vector<StepTrace> trace_from_json(const json& j) {
    std::vector<StepTrace> out;
    for (const auto& s : j) {
        StepTrace t;
        t.var = s["var"];
        t.rule = s["rule"];
        for (const auto& f : s["factors"]) t.factors.emplace_back(f["factor"], f["roots"]);
        out.push_back(std::move(t));
    }
    return out;
}

json inits_json(const std::map<long, Q>& in) {
    json out = json::object();
    for (const auto& [k, v] : in) out[std::to_string(k)] = q_to_string(v);
    return out;
}

std::map<long, Q> inits_from_json(const json& j) {
    std::map<long, Q> out;
    for (const auto& [k, v] : j.items()) {
        Q q(v.get<std::string>());
        q.canonicalize();
        out[std::stol(k)] = q;
    }
    return out;
}

}  // namespace

json op_to_json(const DiffOp& op) {
    json out = json::array();
    for (const auto& c : op.p) out.push_back(poly_json(c));
    return out;
}

json to_json(const SideArtifacts& a) {
    json j{{"expr", a.expr},
           {"rep", a.rep},
           {"reduced", a.reduced},
           {"residue_vars", a.residue_vars},
           {"trace", trace_json(a.trace)},
           {"rational", a.rational},
           {"telescoper_calls", a.telescoper_calls}};
    if (a.has_series) {
        j["operator"] = a.series.op.to_string(kT);
        j["operator_coeffs"] = op_to_json(a.series.op);
        j["inits"] = inits_json(a.series.inits);
        j["provenance"] = a.series.prov == Provenance::Certified ? "CERTIFIED" : "CONJECTURAL";
    }
    if (!a.evidence.empty()) j["evidence"] = a.evidence;
    if (a.record) {
        const ProofRecord& r = *a.record;
        j["telescoper"] = {{"order", r.order},
                           {"degree", r.degree},
                           {"pole_order", r.kappa},
                           {"z_slack", r.z_slack},
                           {"unknowns", r.unknowns},
                           {"primes", r.primes},
                           {"series_check_terms", r.series_check_terms},
                           {"identity_checked", r.identity_checked}};
    }
    return j;
}

SideArtifacts side_from_json(const json& j) {
    SideArtifacts a;
    a.expr = j.value("expr", "");
    a.rep = j.value("rep", "");
    a.reduced = j.value("reduced", "");
    a.residue_vars = j.value("residue_vars", std::vector<std::string>{});
    a.trace = trace_from_json(j.value("trace", json::array()));
    a.rational = j.value("rational", false);
    a.telescoper_calls = j.value("telescoper_calls", 0);
    a.evidence = j.value("evidence", "");
    if (j.contains("operator_coeffs")) {
        a.has_series = true;
        a.series.op = op_from_json(j["operator_coeffs"]);
        a.series.inits = inits_from_json(j["inits"]);
        a.series.prov = j["provenance"] == "CERTIFIED" ? Provenance::Certified : Provenance::Conjectural;
    }
    if (j.contains("telescoper")) {
        const json& t = j["telescoper"];
        ProofRecord r;
        r.op = a.series.op;
        r.order = t["order"];
        r.degree = t["degree"];
        r.kappa = t["pole_order"];
        r.z_slack = t["z_slack"];
        r.unknowns = t["unknowns"];
        r.primes = t["primes"];
        r.series_check_terms = t["series_check_terms"];
        r.identity_checked = t["identity_checked"];
        a.record = r;
    }
    return a;
}

json to_json(const ProofResult& r) {
    json j{{"status", to_string(r.status)}, {"lhs", to_json(r.lhs)}, {"rhs", to_json(r.rhs)}};
    if (!r.witness.empty()) j["witness"] = r.witness;
    if (!r.evidence.empty()) j["evidence"] = r.evidence;
    return j;
}

// ---- stages ----

namespace {

std::string expr_key(const BSExpr& e) {
    std::string names;
    for (const auto& n : e.param_names()) names += n + ",";
    return names + "|" + to_string(e);
}

std::string bounds_key(const PipelineBudget& b) {
    std::ostringstream os;
    const TelescoperBounds& t = b.tele;
    os << t.max_order << ',' << t.max_degree << ',' << t.pole_order << ',' << t.z_slack << ',' << t.max_unknowns
       << ',' << t.timeout_seconds << ',' << t.series_check_terms << ',' << b.guess_terms << ',' << b.verify_terms
       << ',' << b.use_telescoper;
    return os.str();
}

std::string reduce_key(const PipelineBudget& b) {
    std::ostringstream os;
    os << b.reduce.step_seconds << ',' << b.reduce.max_terms;
    return os.str();
}

// Oracle values at n = 0, 1, ... computed on demand.
class Prefix {
public:
    explicit Prefix(const BSExpr& e) : ev_(e) {}
    const std::vector<Q>& upto(int N) {
        while (static_cast<int>(v_.size()) < N) v_.push_back(ev_.eval({static_cast<long>(v_.size())}));
        return v_;
    }
    std::vector<Q> first(int N) {
        upto(N);
        return std::vector<Q>(v_.begin(), v_.begin() + N);
    }

private:
    Evaluator ev_;
    std::vector<Q> v_;
};

RatFun lowest_terms(const RatFun& f) {
    if (f.is_zero()) return f;
    MPoly num = f.numerator(), den = f.denominator();
    MPoly g = gcd(num, den);
    if (g.total_degree() <= 0) return f;
    return RatFun::quotient(*num.divide_exact(g), *den.divide_exact(g));
}

ResidueRep run_reduction(const BSExpr& e, const PipelineBudget& budget, SideArtifacts& a) {
    a.expr = to_string(e);
    CTRep ct = sum_to_ct(e);
    std::vector<ResidueRep> terms = ct_to_residue_terms(ct);
    a.rep = ct_to_residue(ct).fun_string();
    std::vector<StepTrace> trace;
    ResidueRep red = reduce_terms(terms, &trace, budget.reduce);
    if (red.residue_count() == 0) red.fun = lowest_terms(red.fun);
    a.reduced = red.fun_string();
    a.residue_vars = red.residue_vars();
    a.trace = std::move(trace);
    a.rational = red.residue_count() == 0;
    return red;
}

long max_root(const DiffOp& op) {
    auto roots = nonneg_integer_roots(indicial_polynomial(op).b);
    return roots.empty() ? -1 : *std::max_element(roots.begin(), roots.end());
}

bool annihilates(const DiffOp& op, const std::vector<Q>& pre, int n_out) {
    for (const auto& x : apply_op(op, pre, n_out))
        if (x != 0) return false;
    return true;
}

void compute_gf(const BSExpr& e, const PipelineBudget& budget, SideArtifacts& a) {
    if (e.params != 1) throw MathError("gf_pipeline: expected exactly one free index");
    ResidueRep red = run_reduction(e, budget, a);
    Prefix pre(e);
    const TelescoperBounds& B = budget.tele;
    DiffOp op;
    Provenance prov = Provenance::Certified;
    if (a.rational) {
        op = annihilator_of_rational(red.fun, 0);
        int T = budget.verify_terms;
        if (!annihilates(op, pre.first(T + op.order() + 1), T))
            throw MathError("gf_pipeline: rational generating function disagrees with the oracle");
    } else {
        bool found = false;
        if (budget.use_telescoper) {
            TelescoperProblem p;
            p.rep = red;
            p.bounds = B;
            p.known_prefix = pre.first(std::max(B.series_check_terms + B.max_order + 1, 24));
            ++a.telescoper_calls;
            try {
                PicardFuchs pf = picard_fuchs(p);
                op = pf.op;
                a.record = pf.record;
                found = true;
            } catch (const BudgetExceeded&) {
            }
        }
        if (!found) {
            int G = budget.guess_terms, V = budget.verify_terms;
            std::vector<Q> values = pre.first(G + V + B.max_order + 1);
            auto g = guess_ode(std::vector<Q>(values.begin(), values.begin() + G), B.max_order, B.max_degree);
            if (!g || !annihilates(*g, values, G + V)) throw BudgetExceeded("no operator found within budget");
            op = *g;
            prov = Provenance::Conjectural;
            std::ostringstream os;
            os << "operator of order " << op.order() << " guessed from " << G << " oracle terms, annihilates "
               << G + V << " terms";
            a.evidence = os.str();
        }
    }
    a.series = make_series(op, pre.first(static_cast<int>(max_root(op)) + 1), prov);
    a.has_series = true;
}

}  // namespace

ResidueRep reduced_rep(const BSExpr& e, const PipelineBudget& budget, SideArtifacts* art) {
    SideArtifacts a;
    ResidueRep r = run_reduction(e, budget, a);
    if (art) *art = std::move(a);
    return r;
}

SideArtifacts reduce_stage(const BSExpr& e, const PipelineBudget& budget, Cache* cache) {
    auto produce = [&] {
        SideArtifacts a;
        run_reduction(e, budget, a);
        return to_json(a);
    };
    if (!cache) return side_from_json(produce());
    bool hit = false;
    json j = cache->get_or_compute(canonical_hash({"reduce", expr_key(e), reduce_key(budget)}), produce, &hit);
    SideArtifacts a = side_from_json(j);
    a.cached = hit;
    return a;
}

DFiniteSeries gf_pipeline(const BSExpr& e, const PipelineBudget& budget, SideArtifacts* art, Cache* cache) {
    SideArtifacts a;
    if (cache) {
        bool hit = false;
        json j = cache->get_or_compute(
            canonical_hash({"gf", expr_key(e), reduce_key(budget), bounds_key(budget)}),
            [&] {
                SideArtifacts fresh;
                compute_gf(e, budget, fresh);
                return to_json(fresh);
            },
            &hit);
        a = side_from_json(j);
        a.cached = hit;
    } else {
        compute_gf(e, budget, a);
    }
    if (art) *art = a;
    return a.series;
}

namespace {

// first point of [0,N]^d where the oracles differ
std::optional<std::vector<long>> oracle_mismatch(const BSExpr& a, const BSExpr& b, int N) {
    int d = a.params;
    Evaluator ea(a), eb(b);
    std::vector<long> n(d, 0);
    while (true) {
        if (ea.eval(n) != eb.eval(n)) return n;
        int k = d - 1;
        while (k >= 0 && ++n[k] > N) n[k--] = 0;
        if (k < 0) return std::nullopt;
    }
}

}  // namespace

ProofResult prove_equal(const BSExpr& a, const BSExpr& b, const PipelineBudget& budget, Cache* cache) {
    if (a.param_names() != b.param_names()) throw MathError("prove_equal: the two sides have different free indices");
    ProofResult res;
    res.lhs.expr = to_string(a);
    res.rhs.expr = to_string(b);
    int d = a.params;
    if (auto w = oracle_mismatch(a, b, d == 0 ? 0 : budget.prescreen)) {
        res.status = ProofStatus::Refuted;
        res.witness = *w;
        return res;
    }
    std::ostringstream box;
    box << "oracle agreement on [0," << budget.prescreen << "]^" << d;
    if (d == 0) {
        res.status = ProofStatus::Proved;
        res.evidence = "constant sums evaluated exactly";
        return res;
    }
    try {
        if (d == 1) {
            DFiniteSeries fa = gf_pipeline(a, budget, &res.lhs, cache);
            DFiniteSeries fb = gf_pipeline(b, budget, &res.rhs, cache);
            SeriesVerdict v = series_equal(fa, fb);
            if (v.equal) {
                res.status = v.certified ? ProofStatus::Proved : ProofStatus::Conjectural;
                if (!v.certified) res.evidence = "series agree; an operator is guessed, " + box.str();
                return res;
            }
            const int N = 100;
            std::vector<Q> ca = fa.coefficients(N), cb = fb.coefficients(N);
            for (int k = 0; k < N; ++k)
                if (ca[k] != cb[k] && eval_oracle(a, {k}) != eval_oracle(b, {k})) {
                    res.status = ProofStatus::Refuted;
                    res.witness = {k};
                    return res;
                }
            res.status = ProofStatus::BudgetExceeded;
            res.evidence = "series differ but no oracle witness below 100";
            return res;
        }
        // several free indices: rational path
        ResidueRep ra = run_reduction(a, budget, res.lhs);
        ResidueRep rb = run_reduction(b, budget, res.rhs);
        if (ra.residue_count() == 0 && rb.residue_count() == 0) {
            if (ra.fun.equals(rb.fun)) {
                res.status = ProofStatus::Proved;
                res.evidence = "both generating functions reduce to the same rational function";
                return res;
            }
            if (auto w = oracle_mismatch(a, b, 12)) {
                res.status = ProofStatus::Refuted;
                res.witness = *w;
                return res;
            }
            res.status = ProofStatus::BudgetExceeded;
            res.evidence = "rational functions differ but no oracle witness in [0,12]^" + std::to_string(d);
            return res;
        }
        res.status = ProofStatus::Conjectural;
        res.evidence = "residue variables remain after reduction; " + box.str();
        return res;
    } catch (const BudgetExceeded& ex) {
        res.status = ProofStatus::BudgetExceeded;
        res.evidence = ex.what();
        return res;
    }
}

std::vector<Q> expand(const BSExpr& e, int N) {
    if (e.params > 2) throw MathError("expand: at most two free indices");
    Evaluator ev(e);
    std::vector<Q> out;
    if (e.params == 0) {
        out.push_back(ev.eval({}));
    } else if (e.params == 1) {
        for (long n = 0; n <= N; ++n) out.push_back(ev.eval({n}));
    } else {
        for (long i = 0; i <= N; ++i)
            for (long j = 0; j <= N; ++j) out.push_back(ev.eval({i, j}));
    }
    return out;
}

Recurrence recurrence_of(const DFiniteSeries& f) {
    Recurrence r;
    r.rec = ode_to_rec(f.op);
    int s = r.rec.order();
    std::vector<long> ks;
    for (const Q& m : rational_roots(r.rec.q[s])) {
        if (m.get_den() != 1) continue;
        long k = m.get_num().get_si() + s;
        if (k >= 0) ks.push_back(k);
    }
    if (ks.empty()) return r;
    long top = *std::max_element(ks.begin(), ks.end());
    std::vector<Q> u = f.coefficients(static_cast<int>(top) + 1);
    for (long k : ks) r.inits[k] = u[k];
    return r;
}

}  // namespace bs
