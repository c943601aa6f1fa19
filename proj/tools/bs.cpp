// bs: command-line front end for binomial sum representations and proofs.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bs/corpus.hpp"
#include "bs/pipeline.hpp"
#include "bs/reprgen.hpp"

using namespace bs;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kRefuted = 1, kFailure = 2, kUsage = 3 };

struct JobConfig {
    bool as_json = false;
    std::string cache_dir;
    bool no_cache = false;
    std::string params;  // comma separated override of the free index order
    int max_order = 6, max_degree = 12, pole_order = 0;
    double timeout = 120;

    PipelineBudget budget() const {
        PipelineBudget b;
        b.tele.max_order = max_order;
        b.tele.max_degree = max_degree;
        b.tele.pole_order = pole_order;
        b.tele.timeout_seconds = timeout;
        return b;
    }
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_params(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

BSExpr load(const std::string& arg, const JobConfig& cfg) {
    std::string text = read_expression(arg);
    if (cfg.params.empty()) return parse(text);
    return parse(text, split_params(cfg.params));
}

std::string residue_prefix_text(const std::vector<std::string>& vars) {
    if (vars.empty()) return "";
    std::string s = "res_{";
    for (std::size_t i = 0; i < vars.size(); ++i) s += (i ? "," : "") + vars[i];
    return s + "} ";
}

void emit(const JobConfig& cfg, const json& j, const std::string& human) {
    if (cfg.as_json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << human;
}

std::string inits_text(const std::map<long, Q>& in) {
    std::string s;
    for (const auto& [k, v] : in) s += (s.empty() ? "" : ", ") + ("u(" + std::to_string(k) + ") = " + q_to_string(v));
    return s.empty() ? "none" : s;
}

json inits_json(const std::map<long, Q>& in) {
    json j = json::object();
    for (const auto& [k, v] : in) j[std::to_string(k)] = q_to_string(v);
    return j;
}

int cmd_repr(const JobConfig& cfg, const std::string& arg) {
    BSExpr e = load(arg, cfg);
    ResidueRep r = residue_rep(e);
    json j{{"params", e.param_names()}, {"residue_vars", r.residue_vars()}, {"fun", r.fun_string()}};
    emit(cfg, j, residue_prefix_text(r.residue_vars()) + r.fun_string() + "\n");
    return kOk;
}

int cmd_reduce(const JobConfig& cfg, Cache* cache, const std::string& arg) {
    BSExpr e = load(arg, cfg);
    SideArtifacts a = reduce_stage(e, cfg.budget(), cache);
    json full = to_json(a);
    json j{{"residue_vars", a.residue_vars}, {"fun", a.reduced}, {"trace", full["trace"]}};
    std::string h = residue_prefix_text(a.residue_vars) + a.reduced + "\n";
    for (const auto& s : a.trace) h += "  " + s.var + ": " + s.rule + "\n";
    emit(cfg, j, h);
    return kOk;
}

json series_json(const SideArtifacts& a) {
    json full = to_json(a);
    json j{{"operator", full["operator"]},
           {"coeffs", full["operator_coeffs"]},
           {"provenance", full["provenance"]},
           {"inits", full["inits"]}};
    if (full.contains("telescoper")) j["telescoper"] = full["telescoper"];
    if (full.contains("evidence")) j["evidence"] = full["evidence"];
    return j;
}

std::string provenance_text(const SideArtifacts& a) {
    return a.series.prov == Provenance::Certified ? "CERTIFIED" : "CONJECTURAL (" + a.evidence + ")";
}

int cmd_ode(const JobConfig& cfg, Cache* cache, const std::string& arg) {
    BSExpr e = load(arg, cfg);
    SideArtifacts a;
    gf_pipeline(e, cfg.budget(), &a, cache);
    if (a.cached && !cfg.as_json) std::cerr << "cache hit\n";
    std::string h = "operator: " + a.series.op.to_string({"t"}) + "\nprovenance: " + provenance_text(a) +
                    "\ninits: " + inits_text(a.series.inits) + "\n";
    emit(cfg, series_json(a), h);
    return kOk;
}

int cmd_rec(const JobConfig& cfg, Cache* cache, const std::string& arg) {
    BSExpr e = load(arg, cfg);
    SideArtifacts a;
    DFiniteSeries f = gf_pipeline(e, cfg.budget(), &a, cache);
    Recurrence r = recurrence_of(f);
    json coeffs = json::array();
    for (const auto& q : r.rec.q) coeffs.push_back(q.to_string(std::vector<std::string>{"n"}));
    json j{{"recurrence", r.rec.to_string()},
           {"coeffs", coeffs},
           {"inits", inits_json(r.inits)},
           {"provenance", f.prov == Provenance::Certified ? "CERTIFIED" : "CONJECTURAL"}};
    emit(cfg, j, r.rec.to_string() + "\ninits: " + inits_text(r.inits) + "\nprovenance: " + provenance_text(a) + "\n");
    return kOk;
}

int cmd_expand(const JobConfig& cfg, const std::string& arg, int N) {
    if (N < 0) throw UsageError("expand: -n must be nonnegative");
    BSExpr e = load(arg, cfg);
    std::vector<Q> v = expand(e, N);
    json vals = json::array();
    std::string h;
    if (e.params <= 1) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            vals.push_back(q_to_string(v[i]));
            h += (i ? " " : "") + q_to_string(v[i]);
        }
        h += "\n";
    } else {
        std::size_t w = static_cast<std::size_t>(N) + 1;
        for (std::size_t i = 0; i < w; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < w; ++k) {
                row.push_back(q_to_string(v[i * w + k]));
                h += (k ? " " : "") + q_to_string(v[i * w + k]);
            }
            vals.push_back(row);
            h += "\n";
        }
    }
    emit(cfg, json{{"params", e.param_names()}, {"values", vals}}, h);
    return kOk;
}

int cmd_prove(const JobConfig& cfg, Cache* cache, const std::string& a, const std::string& b) {
    BSExpr L = load(a, cfg);
    BSExpr R = parse(read_expression(b), L.param_names());
    ProofResult r = prove_equal(L, R, cfg.budget(), cache);
    std::string h = to_string(r.status) + "\n";
    if (!r.witness.empty()) {
        h += "witness:";
        for (long n : r.witness) h += " " + std::to_string(n);
        h += "\n";
    }
    if (!r.evidence.empty()) h += "evidence: " + r.evidence + "\n";
    for (const auto* side : {&r.lhs, &r.rhs}) {
        const char* tag = side == &r.lhs ? "lhs" : "rhs";
        if (!side->reduced.empty()) h += std::string(tag) + " gf: " + residue_prefix_text(side->residue_vars) + side->reduced + "\n";
        if (side->has_series)
            h += std::string(tag) + " operator: " + side->series.op.to_string({"t"}) + " [" + provenance_text(*side) + "]\n";
    }
    emit(cfg, to_json(r), h);
    switch (r.status) {
    case ProofStatus::Proved: return kOk;
    case ProofStatus::Refuted: return kRefuted;
    default: return kFailure;
    }
}

int cmd_corpus(const JobConfig& cfg, Cache* cache, const std::string& dir, bool slow, int jobs,
               const std::string& filter) {
    std::vector<CorpusEntry> all = load_corpus(dir), chosen;
    for (auto& e : all) {
        if (e.slow && !slow) continue;
        if (!filter.empty() && e.name.find(filter) == std::string::npos) continue;
        chosen.push_back(std::move(e));
    }
    std::vector<CorpusOutcome> res = run_corpus(chosen, cfg.budget(), cache, jobs);
    json arr = json::array();
    std::string h;
    int failed = 0;
    for (const auto& o : res) {
        arr.push_back(to_json(o));
        char buf[64];
        std::snprintf(buf, sizeof buf, " (%.2f s)", o.seconds);
        h += (o.passed ? "PASS " : "FAIL ") + o.name + " " + o.status + buf + "\n";
        for (const auto& f : o.failures) h += "    " + f + "\n";
        if (!o.passed) ++failed;
    }
    h += std::to_string(res.size() - failed) + "/" + std::to_string(res.size()) + " entries passed\n";
    emit(cfg, json{{"entries", arr}, {"failed", failed}}, h);
    return failed ? kFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binomial sums: integral representations, differential equations and identity proofs"};
    app.require_subcommand(1);
    JobConfig cfg;
    cfg.cache_dir = default_cache_dir();

    auto common = [&](CLI::App* sub) {
        sub->add_flag("--json", cfg.as_json, "JSON output");
        sub->add_option("--cache-dir", cfg.cache_dir, "Result cache directory (default: $BS_CACHE_DIR)");
        sub->add_flag("--no-cache", cfg.no_cache, "Ignore the cache");
        sub->add_option("--params", cfg.params, "Free indices in order, comma separated");
        sub->add_option("--max-order", cfg.max_order, "Largest operator order tried")->check(CLI::PositiveNumber);
        sub->add_option("--max-degree", cfg.max_degree, "Largest coefficient degree tried")->check(CLI::PositiveNumber);
        sub->add_option("--pole-order", cfg.pole_order, "Certificate pole order (0: automatic)")->check(CLI::NonNegativeNumber);
        sub->add_option("--timeout", cfg.timeout, "Telescoper time limit in seconds")->check(CLI::PositiveNumber);
    };

    std::string expr, expr2, dir = "corpus", filter;
    int n_terms = 10, jobs = 1;
    bool slow = false;

    auto* repr = app.add_subcommand("repr", "Residue representation of the generating function");
    auto* reduce = app.add_subcommand("reduce", "Geometric reduction of the representation");
    auto* ode = app.add_subcommand("ode", "Differential equation of the generating function");
    auto* rec = app.add_subcommand("rec", "Recurrence with sufficient initial conditions");
    auto* exp = app.add_subcommand("expand", "Table of values on [0,N]^d");
    auto* prove = app.add_subcommand("prove", "Prove or refute A = B");
    auto* corpus = app.add_subcommand("corpus", "Run the golden corpus");
    for (auto* s : {repr, reduce, ode, rec, exp}) {
        common(s);
        s->add_option("expr", expr, "Expression or file")->required();
    }
    exp->add_option("-n", n_terms, "Box size")->check(CLI::NonNegativeNumber);
    common(prove);
    prove->add_option("lhs", expr, "Left-hand side expression or file")->required();
    prove->add_option("rhs", expr2, "Right-hand side expression or file")->required();
    common(corpus);
    corpus->add_option("--dir", dir, "Corpus directory");
    corpus->add_flag("--slow", slow, "Include slow entries");
    corpus->add_option("--jobs", jobs, "Parallel workers")->check(CLI::PositiveNumber);
    corpus->add_option("--filter", filter, "Only entries whose name contains this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        std::unique_ptr<Cache> cache;
        if (!cfg.no_cache && !cfg.cache_dir.empty()) cache = std::make_unique<Cache>(cfg.cache_dir);
        Cache* c = cache.get();
        int rc = kOk;
        if (*repr) rc = cmd_repr(cfg, expr);
        else if (*reduce) rc = cmd_reduce(cfg, c, expr);
        else if (*ode) rc = cmd_ode(cfg, c, expr);
        else if (*rec) rc = cmd_rec(cfg, c, expr);
        else if (*exp) rc = cmd_expand(cfg, expr, n_terms);
        else if (*prove) rc = cmd_prove(cfg, c, expr, expr2);
        else if (*corpus) rc = cmd_corpus(cfg, c, dir, slow, jobs, filter);
        if (cache)
            for (const auto& w : cache->warnings()) std::cerr << "warning: " << w << "\n";
        return rc;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const BindingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
