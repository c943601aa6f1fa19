#include "bs/corpus.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace bs {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_expression(const std::string& arg) {
    std::error_code ec;
    if (!arg.empty() && arg.size() < 4096 && fs::is_regular_file(arg, ec)) {
        std::ifstream in(arg);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return arg;
}

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
    fs::path manifest = fs::path(dir) / "corpus.json";
    std::ifstream in(manifest);
    if (!in) throw std::runtime_error("cannot read " + manifest.string());
    json j = json::parse(in);
    auto load = [&](const std::string& file) {
        if (file.empty()) return std::string();
        std::ifstream f(fs::path(dir) / file);
        if (!f) throw std::runtime_error("cannot read " + (fs::path(dir) / file).string());
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    std::vector<CorpusEntry> out;
    for (const auto& e : j.at("entries")) {
        CorpusEntry c;
        c.name = e.at("name");
        c.lhs = load(e.at("lhs"));
        c.rhs = load(e.value("rhs", ""));
        c.expect = e.at("expect");
        c.provenance = e.value("provenance", "");
        c.slow = e.value("slow", false);
        c.note = e.value("note", "");
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

std::vector<Q> prefix_of(const BSExpr& e, int N) {
    Evaluator ev(e);
    std::vector<Q> out;
    for (long n = 0; n < N; ++n) out.push_back(ev.eval({n}));
    return out;
}

bool status_matches(const json& want, const std::string& got) {
    if (want.is_array()) {
        for (const auto& w : want)
            if (w == got) return true;
        return false;
    }
    return want == got;
}

}  // namespace

CorpusOutcome run_entry(const CorpusEntry& e, const PipelineBudget& budget, Cache* cache) {
    auto t0 = std::chrono::steady_clock::now();
    CorpusOutcome out;
    out.name = e.name;
    out.status = "CHECKED";
    auto fail = [&](const std::string& s) { out.failures.push_back(s); };
    try {
        BSExpr L = parse(e.lhs);
        std::optional<BSExpr> R;
        if (!e.rhs.empty()) R = parse(e.rhs, L.param_names());
        const json& x = e.expect;
        std::optional<DFiniteSeries> ls, rs;

        if (x.contains("status")) {
            if (!R) throw std::runtime_error("status expectation needs a right-hand side");
            ProofResult pr = prove_equal(L, *R, budget, cache);
            out.status = to_string(pr.status);
            if (!status_matches(x["status"], out.status)) fail("status " + out.status + ", expected " + x["status"].dump());
            if (pr.lhs.has_series) ls = pr.lhs.series;
            if (pr.rhs.has_series) rs = pr.rhs.series;
        }
        if (x.contains("residue_vars")) {
            int got = reduced_rep(L, budget).residue_count();
            if (got != x["residue_vars"].get<int>())
                fail("lhs keeps " + std::to_string(got) + " residue variables, expected " + x["residue_vars"].dump());
        }
        if (x.contains("rational")) {
            std::vector<const BSExpr*> sides{&L};
            if (R) sides.push_back(&*R);
            for (const BSExpr* s : sides) {
                ResidueRep r = reduced_rep(*s, budget);
                const auto& names = r.ord.names;
                RatFun want = RatFun::quotient(parse_poly(x["rational"]["num"], names),
                                               parse_poly(x["rational"]["den"], names));
                if (r.residue_count() != 0 || !r.fun.equals(want))
                    fail((s == &L ? "lhs" : "rhs") + std::string(" reduces to ") + r.fun_string());
            }
        }
        for (const char* side : {"lhs_operator", "rhs_operator"}) {
            if (!x.contains(side)) continue;
            bool left = side[0] == 'l';
            if (!left && !R) throw std::runtime_error("rhs_operator without a right-hand side");
            std::optional<DFiniteSeries>& s = left ? ls : rs;
            if (!s) s = gf_pipeline(left ? L : *R, budget, nullptr, cache);
            DiffOp want = parse_diffop(x[side].get<std::string>(), {"t"});
            if (!is_annihilated(*s, want)) fail(std::string(side) + " does not annihilate the computed series");
        }
        int N = x.value("prefix_terms", 0);
        if (N > 0) {
            std::vector<Q> a = prefix_of(L, N);
            if (R && prefix_of(*R, N) != a) fail("oracle prefixes differ within " + std::to_string(N) + " terms");
            if (x.contains("annihilator")) {
                DiffOp op = parse_diffop(x["annihilator"].get<std::string>(), {"t"});
                int M = N - op.order();
                std::vector<std::vector<Q>> both{a};
                if (R) both.push_back(prefix_of(*R, N));
                for (const auto& p : both)
                    for (const auto& v : apply_op(op, p, M))
                        if (v != 0) {
                            fail("annihilator fails on an oracle prefix");
                            break;
                        }
            }
            if (x.contains("prefix")) {
                std::vector<Q> want;
                for (const auto& v : x["prefix"]) {
                    Q q(v.get<std::string>());
                    q.canonicalize();
                    want.push_back(q);
                }
                want.resize(std::min<std::size_t>(want.size(), a.size()));
                if (std::vector<Q>(a.begin(), a.begin() + want.size()) != want) fail("lhs prefix differs from the expected values");
            }
        }
    } catch (const std::exception& ex) {
        fail(std::string("error: ") + ex.what());
    }
    out.passed = out.failures.empty();
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<CorpusOutcome> run_corpus(const std::vector<CorpusEntry>& entries, const PipelineBudget& budget,
                                      Cache* cache, int jobs) {
    std::vector<CorpusOutcome> out(entries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) out[i] = run_entry(entries[i], budget, cache);
    };
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(entries.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

json to_json(const CorpusOutcome& o) {
    return json{{"name", o.name}, {"passed", o.passed}, {"status", o.status}, {"failures", o.failures}};
}

}  // namespace bs
