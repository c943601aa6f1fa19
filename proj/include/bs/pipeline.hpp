#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bs/cache.hpp"
#include "bs/geomred.hpp"
#include "bs/ore.hpp"
#include "bs/sumlang.hpp"
#include "bs/telescoper.hpp"

namespace bs {

struct PipelineBudget {
    TelescoperBounds tele{6, 12, 0, 2, 4000, 120, 30};
    ReduceBudget reduce;
    int guess_terms = 80;    // prefix handed to the fallback guesser
    int verify_terms = 30;   // extra terms a guessed operator must annihilate
    int prescreen = 6;       // oracle box [0, prescreen]^d
    bool use_telescoper = true;
};

// Stage outputs of one side of an identity.
struct SideArtifacts {
    std::string expr;
    std::string rep;                      // residue representation before reduction
    std::string reduced;                  // after geometric reduction
    std::vector<std::string> residue_vars;
    std::vector<StepTrace> trace;
    bool rational = false;                // no residue variable left
    bool has_series = false;
    DFiniteSeries series;
    std::optional<ProofRecord> record;    // telescoper run, when one succeeded
    std::string evidence;                 // for conjectural operators
    int telescoper_calls = 0;
    bool cached = false;
};

enum class ProofStatus { Proved, Refuted, Conjectural, BudgetExceeded };

std::string to_string(ProofStatus s);

struct ProofResult {
    ProofStatus status = ProofStatus::BudgetExceeded;
    std::vector<long> witness;  // Refuted: a point with different oracle values
    std::string evidence;
    SideArtifacts lhs, rhs;
};

// Reduced residue representation; art receives the stage strings and trace.
ResidueRep reduced_rep(const BSExpr& e, const PipelineBudget& budget = {}, SideArtifacts* art = nullptr);

// Representation and reduction only; works for any number of free indices.
SideArtifacts reduce_stage(const BSExpr& e, const PipelineBudget& budget = {}, Cache* cache = nullptr);

// Generating function of a one-index sum as a D-finite series with inits from the oracle.
DFiniteSeries gf_pipeline(const BSExpr& e, const PipelineBudget& budget = {}, SideArtifacts* art = nullptr,
                          Cache* cache = nullptr);

// b must share a's free indices, in the same order.
ProofResult prove_equal(const BSExpr& a, const BSExpr& b, const PipelineBudget& budget = {}, Cache* cache = nullptr);

// Oracle values on [0,N]^d in row-major order, d <= 2.
std::vector<Q> expand(const BSExpr& e, int N);

struct Recurrence {
    RecOp rec;
    std::map<long, Q> inits;  // sufficient for unroll
};

Recurrence recurrence_of(const DFiniteSeries& f);

nlohmann::json to_json(const SideArtifacts& a);
SideArtifacts side_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProofResult& r);
// coefficient lists, lowest power of t first
nlohmann::json op_to_json(const DiffOp& op);

}  // namespace bs
