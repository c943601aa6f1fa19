#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bs/ore.hpp"
#include "bs/residue.hpp"

namespace bs {

struct TelescoperBounds {
    int max_order = 6;
    int max_degree = 12;          // t-degree of the operator coefficients
    int pole_order = 0;           // kappa; 0 picks multiplicity + order - 1
    int z_slack = 2;              // extra z-degree allowed in certificates
    std::size_t max_unknowns = 4000;
    double timeout_seconds = 0;   // 0: no limit
    int series_check_terms = 30;
};

struct TelescoperProblem {
    ResidueRep rep;  // one parameter, at index 0
    TelescoperBounds bounds;
    std::vector<Q> known_prefix;  // optional [t^n] values; extended from rep when short
};

// g_j = b[j] / F^kappa for residue variable j; the identity holds for left * op.
struct Certificate {
    MPoly F;
    int kappa = 0;
    std::vector<MPoly> b;
    MPoly left;  // polynomial in t; empty means 1
};

struct ProofRecord {
    DiffOp op;
    int order = 0, degree = 0, kappa = 0, z_slack = 0;
    std::size_t unknowns = 0;
    int primes = 0;
    int series_check_terms = 0;
    bool identity_checked = false;
    Certificate cert;
};

struct PicardFuchs {
    DiffOp op;
    ProofRecord record;
};

// Order-1 operator p q D - (p'q - p q') for y = p/q; y = 0 gives D and sets *was_zero.
DiffOp annihilator_of_rational(const RatFun& y, int var = 0, bool* was_zero = nullptr);

// Throws BudgetExceeded("telescoper not found within budget") when the search runs out.
PicardFuchs picard_fuchs(const TelescoperProblem& p);

std::optional<RecOp> guess_recurrence(const std::vector<Q>& prefix, int max_order, int max_degree);
// Differential equation with polynomial coefficients satisfied by the whole prefix.
std::optional<DiffOp> guess_ode(const std::vector<Q>& prefix, int max_order, int max_degree);

bool verify_telescoper(const DiffOp& op, const TelescoperProblem& p, const Certificate& cert);
// Exact identity sum c_i D^i R = sum_j d/dz_j (b_j / F^kappa), without the series check.
bool telescoping_identity_holds(const DiffOp& op, const ResidueRep& rep, const Certificate& cert);

std::vector<Q> residue_prefix(const ResidueRep& rep, int N);

}  // namespace bs
