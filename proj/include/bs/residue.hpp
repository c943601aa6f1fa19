#pragma once

#include <string>
#include <vector>

#include "bs/laurent.hpp"

namespace bs {

// Generating function carried as res_{z} fun, parameters first in ord.
struct ResidueRep {
    RatFun fun;
    VarOrder ord;

    int params() const { return ord.param_count; }
    int residue_count() const { return ord.size() - ord.param_count; }
    std::vector<std::string> residue_vars() const;
    std::string fun_string() const { return fun.to_string(ord.names); }
};

// [t^n] res_z fun
Q formal_residue_coeff(const ResidueRep& R, const std::vector<int>& n, CoeffExtractor* ex = nullptr);

// First N coefficients in the first parameter; remaining parameters take the
// exponents in `others` (one per parameter after the first).
std::vector<Q> residue_series(const ResidueRep& R, int N, const std::vector<int>& others = {},
                              CoeffExtractor* ex = nullptr);

}  // namespace bs
