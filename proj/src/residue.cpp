#include "bs/residue.hpp"

namespace bs {

std::vector<std::string> ResidueRep::residue_vars() const {
    return std::vector<std::string>(ord.names.begin() + ord.param_count, ord.names.end());
}

namespace {

ExpVec residue_target(const ResidueRep& R) {
    ExpVec t(R.ord.size());
    for (int i = R.ord.param_count; i < R.ord.size(); ++i) t[i] = -1;
    return t;
}

}  // namespace

Q formal_residue_coeff(const ResidueRep& R, const std::vector<int>& n, CoeffExtractor* ex) {
    if (static_cast<int>(n.size()) != R.ord.param_count) throw MathError("formal_residue_coeff: wrong parameter count");
    ExpVec t = residue_target(R);
    for (std::size_t i = 0; i < n.size(); ++i) t[static_cast<int>(i)] = static_cast<int16_t>(n[i]);
    CoeffExtractor local;
    return (ex ? ex : &local)->extract(R.fun, t);
}

std::vector<Q> residue_series(const ResidueRep& R, int N, const std::vector<int>& others, CoeffExtractor* ex) {
    if (R.ord.param_count < 1) throw MathError("residue_series: no parameter");
    if (static_cast<int>(others.size()) != R.ord.param_count - 1) throw MathError("residue_series: wrong parameter count");
    ExpVec t = residue_target(R);
    for (std::size_t i = 0; i < others.size(); ++i) t[static_cast<int>(i) + 1] = static_cast<int16_t>(others[i]);
    CoeffExtractor local;
    return (ex ? ex : &local)->series(R.fun, 0, N, t);
}

}  // namespace bs
