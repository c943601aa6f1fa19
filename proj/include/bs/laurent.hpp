#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "bs/ratfun.hpp"

namespace bs {

// Unevaluated sum of rational functions with rational weights. Terms with the
// same factored shape are merged; no common denominators are formed.
class LinComb {
public:
    LinComb() = default;
    explicit LinComb(int nvars) : n_(nvars) {}

    static LinComb of(const RatFun& r);

    int nvars() const { return n_; }
    void add(const RatFun& r, const Q& w = Q(1));
    void add(const LinComb& o, const Q& w = Q(1));
    LinComb times(const RatFun& r) const;
    LinComb times(const LinComb& o) const;

    bool is_zero() const;
    std::size_t size() const;
    // (shape with unit constant, weight), zero weights skipped
    std::vector<std::pair<RatFun, Q>> terms() const;
    RatFun sum() const;
    // Valid only when every term is constant.
    Q constant_value() const;

private:
    int n_ = 0;
    std::vector<std::pair<RatFun, Q>> items_;
    std::unordered_map<std::size_t, std::vector<std::size_t>> index_;
};

// Truncated expansion of a rational function in one variable.
struct LaurentPrefix {
    int var = 0;
    std::map<int, RatFun> coeffs;
    int order = 0;  // every stored exponent is < order
};

// Coefficient extraction in the iterated Laurent field, smallest variable
// first. Per-factor power series are memoized for the lifetime of the object.
class CoeffExtractor {
public:
    explicit CoeffExtractor(std::size_t term_budget = 200'000'000);
    ~CoeffExtractor();
    CoeffExtractor(const CoeffExtractor&) = delete;
    CoeffExtractor& operator=(const CoeffExtractor&) = delete;

    // Coefficients of v^lo .. v^hi. v must be the smallest variable R depends on
    // among those still present.
    std::vector<LinComb> coeffs(const RatFun& R, int v, int lo, int hi);
    LinComb coeff(const RatFun& R, int v, int m);
    LinComb coeff(const LinComb& L, int v, int m);

    // Scalar coefficient of z^target, eliminating variables 0, 1, ... in turn.
    Q extract(const RatFun& R, const ExpVec& target);
    Q extract_from(const LinComb& L, const ExpVec& target, int first_var);

    // [v^k] followed by extraction of the remaining variables, for k = 0..N-1.
    std::vector<Q> series(const RatFun& R, int v, int N, const ExpVec& rest_target);

    std::size_t work() const { return work_; }

private:
    struct Series;
    std::size_t budget_;
    std::size_t work_ = 0;
    std::unordered_map<std::size_t, std::vector<std::unique_ptr<Series>>> cache_;

    Series& series_for(const FactorRef& f, int e, int v);
    void extend(Series& s, int K);
    void charge(std::size_t n);
    // base * prod of dependent factor series, split out
    void split(const RatFun& R, int v, RatFun& base, std::vector<Series*>& dep, int& shift);
};

LaurentPrefix laurent_expand(const RatFun& R, int v, int n_terms);
Q coeff_extract(const RatFun& R, const ExpVec& target);

}  // namespace bs
