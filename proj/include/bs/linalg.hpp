#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bs/poly.hpp"

namespace bs {

// Basis of {x : A x = 0} over Q, one vector per free column (RREF order).
std::vector<std::vector<Q>> nullspace(std::vector<std::vector<Q>> A, int ncols);

// Dense matrix over Z/p, p < 2^32.
struct ModMatrix {
    uint64_t p = 0;
    int rows = 0, cols = 0;
    std::vector<uint64_t> a;  // row-major

    ModMatrix(uint64_t prime, int r, int c) : p(prime), rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}
    uint64_t& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    uint64_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

struct ModRref {
    std::vector<int> pivots;  // pivot column of each nonzero row, ascending
    ModMatrix m;
};

// Reduced row echelon form; check is polled between pivots and may throw.
ModRref rref_mod(ModMatrix m, const std::function<void()>& check = {});
// Kernel basis vector attached to a free column.
std::vector<uint64_t> kernel_vector(const ModRref& r, int free_col);

uint64_t inv_mod(uint64_t a, uint64_t p);
uint64_t q_mod(const Q& q, uint64_t p);  // throws when the denominator vanishes mod p
// Primes just below 2^31, deterministic sequence.
uint64_t nth_prime(int k);

// r/s with r == s*a mod m and |r|, |s| <= sqrt(m/2).
std::optional<Q> rational_reconstruct(const Z& a, const Z& m);

}  // namespace bs
