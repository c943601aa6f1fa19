#include "bs/linalg.hpp"

#include <cmath>
#include <mutex>

namespace bs {

std::vector<std::vector<Q>> nullspace(std::vector<std::vector<Q>> A, int ncols) {
    std::vector<int> pivots;
    int row = 0;
    int nrows = static_cast<int>(A.size());
    for (int c = 0; c < ncols && row < nrows; ++c) {
        int sel = -1;
        for (int i = row; i < nrows; ++i)
            if (sgn(A[i][c]) != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(A[row], A[sel]);
        Q inv = 1 / A[row][c];
        for (int j = c; j < ncols; ++j) A[row][j] *= inv;
        for (int i = 0; i < nrows; ++i) {
            if (i == row || sgn(A[i][c]) == 0) continue;
            Q f = A[i][c];
            for (int j = c; j < ncols; ++j)
                if (sgn(A[row][j]) != 0) A[i][j] -= f * A[row][j];
        }
        pivots.push_back(c);
        ++row;
    }
    std::vector<bool> is_pivot(ncols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<std::vector<Q>> basis;
    for (int f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Q> v(ncols, Q(0));
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -A[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

uint64_t inv_mod(uint64_t a, uint64_t p) {
    int64_t t = 0, nt = 1, r = static_cast<int64_t>(p), nr = static_cast<int64_t>(a % p);
    while (nr != 0) {
        int64_t q = r / nr;
        std::swap(t, nt);
        nt -= q * t;
        std::swap(r, nr);
        nr -= q * r;
    }
    if (r != 1) throw MathError("inv_mod: not invertible");
    return static_cast<uint64_t>(t < 0 ? t + static_cast<int64_t>(p) : t);
}

uint64_t q_mod(const Q& q, uint64_t p) {
    Z P(static_cast<unsigned long>(p));
    Z n = q.get_num() % P, d = q.get_den() % P;
    if (n < 0) n += P;
    if (d == 0) throw MathError("q_mod: denominator vanishes");
    return n.get_ui() * inv_mod(d.get_ui(), p) % p;
}

uint64_t nth_prime(int k) {
    static std::vector<uint64_t> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> g(mu);
    while (static_cast<int>(cache.size()) <= k) {
        Z x = cache.empty() ? Z(2147483647UL) : Z(static_cast<unsigned long>(cache.back() - 1));
        while (mpz_probab_prime_p(x.get_mpz_t(), 30) == 0) x -= 1;
        cache.push_back(x.get_ui());
    }
    return cache[static_cast<std::size_t>(k)];
}

ModRref rref_mod(ModMatrix m, const std::function<void()>& check) {
    ModRref out{{}, std::move(m)};
    ModMatrix& A = out.m;
    const uint64_t p = A.p;
    int row = 0;
    for (int c = 0; c < A.cols && row < A.rows; ++c) {
        if (check) check();
        int sel = -1;
        for (int i = row; i < A.rows; ++i)
            if (A.at(i, c) != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != row)
            for (int j = 0; j < A.cols; ++j) std::swap(A.at(row, j), A.at(sel, j));
        uint64_t inv = inv_mod(A.at(row, c), p);
        uint64_t* pr = &A.a[static_cast<std::size_t>(row) * A.cols];
        for (int j = c; j < A.cols; ++j) pr[j] = pr[j] * inv % p;
        // columns right of c that are nonzero in the pivot row
        std::vector<int> nz;
        for (int j = c; j < A.cols; ++j)
            if (pr[j] != 0) nz.push_back(j);
        for (int i = 0; i < A.rows; ++i) {
            if (i == row) continue;
            uint64_t* ri = &A.a[static_cast<std::size_t>(i) * A.cols];
            uint64_t f = ri[c];
            if (f == 0) continue;
            uint64_t nf = p - f;
            for (int j : nz) ri[j] = (ri[j] + nf * pr[j]) % p;
        }
        out.pivots.push_back(c);
        ++row;
    }
    return out;
}

std::vector<uint64_t> kernel_vector(const ModRref& r, int free_col) {
    const ModMatrix& A = r.m;
    std::vector<uint64_t> v(static_cast<std::size_t>(A.cols), 0);
    v[static_cast<std::size_t>(free_col)] = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) {
        uint64_t x = A.at(static_cast<int>(i), free_col);
        v[static_cast<std::size_t>(r.pivots[i])] = x == 0 ? 0 : A.p - x;
    }
    return v;
}

std::optional<Q> rational_reconstruct(const Z& a, const Z& m) {
    Z bound;
    mpz_sqrt(bound.get_mpz_t(), Z(m / 2).get_mpz_t());
    Z r0 = m, r1 = a % m, s0 = 0, s1 = 1;
    if (r1 < 0) r1 += m;
    while (r1 > bound) {
        Z q = r0 / r1;
        Z r2 = r0 - q * r1, s2 = s0 - q * s1;
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if (abs(s1) > bound || s1 == 0) return std::nullopt;
    Z g;
    mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), s1.get_mpz_t());
    if (g != 1) return std::nullopt;
    Q out(r1, s1);
    out.canonicalize();
    return out;
}

}  // namespace bs
