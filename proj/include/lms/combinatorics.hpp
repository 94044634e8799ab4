#ifndef LMS_COMBINATORICS_HPP
#define LMS_COMBINATORICS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lms {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Exact binomial coefficient with 128-bit intermediates.
/// Returns 0 when k < 0 or k > n.
inline u128 binom_u128(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    u128 r = 1;
    for (long long i = 1; i <= k; ++i) {
        u128 f = (u128)(n - k + i);
        if (r != 0 && f > (u128)-1 / r)
            throw std::overflow_error("binom_u128: intermediate exceeds 128 bits");
        r = r * f;
        r = r / (u128)i;
    }
    return r;
}

/// Binomial coefficient as u64; throws std::overflow_error if the value
/// does not fit.
inline u64 binom(long long n, long long k) {
    u128 r = binom_u128(n, k);
    if (r > (u128)UINT64_MAX)
        throw std::overflow_error("binom: value exceeds 64 bits");
    return (u64)r;
}

/// Product with overflow detection.
inline u128 mul_checked(u128 a, u128 b) {
    if (a != 0 && b > (u128)-1 / a)
        throw std::overflow_error("mul_checked: 128-bit overflow");
    return a * b;
}

/// Catalan number C_m.
inline u64 catalan(int m) {
    if (m < 0) throw std::invalid_argument("catalan: m must be >= 0");
    return binom(2LL * m, m) / (u64)(m + 1);
}

inline std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back((char)('0' + (int)(v % 10)));
        v /= 10;
    }
    return std::string(s.rbegin(), s.rend());
}

/// A cell is a strictly increasing list of 1-based vertex ids.
using Cell = std::vector<int>;

/// Colexicographic rank of a cell: sum over positions i (1-based) of
/// binom(v_i - 1, i).  Ranks run from 0 to binom(n, |cell|) - 1 and do
/// not depend on n.
inline u64 cell_rank(const Cell& c) {
    u64 r = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        r += binom(c[i] - 1, (long long)i + 1);
    return r;
}

/// Inverse of cell_rank for cells of size m.
inline Cell cell_unrank(u64 rank, int m) {
    Cell c((std::size_t)m);
    for (int i = m; i >= 1; --i) {
        // largest w with binom(w, i) <= rank; element is w + 1
        long long w = i - 1;
        u128 cur = 0;  // binom(w, i)
        for (;;) {
            u128 nxt = (w + 1 == i) ? 1 : cur * (u128)(w + 1) / (u128)(w + 1 - i);
            if (nxt > (u128)rank) break;
            cur = nxt;
            ++w;
        }
        c[(std::size_t)i - 1] = (int)(w + 1);
        rank -= (u64)cur;
    }
    return c;
}

/// Precomputed table of binom(v, j) for 0 <= v <= n, 0 <= j <= k_max.
/// Used on hot paths where cells are ranked millions of times.
class BinomTable {
public:
    BinomTable() : n_(0), kmax_(0) {}
    BinomTable(int n, int k_max) : n_(n), kmax_(k_max), t_((std::size_t)(n + 1) * (std::size_t)(k_max + 1)) {
        for (int v = 0; v <= n; ++v)
            for (int j = 0; j <= k_max; ++j)
                t_[idx(v, j)] = binom(v, j);
    }

    u64 at(int v, int j) const {
        if (j < 0 || j > kmax_ || v < 0) return 0;
        if (v > n_) throw std::out_of_range("BinomTable: v out of range");
        return t_[idx(v, j)];
    }

    u64 rank(const Cell& c) const {
        u64 r = 0;
        for (std::size_t i = 0; i < c.size(); ++i)
            r += at(c[i] - 1, (int)i + 1);
        return r;
    }

    /// Rank of cell "base with v inserted", |base| == m, v not in base.
    u64 rank_with_inserted(const int* base, int m, int v) const {
        u64 r = 0;
        int pos = 1;
        int i = 0;
        bool placed = false;
        while (i < m || !placed) {
            int x;
            if (!placed && (i == m || v < base[i])) { x = v; placed = true; }
            else { x = base[i]; ++i; }
            r += at(x - 1, pos);
            ++pos;
        }
        return r;
    }

    int n() const { return n_; }

private:
    std::size_t idx(int v, int j) const { return (std::size_t)v * (std::size_t)(kmax_ + 1) + (std::size_t)j; }
    int n_, kmax_;
    std::vector<u64> t_;
};

/// The m facets of a cell, in drop-position order: facet i omits c[i].
inline std::vector<Cell> boundary(const Cell& c) {
    std::vector<Cell> out;
    out.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        Cell f;
        f.reserve(c.size() - 1);
        for (std::size_t j = 0; j < c.size(); ++j)
            if (j != i) f.push_back(c[j]);
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace lms

#endif
