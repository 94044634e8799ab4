#ifndef LMS_ADJACENCY_HPP
#define LMS_ADJACENCY_HPP

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cells.hpp"
#include "combinatorics.hpp"
#include "parallel.hpp"

namespace lms {

enum class MatrixKind {
    Unsigned,
    Signed,
    CentredUnsigned,
    CentredSigned,
    CompleteUnsigned,
    CompleteSigned,
};

inline const char* kind_name(MatrixKind k) {
    switch (k) {
        case MatrixKind::Unsigned: return "unsigned";
        case MatrixKind::Signed: return "signed";
        case MatrixKind::CentredUnsigned: return "centred-unsigned";
        case MatrixKind::CentredSigned: return "centred-signed";
        case MatrixKind::CompleteUnsigned: return "complete-unsigned";
        case MatrixKind::CompleteSigned: return "complete-signed";
    }
    return "?";
}

inline MatrixKind kind_from_name(const std::string& s) {
    if (s == "unsigned") return MatrixKind::Unsigned;
    if (s == "signed") return MatrixKind::Signed;
    if (s == "centred-unsigned") return MatrixKind::CentredUnsigned;
    if (s == "centred-signed") return MatrixKind::CentredSigned;
    if (s == "complete-unsigned") return MatrixKind::CompleteUnsigned;
    if (s == "complete-signed") return MatrixKind::CompleteSigned;
    throw std::invalid_argument("unknown matrix kind: " + s);
}

inline bool kind_is_centred(MatrixKind k) {
    return k == MatrixKind::CentredUnsigned || k == MatrixKind::CentredSigned;
}

inline bool kind_is_signed(MatrixKind k) {
    return k == MatrixKind::Signed || k == MatrixKind::CentredSigned ||
           k == MatrixKind::CompleteSigned;
}

/// Entry sign for two cells sharing d-1 vertices: i and j are the 0-based
/// positions of the removed vertices in their sorted union; the entry is +1
/// when the positions have different parity and -1 otherwise.
inline int parity_entry(int i, int j) { return ((i + j) & 1) ? 1 : -1; }

/// Symmetric adjacency matrix over (d-1)-cells, stored as sorted sparse
/// rows.  Centred kinds keep the sparse rows of the uncentred matrix and
/// apply the -p * (complete matrix) correction on the fly.
class SparseSymMatrix {
public:
    int n = 0, d = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    MatrixKind kind = MatrixKind::Unsigned;
    std::uint64_t dim = 0;
    std::vector<std::vector<std::pair<std::uint32_t, std::int8_t>>> rows;

    std::uint64_t nnz() const {
        std::uint64_t c = 0;
        for (const auto& r : rows) c += r.size();
        return c;
    }

    /// y = M x, including the centring correction for centred kinds.
    std::vector<double> matvec(const std::vector<double>& x) const {
        if (x.size() != dim) throw std::invalid_argument("matvec: size mismatch");
        std::vector<double> y(dim, 0.0);
        for (std::uint64_t r = 0; r < dim; ++r) {
            double acc = 0.0;
            for (const auto& e : rows[r]) acc += (double)e.second * x[e.first];
            y[r] = acc;
        }
        if (kind_is_centred(kind) && p != 0.0) {
            bool sgn = kind_is_signed(kind);
            BinomTable table(n, d);
            int deg = d;
            std::vector<int> cell, other;
            for (std::uint64_t r = 0; r < dim; ++r) {
                cell = cell_unrank(r, deg);
                double acc = 0.0;
                for (int v = 1; v <= n; ++v) {
                    if (std::binary_search(cell.begin(), cell.end(), v)) continue;
                    int iv = 0;
                    while (iv < deg && cell[iv] < v) ++iv;
                    for (int j = 0; j < deg; ++j) {
                        other = cell;
                        other[j] = v;
                        std::sort(other.begin(), other.end());
                        int ju = j + (j >= iv ? 1 : 0);
                        double w = sgn ? (double)parity_entry(iv, ju) : 1.0;
                        acc += w * x[table.rank(other)];
                    }
                }
                y[r] -= p * acc;
            }
        }
        return y;
    }

    /// Dense row-major copy (centring applied).  Caller is responsible for
    /// keeping dim within memory budgets.
    std::vector<double> densify() const {
        std::size_t N = (std::size_t)dim;
        std::vector<double> m(N * N, 0.0);
        if (!kind_is_centred(kind) || p == 0.0) {
            for (std::uint64_t r = 0; r < dim; ++r)
                for (const auto& e : rows[r]) m[(std::size_t)r * N + e.first] = (double)e.second;
            return m;
        }
        bool sgn = kind_is_signed(kind);
        PresenceOracle oracle(p, seed);
        BinomTable table(n, d + 1);
        for (std::uint64_t r = 0; r < dim; ++r) {
            Cell cell = cell_unrank(r, d);
            for (int v = 1; v <= n; ++v) {
                if (std::binary_search(cell.begin(), cell.end(), v)) continue;
                int iv = 0;
                while (iv < d && cell[iv] < v) ++iv;
                std::uint64_t tau_rank = table.rank_with_inserted(cell.data(), d, v);
                double chi = oracle.present(tau_rank) ? 1.0 : 0.0;
                Cell other = cell;
                for (int j = 0; j < d; ++j) {
                    other = cell;
                    other[j] = v;
                    std::sort(other.begin(), other.end());
                    int ju = j + (j >= iv ? 1 : 0);
                    double w = sgn ? (double)parity_entry(iv, ju) : 1.0;
                    m[(std::size_t)r * N + table.rank(other)] = w * (chi - p);
                }
            }
        }
        return m;
    }
};

namespace detail {

inline SparseSymMatrix build_adjacency(const ComplexSample& sample, bool with_sign,
                                       MatrixKind kind) {
    SparseSymMatrix m;
    m.n = sample.n();
    m.d = sample.d();
    m.p = sample.p();
    m.seed = sample.seed();
    m.kind = kind;
    m.dim = sample.dim();
    m.rows.resize(m.dim);
    const BinomTable& table = sample.table();
    const int n = m.n, d = m.d;
    parallel_for((std::size_t)m.dim, [&](std::size_t r) {
        Cell cell = cell_unrank(r, d);
        auto& row = m.rows[r];
        Cell other(cell.size());
        for (int v = 1; v <= n; ++v) {
            if (std::binary_search(cell.begin(), cell.end(), v)) continue;
            std::uint64_t tau_rank = table.rank_with_inserted(cell.data(), d, v);
            if (!sample.contains_rank(tau_rank)) continue;
            int iv = 0;
            while (iv < d && cell[iv] < v) ++iv;
            for (int j = 0; j < d; ++j) {
                other = cell;
                other[j] = v;
                std::sort(other.begin(), other.end());
                int ju = j + (j >= iv ? 1 : 0);
                std::int8_t val = 1;
                if (with_sign) val = (std::int8_t)parity_entry(iv, ju);
                row.emplace_back((std::uint32_t)table.rank(other), val);
            }
        }
        std::sort(row.begin(), row.end());
    });
    return m;
}

} // namespace detail

inline SparseSymMatrix unsigned_adjacency(const ComplexSample& sample) {
    return detail::build_adjacency(sample, false, MatrixKind::Unsigned);
}

inline SparseSymMatrix signed_adjacency(const ComplexSample& sample) {
    return detail::build_adjacency(sample, true, MatrixKind::Signed);
}

/// B = A - p*(complete matrix); the correction stays implicit.
inline SparseSymMatrix centred(const SparseSymMatrix& matrix, const ComplexSample& sample) {
    if (matrix.kind != MatrixKind::Unsigned && matrix.kind != MatrixKind::Signed)
        throw std::invalid_argument("centred: input must be an uncentred sampled matrix");
    SparseSymMatrix b = matrix;
    b.p = sample.p();
    b.seed = sample.seed();
    b.kind = matrix.kind == MatrixKind::Unsigned ? MatrixKind::CentredUnsigned
                                                 : MatrixKind::CentredSigned;
    return b;
}

/// Adjacency of the complete complex (every d-cell present).
inline SparseSymMatrix complete_matrix(int n, int d, bool with_sign) {
    ComplexSample s(n, d, 1.0, 0, SampleMode::lazy);
    return detail::build_adjacency(
        s, with_sign, with_sign ? MatrixKind::CompleteSigned : MatrixKind::CompleteUnsigned);
}

/// One-stop construction of any matrix kind from a sample.  Complete kinds
/// ignore the sample's presence draw and use only its (n, d).
inline SparseSymMatrix build_adjacency(const ComplexSample& sample, MatrixKind kind) {
    switch (kind) {
        case MatrixKind::Unsigned: return unsigned_adjacency(sample);
        case MatrixKind::Signed: return signed_adjacency(sample);
        case MatrixKind::CentredUnsigned: return centred(unsigned_adjacency(sample), sample);
        case MatrixKind::CentredSigned: return centred(signed_adjacency(sample), sample);
        case MatrixKind::CompleteUnsigned: return complete_matrix(sample.n(), sample.d(), false);
        case MatrixKind::CompleteSigned: return complete_matrix(sample.n(), sample.d(), true);
    }
    throw std::invalid_argument("build_adjacency: unknown kind");
}

using EigenSystem = std::vector<std::pair<double, u64>>;

inline u64 eigensystem_dim(const EigenSystem& es) {
    u64 t = 0;
    for (const auto& e : es) t += e.second;
    return t;
}

/// Closed-form spectrum of the complete unsigned matrix: eigenvalues
/// alpha_s for s = 0..d with multiplicity C(n,s) - C(n,s-1).
inline EigenSystem complete_unsigned_eigs(int n, int d) {
    if (n < 2 * d) throw std::invalid_argument("complete_unsigned_eigs: requires n >= 2d");
    EigenSystem out;
    for (int s = 0; s <= d; ++s) {
        long long alpha = 0;
        int rmax = std::min(s, d - 1);
        for (int r = s - 1; r <= rmax; ++r) {
            if (r < 0) continue;
            long long term = (long long)binom(s, r) * (long long)(d - r) *
                             (long long)binom(n - d - s + r, 1 - s + r);
            alpha += ((s - r) & 1) ? -term : term;
        }
        u64 mult = binom(n, s) - (s >= 1 ? binom(n, s - 1) : 0);
        if (mult == 0) continue;
        bool merged = false;
        for (auto& e : out)
            if (e.first == (double)alpha) { e.second += mult; merged = true; break; }
        if (!merged) out.emplace_back((double)alpha, mult);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Closed-form spectrum of the complete signed matrix:
/// n-d with multiplicity C(n-1,d-1) and -d with multiplicity C(n-1,d).
inline EigenSystem complete_signed_eigs(int n, int d) {
    if (n < d + 1) throw std::invalid_argument("complete_signed_eigs: requires n >= d+1");
    EigenSystem out;
    out.emplace_back((double)(-d), binom(n - 1, d));
    out.emplace_back((double)(n - d), binom(n - 1, d - 1));
    std::sort(out.begin(), out.end());
    return out;
}

/// Coordinate-format export of the stored sparse entries (upper triangle).
inline void export_coordinate(const SparseSymMatrix& m, std::ostream& os) {
    os << "%lm-spectra sym " << m.n << " " << m.d << " " << m.p << " " << m.seed
       << " " << kind_name(m.kind) << "\n";
    for (std::uint64_t r = 0; r < m.dim; ++r)
        for (const auto& e : m.rows[r])
            if (e.first > r) os << r << " " << e.first << " " << (int)e.second << "\n";
}

} // namespace lms

#endif
