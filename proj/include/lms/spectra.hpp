#ifndef LMS_SPECTRA_HPP
#define LMS_SPECTRA_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <lapacke.h>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "adjacency.hpp"
#include "cells.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace lms {

/// Empirical spectral distribution: all eigenvalues with uniform weight.
struct Esd {
    std::vector<double> values;  // sorted ascending
    int n = 0, d = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::string kind;
    std::string method;
};

struct MomentEstimate {
    int k = 0;
    double value = 0.0;
    double stderr_ = 0.0;
    std::string method;
};

namespace detail {

/// Eigenvalues of a dense symmetric matrix (row-major, size dim*dim).
/// The input buffer is overwritten.
inline void dsyev_inplace(std::vector<double>& a, std::size_t dim, std::vector<double>& out) {
    if (dim == 0) return;
    std::vector<double> w(dim);
    lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'L', (lapack_int)dim,
                                     a.data(), (lapack_int)dim, w.data());
    if (info != 0) throw std::runtime_error("eigensolver failed, info=" + std::to_string(info));
    out.insert(out.end(), w.begin(), w.end());
}

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) { parent[x] = parent[parent[x]]; x = parent[x]; }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a); b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace detail

/// All eigenvalues of the matrix, sorted ascending.  Uncentred kinds are
/// solved blockwise over connected components of the sparsity pattern
/// (exact); centred kinds are densified as a whole.
inline Esd eigenvalues_dense(const SparseSymMatrix& m, std::uint64_t dense_cap = 6000) {
    if (m.dim > dense_cap) throw CapExceeded("eigenvalues_dense: dimension exceeds dense cap");
    Esd esd;
    esd.n = m.n; esd.d = m.d; esd.p = m.p; esd.seed = m.seed;
    esd.kind = kind_name(m.kind);
    esd.method = "dense-exact";
    std::vector<double>& out = esd.values;
    out.reserve((std::size_t)m.dim);

    if (kind_is_centred(m.kind) && m.p != 0.0) {
        std::vector<double> dense = m.densify();
        detail::dsyev_inplace(dense, (std::size_t)m.dim, out);
        std::sort(out.begin(), out.end());
        return esd;
    }

    detail::UnionFind uf((std::size_t)m.dim);
    for (std::uint64_t r = 0; r < m.dim; ++r)
        for (const auto& e : m.rows[r]) uf.unite((std::uint32_t)r, e.first);
    std::vector<std::vector<std::uint32_t>> comps;
    {
        std::vector<std::int64_t> comp_of((std::size_t)m.dim, -1);
        for (std::uint64_t r = 0; r < m.dim; ++r) {
            if (m.rows[r].empty()) { out.push_back(0.0); continue; }
            std::uint32_t root = uf.find((std::uint32_t)r);
            if (comp_of[root] < 0) { comp_of[root] = (std::int64_t)comps.size(); comps.emplace_back(); }
            comps[(std::size_t)comp_of[root]].push_back((std::uint32_t)r);
        }
    }
    std::vector<double> block;
    for (const auto& comp : comps) {
        std::size_t cn = comp.size();
        std::vector<std::uint32_t> local((std::size_t)0);
        // comp is sorted by construction; map global -> local by binary search
        block.assign(cn * cn, 0.0);
        for (std::size_t i = 0; i < cn; ++i) {
            for (const auto& e : m.rows[comp[i]]) {
                std::size_t j = (std::size_t)(std::lower_bound(comp.begin(), comp.end(), e.first) - comp.begin());
                block[i * cn + j] = (double)e.second;
            }
        }
        detail::dsyev_inplace(block, cn, out);
    }
    std::sort(out.begin(), out.end());
    return esd;
}

inline MomentEstimate esd_moment(const Esd& esd, int k) {
    if (k < 0) throw std::invalid_argument("esd_moment: k must be >= 0");
    double acc = 0.0;
    for (double v : esd.values) acc += std::pow(v, k);
    MomentEstimate m;
    m.k = k;
    m.value = esd.values.empty() ? 0.0 : acc / (double)esd.values.size();
    m.stderr_ = 0.0;
    m.method = "dense-exact";
    return m;
}

namespace detail {

/// (M^k)_{oo} for the ball around one root cell, exploring lazily through
/// the presence oracle.  For centred kinds the ball is taken in the
/// complete line graph with entries w*(chi - p).
inline double root_walk_moment(const ComplexSample& sample, MatrixKind kind, int k,
                               std::uint64_t root_rank, std::uint64_t vertex_cap) {
    const int n = sample.n(), d = sample.d();
    const bool centred_kind = kind_is_centred(kind);
    const bool sgn = kind_is_signed(kind);
    const double p = centred_kind ? sample.p() : 0.0;
    const BinomTable& table = sample.table();
    int radius = (k + 1) / 2;

    std::vector<std::uint64_t> cells{root_rank};       // local id -> rank
    std::vector<int> depth{0};
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(1);
    std::unordered_map<std::uint64_t, std::uint32_t> local;
    local.emplace(root_rank, 0u);

    Cell cell, other;
    for (std::size_t cur = 0; cur < cells.size(); ++cur) {
        if (depth[cur] >= radius) continue;
        cell = cell_unrank(cells[cur], d);
        for (int v = 1; v <= n; ++v) {
            if (std::binary_search(cell.begin(), cell.end(), v)) continue;
            std::uint64_t tau_rank = table.rank_with_inserted(cell.data(), d, v);
            bool present = sample.contains_rank(tau_rank);
            if (!present && !centred_kind) continue;
            double chi = present ? 1.0 : 0.0;
            int iv = 0;
            while (iv < d && cell[iv] < v) ++iv;
            for (int j = 0; j < d; ++j) {
                other = cell;
                other[j] = v;
                std::sort(other.begin(), other.end());
                std::uint64_t orank = table.rank(other);
                std::uint32_t loc;
                auto it = local.find(orank);
                if (it == local.end()) {
                    if (cells.size() >= vertex_cap)
                        throw CapExceeded("root-walk ball exceeds vertex cap");
                    loc = (std::uint32_t)cells.size();
                    cells.push_back(orank);
                    depth.push_back(depth[cur] + 1);
                    adj.emplace_back();
                    local.emplace(orank, loc);
                } else {
                    loc = it->second;
                }
                // each undirected edge is stored once, by the endpoint that
                // expands first; closed walks from the root never traverse an
                // edge whose endpoints are both at the maximal depth
                if (loc <= cur) continue;
                int ju = j + (j >= iv ? 1 : 0);
                double w = sgn ? (double)parity_entry(iv, ju) : 1.0;
                double entry = centred_kind ? w * (chi - p) : w * chi;
                if (entry != 0.0) adj[cur].emplace_back(loc, entry);
            }
        }
    }

    std::vector<double> x(cells.size(), 0.0), y(cells.size(), 0.0);
    x[0] = 1.0;
    for (int step = 0; step < k; ++step) {
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t u = 0; u < cells.size(); ++u) {
            if (x[u] != 0.0)
                for (const auto& e : adj[u]) y[e.first] += e.second * x[u];
            for (const auto& e : adj[u])
                if (x[e.first] != 0.0) y[u] += e.second * x[e.first];
        }
        std::swap(x, y);
    }
    return x[0];
}

/// Exact centred walk sums for d = 2 when the centred ball is too large to
/// explore.  Writes B = A - p*K with K the adjacency of the complete complex
/// and keeps vectors in the form sparse + sum_x c_x*[x in cell] + delta.
class CentredD2Walker {
public:
    explicit CentredD2Walker(const ComplexSample& sample)
        : s_(sample), n_(sample.n()), dim_(sample.dim()), p_(sample.p()) {
        if (s_.d() != 2) throw std::invalid_argument("CentredD2Walker: d must be 2");
        c2_.assign((std::size_t)n_ + 1, 0);
        c3_.assign((std::size_t)n_ + 1, 0);
        for (std::uint64_t i = 2; i <= (std::uint64_t)n_; ++i) c2_[i] = i * (i - 1) / 2;
        for (std::uint64_t i = 3; i <= (std::uint64_t)n_; ++i) c3_[i] = c2_[i] * (i - 2) / 3;
        y1_.init(dim_, n_, c2_.data());
        y2_.init(dim_, n_, c2_.data());
    }

    /// (B^k)_{oo} for the centred unsigned matrix, k <= 4.
    double walk(int k, std::uint64_t root_rank) {
        if (k < 1 || k > 4) throw std::invalid_argument("CentredD2Walker: k must be in [1,4]");
        if (k == 1) return 0.0;
        if (k >= 3 && !tri_built_) build_triangles();
        auto [v, w] = pair_unrank(root_rank);

        y1_.clear();
        add_present_row(y1_, v, w, 1.0);
        y1_.add(v, w, 2.0 * p_);
        y1_.vadd(v, -p_);
        y1_.vadd(w, -p_);
        if (k == 2) return dot(y1_, y1_);

        y2_.clear();
        for (const auto& e : y1_.touched) {
            double c = y1_.val[e.rank];
            if (c == 0.0) continue;
            add_present_row(y2_, e.a, e.b, c);
            y2_.vadd(e.a, -p_ * c);
            y2_.vadd(e.b, -p_ * c);
            y2_.add(e.a, e.b, 2.0 * p_ * c);
        }
        for (int x : y1_.vtouched) {
            double cx = y1_.vcoef[x];
            if (cx == 0.0) continue;
            for (const auto& jk : tri_[x]) {
                int a = jk[0], b = jk[1];
                y2_.add(std::min(x, a), std::max(x, a), cx);
                y2_.add(std::min(x, b), std::max(x, b), cx);
                y2_.add(a, b, 2.0 * cx);
            }
            y2_.vadd(x, -p_ * cx * (double)(n_ - 4));
            y2_.all += -2.0 * p_ * cx;
        }
        return k == 3 ? dot(y1_, y2_) : dot(y2_, y2_);
    }

private:
    struct Touched {
        std::uint64_t rank;
        std::uint32_t a, b;
    };

    struct Overlay {
        std::vector<double> val;
        std::vector<char> inb;
        std::vector<Touched> touched;
        std::vector<double> vcoef;
        std::vector<char> vin;
        std::vector<int> vtouched;
        const std::uint64_t* c2 = nullptr;
        double all = 0.0;
        void init(std::uint64_t dim, int n, const std::uint64_t* c2_table) {
            val.assign(dim, 0.0);
            inb.assign(dim, 0);
            vcoef.assign((std::size_t)n + 1, 0.0);
            vin.assign((std::size_t)n + 1, 0);
            c2 = c2_table;
        }
        void clear() {
            for (const auto& e : touched) { val[e.rank] = 0.0; inb[e.rank] = 0; }
            touched.clear();
            for (int x : vtouched) { vcoef[x] = 0.0; vin[x] = 0; }
            vtouched.clear();
            all = 0.0;
        }
        void add(int a, int b, double x) {
            std::uint64_t r = (std::uint64_t)(a - 1) + c2[b - 1];
            if (!inb[r]) {
                inb[r] = 1;
                touched.push_back({r, (std::uint32_t)a, (std::uint32_t)b});
            }
            val[r] += x;
        }
        void vadd(int a, double x) {
            if (!vin[a]) { vin[a] = 1; vtouched.push_back(a); }
            vcoef[a] += x;
        }
    };

    std::pair<int, int> pair_unrank(std::uint64_t r) const {
        auto it = std::upper_bound(c2_.begin(), c2_.end(), r);
        int t = (int)(it - c2_.begin()) - 1;
        return {(int)(r - c2_[t]) + 1, t + 1};
    }
    std::uint64_t triple_rank(int a, int b, int c) const {
        return (std::uint64_t)(a - 1) + c2_[b - 1] + c3_[c - 1];
    }

    // overlay += coef * A e_{ab} over present triangles through {a,b}, a < b
    void add_present_row(Overlay& o, int a, int b, double coef) {
        for (int x = 1; x <= n_; ++x) {
            if (x == a || x == b) continue;
            int lo = std::min(x, a), hi = std::max(x, b), mid = a + b + x - lo - hi;
            if (!s_.contains_rank(triple_rank(lo, mid, hi))) continue;
            o.add(std::min(a, x), std::max(a, x), coef);
            o.add(std::min(b, x), std::max(b, x), coef);
        }
    }

    void build_triangles() {
        tri_.assign((std::size_t)n_ + 1, {});
        std::uint64_t rank = 0;
        for (int z = 3; z <= n_; ++z)
            for (int y = 2; y < z; ++y)
                for (int x = 1; x < y; ++x, ++rank)
                    if (s_.contains_rank(rank)) {
                        tri_[x].push_back({(std::uint16_t)y, (std::uint16_t)z});
                        tri_[y].push_back({(std::uint16_t)x, (std::uint16_t)z});
                        tri_[z].push_back({(std::uint16_t)x, (std::uint16_t)y});
                    }
        tri_built_ = true;
    }

    double dot(const Overlay& u, const Overlay& t) const {
        double su = 0, st = 0, sut = 0;
        for (int x : u.vtouched) { su += u.vcoef[x]; sut += u.vcoef[x] * t.vcoef[x]; }
        for (int x : t.vtouched) st += t.vcoef[x];
        double acc = (double)(n_ - 2) * sut + su * st + t.all * (double)(n_ - 1) * su +
                     u.all * (double)(n_ - 1) * st + (double)dim_ * u.all * t.all;
        for (const auto& e : u.touched) {
            double c = u.val[e.rank];
            if (c == 0.0) continue;
            acc += c * (t.val[e.rank] + t.vcoef[e.a] + t.vcoef[e.b] + t.all);
        }
        for (const auto& e : t.touched) {
            double c = t.val[e.rank];
            if (c == 0.0) continue;
            acc += c * (u.vcoef[e.a] + u.vcoef[e.b] + u.all);
        }
        return acc;
    }

    const ComplexSample& s_;
    int n_;
    std::uint64_t dim_;
    double p_;
    std::vector<std::uint64_t> c2_, c3_;
    std::vector<std::vector<std::array<std::uint16_t, 2>>> tri_;
    bool tri_built_ = false;
    Overlay y1_, y2_;
};

/// Upper bound on the exploration ball for the given kind, clamped at dim.
inline std::uint64_t ball_size_bound(const ComplexSample& sample, MatrixKind kind, int k) {
    int radius = (k + 1) / 2;
    double width = kind_is_centred(kind) ? (double)sample.d() * (double)(sample.n() - sample.d())
                                         : 0.0;
    if (!kind_is_centred(kind)) return 0;  // sparse balls are explored directly
    double total = 1.0, layer = 1.0;
    for (int i = 0; i < radius; ++i) {
        layer *= width;
        total += layer;
        if (total > (double)sample.dim()) return sample.dim();
    }
    return (std::uint64_t)total;
}

} // namespace detail

/// Monte Carlo estimate of the k-th ESD moment via the spectral measure of
/// uniformly sampled roots.
inline MomentEstimate moment_root_sampled(const ComplexSample& sample, MatrixKind kind,
                                          int k, std::uint64_t roots, std::uint64_t seed,
                                          std::uint64_t vertex_cap = 2000000) {
    if (k < 1) throw std::invalid_argument("moment_root_sampled: k must be >= 1");
    if (roots == 0) throw std::invalid_argument("moment_root_sampled: roots must be > 0");
    const std::uint64_t dim = sample.dim();
    std::vector<double> vals((std::size_t)roots, 0.0);
    if (kind_is_centred(kind) && detail::ball_size_bound(sample, kind, k) > vertex_cap) {
        if (kind != MatrixKind::CentredUnsigned || sample.d() != 2 || k > 4 ||
            sample.n() >= 65536)
            throw CapExceeded("root-walk ball exceeds vertex cap");
        detail::CentredD2Walker walker(sample);
        for (std::size_t i = 0; i < (std::size_t)roots; ++i) {
            Rng rng(derive_seed(seed, 0x726F6F74ULL, i));  // "root"
            vals[i] = walker.walk(k, rng.below(dim));
        }
    } else {
        parallel_for((std::size_t)roots, [&](std::size_t i) {
            Rng rng(derive_seed(seed, 0x726F6F74ULL, i));  // "root"
            std::uint64_t root_rank = rng.below(dim);
            vals[i] = detail::root_walk_moment(sample, kind, k, root_rank, vertex_cap);
        });
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= (double)roots;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = roots > 1 ? var / (double)(roots - 1) : 0.0;
    MomentEstimate m;
    m.k = k;
    m.value = mean;
    m.stderr_ = std::sqrt(var / (double)roots);
    m.method = "root-walk-sampled";
    return m;
}

/// ||M||_F / sqrt(dim), exact from the sparse structure; centred kinds add
/// the closed-form contribution of the implicit correction.
inline double frobenius_normalized(const SparseSymMatrix& m) {
    if (m.dim == 0) return 0.0;
    if (kind_is_centred(m.kind) && m.p != 0.0) {
        // every pattern position holds chi - p with chi = 1 exactly on the
        // stored entries; squares do not depend on the entry sign
        long double q = (long double)m.p;
        long double total_pairs = (long double)m.dim * (long double)m.d * (long double)(m.n - m.d);
        long double nz = (long double)m.nnz();
        long double tr2 = nz * (1.0L - q) * (1.0L - q) + (total_pairs - nz) * q * q;
        return (double)std::sqrt((double)(tr2 / (long double)m.dim));
    }
    long double acc = 0.0;
    for (const auto& row : m.rows)
        for (const auto& e : row) acc += (long double)e.second * (long double)e.second;
    return std::sqrt((double)(acc / (long double)m.dim));
}

/// ESD of -M from the ESD of M.
inline Esd reflect(const Esd& esd) {
    Esd out = esd;
    for (double& v : out.values) v = -v;
    std::sort(out.values.begin(), out.values.end());
    out.method = esd.method + "/reflected";
    return out;
}

/// Exact sup distance between the two empirical CDFs by merge scan.
inline double ks_distance(const Esd& a, const Esd& b) {
    if (a.values.empty() || b.values.empty())
        throw std::invalid_argument("ks_distance: empty input");
    const auto& x = a.values;
    const auto& y = b.values;
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < x.size() || j < y.size()) {
        double t;
        if (j >= y.size() || (i < x.size() && x[i] <= y[j])) t = x[i];
        else t = y[j];
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        double fa = (double)i / (double)x.size();
        double fb = (double)j / (double)y.size();
        best = std::max(best, std::fabs(fa - fb));
    }
    return best;
}

/// Moments of the standard semicircle law: Catalan numbers at even k.
inline double semicircle_moment(int k) {
    if (k < 0) throw std::invalid_argument("semicircle_moment: k >= 0");
    if (k % 2 == 1) return 0.0;
    return (double)catalan(k / 2);
}

/// m_k / (lambda*d)^{k/2} for comparison with semicircle moments.
inline double scaled_moment(double m_k, double lambda, int d, int k) {
    return m_k / std::pow(lambda * (double)d, (double)k / 2.0);
}

/// Root-sampled m_k rescaled by (lambda*d)^{k/2}; approaches the semicircle
/// moment as lambda grows.
inline double scaled_moment_check(const ComplexSample& sample, double lambda, int k,
                                  std::uint64_t roots, std::uint64_t seed,
                                  MatrixKind kind = MatrixKind::CentredUnsigned,
                                  std::uint64_t vertex_cap = 2000000) {
    MomentEstimate m = moment_root_sampled(sample, kind, k, roots, seed, vertex_cap);
    return scaled_moment(m.value, lambda, sample.d(), k);
}

/// Clusters of eigenvalues closer than tol, reported as (mean, mass) for
/// clusters holding at least two values.
inline std::vector<std::pair<double, double>> atom_detect(const Esd& esd, double tol = 1e-8) {
    std::vector<std::pair<double, double>> out;
    const auto& v = esd.values;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        double sum = v[i];
        while (j < v.size() && v[j] - v[j - 1] <= tol) { sum += v[j]; ++j; }
        if (j - i >= 2)
            out.emplace_back(sum / (double)(j - i), (double)(j - i) / (double)v.size());
        i = j;
    }
    return out;
}

enum class HistNorm { density, probability };

struct Histogram {
    std::vector<double> edges;
    std::vector<u64> counts;       // raw counts, summing to the ESD size
    std::vector<double> normalized;
    std::string mode;              // "density" or "probability"
};

/// Uniform-bin histogram over [min, max] widened by 1e-9.  Density mode
/// divides by total*binwidth, probability mode by total.
inline Histogram histogram(const Esd& esd, int bins, HistNorm mode = HistNorm::density) {
    if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
    if (esd.values.empty()) throw std::invalid_argument("histogram: empty ESD");
    Histogram h;
    h.mode = mode == HistNorm::density ? "density" : "probability";
    double lo = esd.values.front() - 1e-9;
    double hi = esd.values.back() + 1e-9;
    h.edges.resize((std::size_t)bins + 1);
    for (int i = 0; i <= bins; ++i)
        h.edges[(std::size_t)i] = lo + (hi - lo) * (double)i / (double)bins;
    h.counts.assign((std::size_t)bins, 0);
    for (double v : esd.values) {
        int b = (int)((v - lo) / (hi - lo) * (double)bins);
        if (b < 0) b = 0;
        if (b >= bins) b = bins - 1;
        ++h.counts[(std::size_t)b];
    }
    double total = (double)esd.values.size();
    double width = (hi - lo) / (double)bins;
    h.normalized.resize((std::size_t)bins);
    for (int i = 0; i < bins; ++i) {
        double c = (double)h.counts[(std::size_t)i];
        h.normalized[(std::size_t)i] = mode == HistNorm::density ? c / (total * width) : c / total;
    }
    return h;
}

} // namespace lms

#endif
