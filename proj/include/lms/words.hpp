#ifndef LMS_WORDS_HPP
#define LMS_WORDS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "adjacency.hpp"
#include "combinatorics.hpp"
#include "parallel.hpp"

namespace lms {

/// A word is a sequence of (d-1)-cells in which every consecutive union is
/// a d-cell.  It is closed when the last letter equals the first.
using Word = std::vector<Cell>;

inline void validate_word(const Word& w) {
    if (w.empty()) throw std::invalid_argument("word: empty");
    std::size_t d = w.front().size();
    if (d == 0) throw std::invalid_argument("word: empty letters");
    for (const auto& c : w) {
        if (c.size() != d) throw std::invalid_argument("word: letters of unequal size");
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] < 1) throw std::invalid_argument("word: vertex ids must be >= 1");
            if (i > 0 && c[i] <= c[i - 1])
                throw std::invalid_argument("word: letters must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        Cell u;
        std::set_union(w[i].begin(), w[i].end(), w[i + 1].begin(), w[i + 1].end(),
                       std::back_inserter(u));
        if (u.size() != d + 1)
            throw std::invalid_argument("word: consecutive letters must span a cell one larger");
    }
}

inline bool is_closed(const Word& w) {
    return w.size() >= 2 && w.front() == w.back();
}

struct WordSupports {
    std::set<int> supp0;
    std::map<Cell, int> crossings;  // d-cell -> N_w(tau)
};

inline WordSupports word_supports(const Word& w) {
    validate_word(w);
    WordSupports s;
    for (const auto& c : w) s.supp0.insert(c.begin(), c.end());
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        Cell u;
        std::set_union(w[i].begin(), w[i].end(), w[i + 1].begin(), w[i + 1].end(),
                       std::back_inserter(u));
        ++s.crossings[u];
    }
    return s;
}

/// Relabels vertices in first-appearance order, minimising over the d!
/// label assignments of the first letter.  Equivalent words share one
/// canonical form.
inline Word canonicalize(const Word& w) {
    validate_word(w);
    Cell base = w.front();
    Word best;
    do {
        std::map<int, int> eta;
        int next = 1;
        for (int v : base) eta[v] = next++;
        for (const auto& c : w)
            for (int v : c)
                if (!eta.count(v)) eta[v] = next++;
        Word out;
        out.reserve(w.size());
        for (const auto& c : w) {
            Cell m;
            m.reserve(c.size());
            for (int v : c) m.push_back(eta[v]);
            std::sort(m.begin(), m.end());
            out.push_back(std::move(m));
        }
        if (best.empty() || out < best) best = std::move(out);
    } while (std::next_permutation(base.begin(), base.end()));
    return best;
}

/// Labelled-path encoding: step i maps to (eta(x_i), eta(y_i)) where x_i is
/// the vertex dropped from letter i and y_i the vertex added.  Words are
/// equivalent exactly when their label sequences agree.
inline std::vector<std::pair<int, int>> canonical_label(const Word& w) {
    Word cw = canonicalize(w);
    std::vector<std::pair<int, int>> label;
    label.reserve(cw.size() - 1);
    for (std::size_t i = 0; i + 1 < cw.size(); ++i) {
        Cell dropped, added;
        std::set_difference(cw[i].begin(), cw[i].end(), cw[i + 1].begin(), cw[i + 1].end(),
                            std::back_inserter(dropped));
        std::set_difference(cw[i + 1].begin(), cw[i + 1].end(), cw[i].begin(), cw[i].end(),
                            std::back_inserter(added));
        label.emplace_back(dropped.at(0), added.at(0));
    }
    return label;
}

/// Product over all crossings of the signed-adjacency entry between the two
/// letters: the entry is +1 when the two removed positions in the spanned
/// cell have different parity and -1 when they agree.
inline int sign_of_word(const Word& w) {
    validate_word(w);
    if (!is_closed(w)) throw std::invalid_argument("sign_of_word: word must be closed");
    int sgn = 1;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        Cell u;
        std::set_union(w[i].begin(), w[i].end(), w[i + 1].begin(), w[i + 1].end(),
                       std::back_inserter(u));
        int pos_dropped = -1, pos_added = -1;
        for (std::size_t t = 0; t < u.size(); ++t) {
            bool in_cur = std::binary_search(w[i].begin(), w[i].end(), u[t]);
            bool in_next = std::binary_search(w[i + 1].begin(), w[i + 1].end(), u[t]);
            if (in_cur && !in_next) pos_dropped = (int)t;
            if (!in_cur && in_next) pos_added = (int)t;
        }
        sgn *= parity_entry(pos_dropped, pos_added);
    }
    return sgn;
}

/// beta_k(lambda) as integer coefficients of lambda^{s-d}.
struct MomentPolynomial {
    int d = 0, k = 0;
    std::map<int, u64> coefficients;  // s -> |W~_s^k|

    double operator()(double lambda) const {
        double acc = 0.0;
        for (const auto& [s, c] : coefficients) {
            double term = (double)c;
            for (int i = 0; i < s - d; ++i) term *= lambda;
            acc += term;
        }
        return acc;
    }
};

struct WordEnumOptions {
    /// Cap on distinct vertices; 0 means the provable bound floor(k/2)+d.
    int max_support = 0;
    /// Count only words whose every prefix keeps |supp_d| = |supp_0| - d.
    /// Counted words are then certainly in the restricted family, so the
    /// result is a lower bound for it (exact in every case checked); the
    /// unrestricted counts are not produced in this mode.
    bool balanced_prefixes_only = false;
    bool parallel = true;
};

struct WordEnumResult {
    int d = 0, k = 0;
    std::map<int, u64> full;   // s -> |W_s^k|
    std::map<int, u64> tilde;  // s -> |W~_s^k|
};

namespace detail {

struct WordDfs {
    int d, k, s_cap;
    bool balanced_only;
    std::vector<Cell> letters;  // letters[0..k], letters[j] current at depth j
    int s_cur = 0;
    struct Tau { u64 key; int count; };
    std::vector<Tau> taus;
    int ones = 0;  // taus crossed exactly once so far
    std::map<int, u64> full, tilde;
    const std::function<void(const Word&, int, bool)>* visitor = nullptr;

    WordDfs(int d_, int k_, int cap, bool balanced)
        : d(d_), k(k_), s_cap(cap), balanced_only(balanced) {
        letters.assign((std::size_t)k + 1, Cell((std::size_t)d));
        for (int i = 0; i < d; ++i) letters[0][(std::size_t)i] = i + 1;
        s_cur = d;
        taus.reserve((std::size_t)k);
    }

    u64 tau_key(const Cell& c, int v) const {
        u64 key = 0;
        int shift = 0;
        bool placed = false;
        for (std::size_t i = 0; i < c.size() || !placed; ) {
            int x;
            if (!placed && (i == c.size() || v < c[i])) { x = v; placed = true; }
            else { x = c[i]; ++i; }
            key |= (u64)x << shift;
            shift += 5;
        }
        return key;
    }

    int find_tau(u64 key) const {
        for (std::size_t i = 0; i < taus.size(); ++i)
            if (taus[i].key == key) return (int)i;
        return -1;
    }

    void leaf() {
        // the closing prune guarantees letters[k] == letters[0] and the
        // once-crossed prune guarantees every stored count is >= 2
        int s = s_cur;
        if (s > (int)taus.size() + d)
            throw std::logic_error("word enumeration: support bound violated");
        bool balanced = (int)taus.size() == s - d;
        if (!balanced_only) ++full[s];
        if (balanced) ++tilde[s];
        if (visitor && *visitor) {
            Word w(letters.begin(), letters.end());
            (*visitor)(w, s, balanced);
        }
    }

    void run(int j, std::uint32_t mask) {
        if (j == k) { leaf(); return; }
        const int remaining = k - (j + 1);
        const std::uint32_t low = ((std::uint32_t)1 << (d + 1)) - 2;  // bits 1..d
        const Cell cur = letters[(std::size_t)j];
        const bool allow_fresh = s_cur < s_cap;
        for (int v = 1; v <= s_cur + (allow_fresh ? 1 : 0); ++v) {
            if (v <= s_cur && ((mask >> v) & 1u)) continue;
            const bool fresh = v > s_cur;
            u64 key = tau_key(cur, v);
            int ti = fresh ? -1 : find_tau(key);
            bool new_tau = ti < 0;
            if (new_tau) {
                if (balanced_only && !fresh) continue;
                if (2 * ((int)taus.size() + 1) > k) continue;
            }
            int ones_after = ones + (new_tau ? 1 : (taus[(std::size_t)ti].count == 1 ? -1 : 0));
            if (ones_after > remaining) continue;
            if (new_tau) {
                ti = (int)taus.size();
                taus.push_back({key, 1});
            } else {
                ++taus[(std::size_t)ti].count;
            }
            int ones_save = ones;
            ones = ones_after;
            if (fresh) ++s_cur;
            for (int di = 0; di < d; ++di) {
                int u = cur[(std::size_t)di];
                std::uint32_t mask2 = (mask ^ ((std::uint32_t)1 << u)) | ((std::uint32_t)1 << v);
                int missing = d - __builtin_popcount(mask2 & low);
                if (missing > remaining) continue;
                Cell& next = letters[(std::size_t)j + 1];
                int wi = 0;
                bool placed = false;
                for (int i = 0; i < d; ++i) {
                    if (i == di) continue;
                    if (!placed && cur[(std::size_t)i] > v) { next[(std::size_t)wi++] = v; placed = true; }
                    next[(std::size_t)wi++] = cur[(std::size_t)i];
                }
                if (!placed) next[(std::size_t)wi++] = v;
                run(j + 1, mask2);
            }
            if (fresh) --s_cur;
            ones = ones_save;
            if (new_tau) taus.pop_back();
            else --taus[(std::size_t)ti].count;
        }
    }
};

} // namespace detail

/// Enumerates every equivalence class of closed length-(k+1) words whose
/// crossing counts avoid 1, bucketed by support size; the tilde buckets
/// additionally require |supp_d| = |supp_0| - d.  One canonical word is
/// visited per class.
inline WordEnumResult enumerate_words(
    int d, int k, WordEnumOptions opt = {},
    const std::function<void(const Word&, int, bool)>& visitor = nullptr) {
    if (d < 2) throw std::invalid_argument("enumerate_words: d must be >= 2");
    if (k < 1) throw std::invalid_argument("enumerate_words: k must be >= 1");
    if (d > 11) throw std::invalid_argument("enumerate_words: d too large");
    int cap = opt.max_support > 0 ? std::min(opt.max_support, k / 2 + d) : k / 2 + d;
    if (cap > 31) throw std::invalid_argument("enumerate_words: support cap too large");

    WordEnumResult res;
    res.d = d;
    res.k = k;

    std::uint32_t mask0 = (((std::uint32_t)1 << (d + 1)) - 2);
    if (visitor || !opt.parallel || k <= 2) {
        detail::WordDfs dfs(d, k, cap, opt.balanced_prefixes_only);
        dfs.visitor = &visitor;
        dfs.run(0, mask0);
        res.full = std::move(dfs.full);
        res.tilde = std::move(dfs.tilde);
        return res;
    }

    // split on the first two steps, then solve the frontier in parallel
    struct Frontier {
        std::vector<Cell> prefix;
        std::uint32_t mask;
        int s_cur, ones;
        std::vector<detail::WordDfs::Tau> taus;
    };
    std::vector<Frontier> frontier;
    {
        detail::WordDfs scout(d, k, cap, opt.balanced_prefixes_only);
        std::function<void(int, std::uint32_t)> walk = [&](int j, std::uint32_t mask) {
            if (j == 2) {
                Frontier f;
                f.prefix.assign(scout.letters.begin(), scout.letters.begin() + j + 1);
                f.mask = mask;
                f.s_cur = scout.s_cur;
                f.ones = scout.ones;
                f.taus = scout.taus;
                frontier.push_back(std::move(f));
                return;
            }
            const int remaining = k - (j + 1);
            const Cell cur = scout.letters[(std::size_t)j];
            const bool allow_fresh = scout.s_cur < cap;
            for (int v = 1; v <= scout.s_cur + (allow_fresh ? 1 : 0); ++v) {
                if (v <= scout.s_cur && ((mask >> v) & 1u)) continue;
                const bool fresh = v > scout.s_cur;
                u64 key = scout.tau_key(cur, v);
                int ti = fresh ? -1 : scout.find_tau(key);
                bool new_tau = ti < 0;
                if (new_tau) {
                    if (scout.balanced_only && !fresh) continue;
                    if (2 * ((int)scout.taus.size() + 1) > k) continue;
                }
                int ones_after = scout.ones + (new_tau ? 1 : (scout.taus[(std::size_t)ti].count == 1 ? -1 : 0));
                if (ones_after > remaining) continue;
                if (new_tau) { ti = (int)scout.taus.size(); scout.taus.push_back({key, 1}); }
                else ++scout.taus[(std::size_t)ti].count;
                int ones_save = scout.ones;
                scout.ones = ones_after;
                if (fresh) ++scout.s_cur;
                for (int di = 0; di < d; ++di) {
                    int u = cur[(std::size_t)di];
                    std::uint32_t mask2 = (mask ^ ((std::uint32_t)1 << u)) | ((std::uint32_t)1 << v);
                    int missing = d - __builtin_popcount(mask2 & (((std::uint32_t)1 << (d + 1)) - 2));
                    if (missing > remaining) continue;
                    Cell next;
                    next.reserve((std::size_t)d);
                    for (int i = 0; i < d; ++i) if (i != di) next.push_back(cur[(std::size_t)i]);
                    next.insert(std::upper_bound(next.begin(), next.end(), v), v);
                    scout.letters[(std::size_t)j + 1] = next;
                    walk(j + 1, mask2);
                }
                if (fresh) --scout.s_cur;
                scout.ones = ones_save;
                if (new_tau) scout.taus.pop_back();
                else --scout.taus[(std::size_t)ti].count;
            }
        };
        walk(0, mask0);
    }

    std::vector<WordEnumResult> parts(frontier.size());
    parallel_for(frontier.size(), [&](std::size_t i) {
        const Frontier& f = frontier[i];
        detail::WordDfs dfs(d, k, cap, opt.balanced_prefixes_only);
        for (std::size_t j = 0; j < f.prefix.size(); ++j) dfs.letters[j] = f.prefix[j];
        dfs.s_cur = f.s_cur;
        dfs.ones = f.ones;
        dfs.taus = f.taus;
        dfs.run((int)f.prefix.size() - 1, f.mask);
        parts[i].full = std::move(dfs.full);
        parts[i].tilde = std::move(dfs.tilde);
    });
    for (const auto& part : parts) {
        for (const auto& [s, c] : part.full) res.full[s] += c;
        for (const auto& [s, c] : part.tilde) res.tilde[s] += c;
    }
    return res;
}

inline MomentPolynomial enumerate_tilde_W(int d, int k, WordEnumOptions opt = {}) {
    WordEnumResult res = enumerate_words(d, k, opt);
    MomentPolynomial poly;
    poly.d = d;
    poly.k = k;
    poly.coefficients = std::move(res.tilde);
    return poly;
}

inline std::map<int, u64> enumerate_W(int d, int k, WordEnumOptions opt = {}) {
    if (opt.balanced_prefixes_only)
        throw std::invalid_argument("enumerate_W: balanced-prefix mode drops unrestricted counts");
    return enumerate_words(d, k, opt).full;
}

inline double beta_value(int d, int k, double lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("beta_value: lambda must be > 0");
    return enumerate_tilde_W(d, k)(lambda);
}

/// Checks |W~_{k/2+d}^k| = C_{k/2} * d^{k/2} by enumeration.
inline bool catalan_check(const MomentPolynomial& poly) {
    if (poly.k % 2 != 0) throw std::invalid_argument("catalan_check: k must be even");
    u64 expect = catalan(poly.k / 2);
    for (int i = 0; i < poly.k / 2; ++i) expect *= (u64)poly.d;
    int s = poly.k / 2 + poly.d;
    auto it = poly.coefficients.find(s);
    u64 got = it == poly.coefficients.end() ? 0 : it->second;
    return got == expect;
}

inline bool catalan_check(int d, int k) {
    if (k % 2 != 0) throw std::invalid_argument("catalan_check: k must be even");
    return catalan_check(enumerate_tilde_W(d, k));
}

/// Number of labelled words on n vertices in one equivalence class with
/// support size s: n! / ((n-s)! d!).
inline u128 class_cardinality(int d, int s, int n) {
    if (d < 1 || s < d || n < s) throw std::invalid_argument("class_cardinality: need n >= s >= d >= 1");
    u128 r = 1;
    u64 dfact = 1;
    for (int i = 2; i <= d; ++i) dfact *= (u64)i;
    int done = 0;
    for (int i = n - s + 1; i <= n; ++i) {
        r = mul_checked(r, (u128)i);
        if (++done == d) r /= (u128)dfact;  // d consecutive factors are divisible by d!
    }
    return r;
}

/// d^k * (kd)^k, the size of the witness family used to show the limit law
/// has unbounded support.
inline u128 unbounded_witness_count(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("unbounded_witness_count: need d,k >= 1");
    u128 r = 1;
    for (int i = 0; i < k; ++i) r = mul_checked(r, (u128)d);
    for (int i = 0; i < k; ++i) r = mul_checked(r, (u128)(k * d));
    return r;
}

} // namespace lms

#endif
