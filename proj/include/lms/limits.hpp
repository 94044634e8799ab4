#ifndef LMS_LIMITS_HPP
#define LMS_LIMITS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "cells.hpp"
#include "combinatorics.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace lms {

/// Finite connected rooted graph; the root has local id 0 and depth labels
/// record BFS distance from it.
struct RootedGraph {
    int n = 0;
    std::vector<std::vector<int>> adj;
    std::vector<int> depth;
    bool capped = false;  // generation stopped at the vertex cap

    void add_vertex(int dep) {
        adj.emplace_back();
        depth.push_back(dep);
        ++n;
    }
    void add_edge(int a, int b) {
        adj[(std::size_t)a].push_back(b);
        adj[(std::size_t)b].push_back(a);
    }
};

/// Rooted two-sided graph: V-side holds (d-1)-cells (root included),
/// U-side holds d-cells; edges only across sides.
struct BipartiteRootedGraph {
    int n = 0;
    std::vector<std::vector<int>> adj;
    std::vector<int> depth;
    std::vector<char> is_u;
    bool capped = false;

    void add_vertex(int dep, bool u_side) {
        adj.emplace_back();
        depth.push_back(dep);
        is_u.push_back(u_side ? 1 : 0);
        ++n;
    }
    void add_edge(int a, int b) {
        adj[(std::size_t)a].push_back(b);
        adj[(std::size_t)b].push_back(a);
    }
};

/// Induced sub-ball of radius r around the root, ids relabelled in BFS
/// order.
template <class G>
inline G restrict_ball(const G& g, int r) {
    G out;
    out.capped = g.capped;
    std::vector<int> local((std::size_t)g.n, -1);
    for (int v = 0; v < g.n; ++v) {
        if (g.depth[(std::size_t)v] > r) continue;
        local[(std::size_t)v] = out.n;
        if constexpr (std::is_same_v<G, BipartiteRootedGraph>)
            out.add_vertex(g.depth[(std::size_t)v], g.is_u[(std::size_t)v] != 0);
        else
            out.add_vertex(g.depth[(std::size_t)v]);
    }
    for (int v = 0; v < g.n; ++v) {
        if (local[(std::size_t)v] < 0) continue;
        for (int w : g.adj[(std::size_t)v])
            if (w > v && local[(std::size_t)w] >= 0)
                out.add_edge(local[(std::size_t)v], local[(std::size_t)w]);
    }
    return out;
}

/// Radius-t ball around a (d-1)-cell in the line graph of the complex:
/// vertices are cells reached by walking through present d-cells, edges are
/// all line-graph edges induced on the ball.  Neighbors are generated
/// lazily from the presence oracle; the full graph is never built.
inline RootedGraph line_graph_ball(const ComplexSample& sample, const Cell& root, int t,
                                   std::uint64_t vertex_cap = 1u << 20) {
    const int n = sample.n(), d = sample.d();
    if ((int)root.size() != d) throw std::invalid_argument("line_graph_ball: root must have d vertices");
    validate_cell(root, n);
    const BinomTable& table = sample.table();

    RootedGraph g;
    std::vector<u64> ranks;
    std::unordered_map<u64, int> local;
    g.add_vertex(0);
    ranks.push_back(table.rank(root));
    local.emplace(ranks[0], 0);

    Cell cell, other;
    for (int cur = 0; cur < g.n; ++cur) {
        if (g.depth[(std::size_t)cur] >= t) continue;
        cell = cell_unrank(ranks[(std::size_t)cur], d);
        for (int v = 1; v <= n; ++v) {
            if (std::binary_search(cell.begin(), cell.end(), v)) continue;
            if (!sample.contains_rank(table.rank_with_inserted(cell.data(), d, v))) continue;
            for (int j = 0; j < d; ++j) {
                other = cell;
                other[(std::size_t)j] = v;
                std::sort(other.begin(), other.end());
                u64 orank = table.rank(other);
                if (local.count(orank)) continue;
                if ((std::uint64_t)g.n >= vertex_cap)
                    throw CapExceeded("line_graph_ball: vertex cap exceeded");
                local.emplace(orank, g.n);
                g.add_vertex(g.depth[(std::size_t)cur] + 1);
                ranks.push_back(orank);
            }
        }
    }

    // induced edges: two ball cells are adjacent iff they differ in one
    // vertex and their union is present
    std::vector<Cell> cells((std::size_t)g.n);
    for (int i = 0; i < g.n; ++i) cells[(std::size_t)i] = cell_unrank(ranks[(std::size_t)i], d);
    Cell inter;
    for (int a = 0; a < g.n; ++a) {
        for (int b = a + 1; b < g.n; ++b) {
            inter.clear();
            std::set_intersection(cells[(std::size_t)a].begin(), cells[(std::size_t)a].end(),
                                  cells[(std::size_t)b].begin(), cells[(std::size_t)b].end(),
                                  std::back_inserter(inter));
            if ((int)inter.size() != d - 1) continue;
            Cell uni;
            std::set_union(cells[(std::size_t)a].begin(), cells[(std::size_t)a].end(),
                           cells[(std::size_t)b].begin(), cells[(std::size_t)b].end(),
                           std::back_inserter(uni));
            if (sample.contains_rank(table.rank(uni))) g.add_edge(a, b);
        }
    }
    return g;
}

/// Radius-t ball around a (d-1)-cell in the two-sided incidence graph:
/// V side = (d-1)-cells, U side = present d-cells, edges by containment.
inline BipartiteRootedGraph bipartite_ball(const ComplexSample& sample, const Cell& root, int t,
                                           std::uint64_t vertex_cap = 1u << 20) {
    const int n = sample.n(), d = sample.d();
    if ((int)root.size() != d) throw std::invalid_argument("bipartite_ball: root must have d vertices");
    validate_cell(root, n);
    const BinomTable& table = sample.table();

    BipartiteRootedGraph g;
    std::vector<u64> ranks;                 // cell rank (within its own side)
    std::unordered_map<u64, int> vmap, umap;
    g.add_vertex(0, false);
    ranks.push_back(table.rank(root));
    vmap.emplace(ranks[0], 0);

    for (int cur = 0; cur < g.n; ++cur) {
        if (g.depth[(std::size_t)cur] >= t) continue;
        int dep = g.depth[(std::size_t)cur];
        if (!g.is_u[(std::size_t)cur]) {
            Cell cell = cell_unrank(ranks[(std::size_t)cur], d);
            for (int v = 1; v <= n; ++v) {
                if (std::binary_search(cell.begin(), cell.end(), v)) continue;
                u64 tau_rank = table.rank_with_inserted(cell.data(), d, v);
                if (!sample.contains_rank(tau_rank)) continue;
                if (umap.count(tau_rank)) continue;
                if ((std::uint64_t)g.n >= vertex_cap)
                    throw CapExceeded("bipartite_ball: vertex cap exceeded");
                umap.emplace(tau_rank, g.n);
                g.add_vertex(dep + 1, true);
                ranks.push_back(tau_rank);
            }
        } else {
            Cell tau = cell_unrank(ranks[(std::size_t)cur], d + 1);
            for (const Cell& f : boundary(tau)) {
                u64 frank = table.rank(f);
                if (vmap.count(frank)) continue;
                if ((std::uint64_t)g.n >= vertex_cap)
                    throw CapExceeded("bipartite_ball: vertex cap exceeded");
                vmap.emplace(frank, g.n);
                g.add_vertex(dep + 1, false);
                ranks.push_back(frank);
            }
        }
    }

    // induced edges: U vertices connect to exactly their in-ball facets
    for (int u = 0; u < g.n; ++u) {
        if (!g.is_u[(std::size_t)u]) continue;
        Cell tau = cell_unrank(ranks[(std::size_t)u], d + 1);
        for (const Cell& f : boundary(tau)) {
            auto it = vmap.find(table.rank(f));
            if (it != vmap.end()) g.add_edge(u, it->second);
        }
    }
    return g;
}

/// Collapse map: keeps the V side, joins two V vertices when they share a
/// U neighbor, restricts to the root's connected component.
inline RootedGraph phi(const BipartiteRootedGraph& g) {
    if (g.n == 0 || g.is_u.empty() || g.is_u[0])
        throw std::invalid_argument("phi: root must be on the V side");
    std::vector<std::vector<int>> vadj((std::size_t)g.n);
    for (int u = 0; u < g.n; ++u) {
        if (!g.is_u[(std::size_t)u]) continue;
        const auto& nb = g.adj[(std::size_t)u];
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                vadj[(std::size_t)nb[a]].push_back(nb[b]);
                vadj[(std::size_t)nb[b]].push_back(nb[a]);
            }
    }
    for (auto& lst : vadj) {
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
    }

    RootedGraph out;
    out.capped = g.capped;
    std::vector<int> local((std::size_t)g.n, -1);
    std::vector<int> order;
    local[0] = 0;
    out.add_vertex(0);
    order.push_back(0);
    for (std::size_t qi = 0; qi < order.size(); ++qi) {
        int v = order[qi];
        for (int w : vadj[(std::size_t)v]) {
            if (local[(std::size_t)w] >= 0) continue;
            local[(std::size_t)w] = out.n;
            out.add_vertex(out.depth[(std::size_t)local[(std::size_t)v]] + 1);
            order.push_back(w);
        }
    }
    for (int v : order)
        for (int w : vadj[(std::size_t)v])
            if (local[(std::size_t)w] > local[(std::size_t)v])
                out.add_edge(local[(std::size_t)v], local[(std::size_t)w]);
    return out;
}

/// Random two-sided tree truncated at depth t: even-depth vertices draw
/// Poi(lambda) children, odd-depth vertices get exactly d children.
inline BipartiteRootedGraph sample_poisson_dtree(int d, double lambda, int t, std::uint64_t seed,
                                                 std::uint64_t vertex_cap = 1u << 20) {
    if (d < 1 || lambda < 0.0 || t < 0) throw std::invalid_argument("sample_poisson_dtree: bad parameters");
    BipartiteRootedGraph g;
    g.add_vertex(0, false);
    Rng rng(seed);
    for (int cur = 0; cur < g.n && !g.capped; ++cur) {
        int dep = g.depth[(std::size_t)cur];
        if (dep >= t) continue;
        std::uint64_t kids = g.is_u[(std::size_t)cur] ? (std::uint64_t)d : rng.poisson(lambda);
        for (std::uint64_t c = 0; c < kids; ++c) {
            if ((std::uint64_t)g.n >= vertex_cap) { g.capped = true; break; }
            g.add_vertex(dep + 1, !g.is_u[(std::size_t)cur]);
            g.add_edge(cur, g.n - 1);
        }
    }
    return g;
}

enum class OffspringLaw { poisson, deterministic };  // deterministic: always 2 blocks (N = 2d)

struct GWConfig {
    int d = 2;
    double lambda = 1.0;
    int t = 2;
    std::uint64_t vertex_cap = 1u << 20;
    std::uint64_t seed = 0;
    OffspringLaw law = OffspringLaw::poisson;
};

/// d-block branching graph truncated at depth t: every vertex draws
/// M ~ Poi(lambda) blocks of d children; each block plus its parent forms a
/// (d+1)-clique.  Hitting the vertex cap stops generation and sets capped.
inline RootedGraph sample_dgw(const GWConfig& cfg) {
    if (cfg.d < 1 || cfg.lambda < 0.0 || cfg.t < 0) throw std::invalid_argument("sample_dgw: bad parameters");
    RootedGraph g;
    g.add_vertex(0);
    Rng rng(cfg.seed);
    for (int cur = 0; cur < g.n && !g.capped; ++cur) {
        int dep = g.depth[(std::size_t)cur];
        if (dep >= cfg.t) continue;
        std::uint64_t blocks =
            cfg.law == OffspringLaw::poisson ? rng.poisson(cfg.lambda) : 2;
        for (std::uint64_t b = 0; b < blocks && !g.capped; ++b) {
            if ((std::uint64_t)g.n + (std::uint64_t)cfg.d > cfg.vertex_cap) { g.capped = true; break; }
            int first = g.n;
            for (int c = 0; c < cfg.d; ++c) {
                g.add_vertex(dep + 1);
                g.add_edge(cur, g.n - 1);
                for (int prev = first; prev < g.n - 1; ++prev) g.add_edge(prev, g.n - 1);
            }
        }
    }
    return g;
}

namespace detail {

/// Exact canonical form by iterated refinement with individualization and
/// twin pruning; requires n <= 64.
class CanonSearch {
public:
    explicit CanonSearch(const RootedGraph& g) : n_(g.n) {
        masks_.assign((std::size_t)n_, 0);
        for (int v = 0; v < n_; ++v)
            for (int w : g.adj[(std::size_t)v]) masks_[(std::size_t)v] |= (u64)1 << w;
    }

    std::string run() {
        search(initial_colors());
        return best_;
    }

private:
    std::vector<int> initial_colors() const {
        std::vector<int> depth((std::size_t)n_, n_);
        depth[0] = 0;
        std::vector<int> queue{0};
        for (std::size_t h = 0; h < queue.size(); ++h) {
            int v = queue[h];
            u64 m = masks_[(std::size_t)v];
            while (m) {
                int w = __builtin_ctzll(m);
                m &= m - 1;
                if (depth[(std::size_t)w] == n_) {
                    depth[(std::size_t)w] = depth[(std::size_t)v] + 1;
                    queue.push_back(w);
                }
            }
        }
        std::vector<std::pair<std::array<int, 3>, int>> keys((std::size_t)n_);
        for (int v = 0; v < n_; ++v) {
            int tri = 0;
            u64 m = masks_[(std::size_t)v];
            while (m) {
                int w = __builtin_ctzll(m);
                m &= m - 1;
                tri += __builtin_popcountll(masks_[(std::size_t)v] & masks_[(std::size_t)w]);
            }
            keys[(std::size_t)v] = {
                {depth[(std::size_t)v], __builtin_popcountll(masks_[(std::size_t)v]), tri}, v};
        }
        auto sorted = keys;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> colors((std::size_t)n_);
        int c = -1;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (i == 0 || sorted[i].first != sorted[i - 1].first) ++c;
            colors[(std::size_t)sorted[i].second] = c;
        }
        return colors;
    }

    void refine(std::vector<int>& colors) const {
        for (;;) {
            std::vector<std::pair<std::vector<int>, int>> keys((std::size_t)n_);
            for (int v = 0; v < n_; ++v) {
                std::vector<int> k;
                k.push_back(colors[(std::size_t)v]);
                u64 m = masks_[(std::size_t)v];
                std::vector<std::pair<int, int>> nb;
                while (m) {
                    int w = __builtin_ctzll(m);
                    m &= m - 1;
                    nb.push_back({colors[(std::size_t)w],
                                  __builtin_popcountll(masks_[(std::size_t)v] &
                                                       masks_[(std::size_t)w])});
                }
                std::sort(nb.begin(), nb.end());
                for (auto& pr : nb) {
                    k.push_back(pr.first);
                    k.push_back(pr.second);
                }
                keys[(std::size_t)v] = {std::move(k), v};
            }
            auto sorted = keys;
            std::sort(sorted.begin(), sorted.end());
            std::vector<int> next((std::size_t)n_);
            int c = -1;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                if (i == 0 || sorted[i].first != sorted[i - 1].first) ++c;
                next[(std::size_t)sorted[i].second] = c;
            }
            if (c + 1 == count_colors(colors)) { colors = std::move(next); return; }
            colors = std::move(next);
            if (c + 1 == n_) return;
        }
    }

    static int count_colors(const std::vector<int>& colors) {
        int mx = -1;
        for (int c : colors) mx = std::max(mx, c);
        return mx + 1;
    }

    void emit(const std::vector<int>& colors) {
        std::vector<int> pos((std::size_t)n_);
        for (int v = 0; v < n_; ++v) pos[(std::size_t)colors[(std::size_t)v]] = v;
        std::string s;
        s.push_back((char)n_);
        int bit = 0;
        char acc = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                bool e = (masks_[(std::size_t)pos[(std::size_t)i]] >> pos[(std::size_t)j]) & 1;
                acc = (char)(acc << 1 | (e ? 1 : 0));
                if (++bit == 8) { s.push_back(acc); bit = 0; acc = 0; }
            }
        if (bit) s.push_back((char)(acc << (8 - bit)));
        if (best_.empty() || s < best_) best_ = std::move(s);
    }

    void search(std::vector<int> colors) {
        if (++nodes_ > 2000000) throw CapExceeded("canonical_signature: search budget exceeded");
        refine(colors);
        int nc = count_colors(colors);
        if (nc == n_) { emit(colors); return; }
        int target = -1;
        {
            std::vector<int> size((std::size_t)nc, 0);
            for (int c : colors) ++size[(std::size_t)c];
            int best_sz = n_ + 1;
            for (int c = 0; c < nc; ++c)
                if (size[(std::size_t)c] >= 2 && size[(std::size_t)c] < best_sz) {
                    best_sz = size[(std::size_t)c];
                    target = c;
                }
        }
        std::vector<int> members;
        for (int v = 0; v < n_; ++v)
            if (colors[(std::size_t)v] == target) members.push_back(v);
        std::vector<int> reps;
        for (int v : members) {
            bool twin = false;
            for (int r : reps) {
                u64 strip = ~(((u64)1 << v) | ((u64)1 << r));
                if ((masks_[(std::size_t)v] & strip) == (masks_[(std::size_t)r] & strip)) {
                    twin = true;
                    break;
                }
            }
            if (!twin) reps.push_back(v);
        }
        for (int v : reps) {
            std::vector<int> next((std::size_t)n_);
            for (int w = 0; w < n_; ++w) next[(std::size_t)w] = colors[(std::size_t)w] * 2;
            next[(std::size_t)v] = colors[(std::size_t)v] * 2 - 1;
            search(std::move(next));
        }
    }

    int n_;
    std::vector<u64> masks_;
    std::string best_;
    long long nodes_ = 0;
};

inline u64 hash_combine(u64 a, u64 b) { return mix64(a + kGolden * b); }

/// Canonical code for rooted graphs whose biconnected components are all
/// cliques (trees of cliques, the typical shape of sampled balls).  AHU
/// coding of the block-cut tree, linear time.  Returns "" when the graph
/// is disconnected or some block is not a clique.
inline std::string block_graph_code(const RootedGraph& g) {
    int n = g.n;
    std::vector<int> num((std::size_t)n, 0), low((std::size_t)n, 0), parent((std::size_t)n, -1);
    std::vector<std::size_t> it((std::size_t)n, 0);
    std::vector<std::pair<int, int>> estack;
    std::vector<int> dstack{0};
    std::vector<std::vector<int>> blocks;
    int cnt = 0;
    num[0] = low[0] = ++cnt;
    while (!dstack.empty()) {
        int u = dstack.back();
        if (it[(std::size_t)u] < g.adj[(std::size_t)u].size()) {
            int w = g.adj[(std::size_t)u][it[(std::size_t)u]++];
            if (!num[(std::size_t)w]) {
                estack.push_back({u, w});
                parent[(std::size_t)w] = u;
                num[(std::size_t)w] = low[(std::size_t)w] = ++cnt;
                dstack.push_back(w);
            } else if (w != parent[(std::size_t)u] && num[(std::size_t)w] < num[(std::size_t)u]) {
                estack.push_back({u, w});
                low[(std::size_t)u] = std::min(low[(std::size_t)u], num[(std::size_t)w]);
            }
        } else {
            dstack.pop_back();
            if (dstack.empty()) break;
            int p = dstack.back();
            low[(std::size_t)p] = std::min(low[(std::size_t)p], low[(std::size_t)u]);
            if (low[(std::size_t)u] >= num[(std::size_t)p]) {
                std::vector<int> verts;
                std::size_t edges = 0;
                for (;;) {
                    auto e = estack.back();
                    estack.pop_back();
                    ++edges;
                    verts.push_back(e.first);
                    verts.push_back(e.second);
                    if (e.first == p && e.second == u) break;
                }
                std::sort(verts.begin(), verts.end());
                verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
                std::size_t k = verts.size();
                if (edges != k * (k - 1) / 2) return "";
                blocks.push_back(std::move(verts));
            }
        }
    }
    for (int v = 0; v < n; ++v)
        if (!num[(std::size_t)v]) return "";
    // membership tree: vertex node v, block node n + b, rooted at vertex 0
    int nb = (int)blocks.size();
    std::vector<std::vector<int>> bofv((std::size_t)n);
    for (int b = 0; b < nb; ++b)
        for (int v : blocks[(std::size_t)b]) bofv[(std::size_t)v].push_back(b);
    std::vector<int> order;
    order.reserve((std::size_t)(n + nb));
    std::vector<int> par((std::size_t)(n + nb), -2);
    par[0] = -1;
    order.push_back(0);
    for (std::size_t h = 0; h < order.size(); ++h) {
        int x = order[h];
        if (x < n) {
            for (int b : bofv[(std::size_t)x])
                if (par[(std::size_t)(n + b)] == -2) {
                    par[(std::size_t)(n + b)] = x;
                    order.push_back(n + b);
                }
        } else {
            for (int v : blocks[(std::size_t)(x - n)])
                if (par[(std::size_t)v] == -2) {
                    par[(std::size_t)v] = x;
                    order.push_back(v);
                }
        }
    }
    // bottom-up: a node's code is its sorted child codes in brackets, with
    // vertex and block levels bracketed differently
    std::vector<std::vector<std::string>> kids((std::size_t)(n + nb));
    std::vector<std::string> code((std::size_t)(n + nb));
    for (std::size_t h = order.size(); h-- > 0;) {
        int x = order[h];
        auto& ks = kids[(std::size_t)x];
        std::sort(ks.begin(), ks.end());
        std::string s(1, x < n ? '[' : '(');
        for (const auto& t : ks) s += t;
        s.push_back(x < n ? ']' : ')');
        ks.clear();
        ks.shrink_to_fit();
        code[(std::size_t)x] = std::move(s);
        if (par[(std::size_t)x] >= 0)
            kids[(std::size_t)par[(std::size_t)x]].push_back(std::move(code[(std::size_t)x]));
    }
    return code[0];
}

} // namespace detail

/// Canonical byte string for the rooted-isomorphism class.  Trees of
/// cliques get an exact linear-time code at any size (prefix "T:"); other
/// graphs up to 64 vertices get an exact backtracking code (prefix "X:");
/// larger graphs fall back to a heuristic hierarchical hash (prefix "H:").
inline std::string canonical_signature(const RootedGraph& g) {
    if (g.n == 0) throw std::invalid_argument("canonical_signature: empty graph");
    std::string tree = detail::block_graph_code(g);
    if (!tree.empty()) return "T:" + tree;
    if (g.n <= 64) {
        detail::CanonSearch cs(g);
        std::string raw = cs.run();
        static const char* hex = "0123456789abcdef";
        std::string out = "X:";
        for (unsigned char c : raw) {
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
        return out;
    }
    // heuristic: depth profile, per-depth degree sequences, three rounds of
    // neighborhood hashing
    std::vector<u64> h((std::size_t)g.n);
    for (int v = 0; v < g.n; ++v)
        h[(std::size_t)v] = detail::hash_combine((u64)g.adj[(std::size_t)v].size() + 1,
                                                 (u64)g.depth[(std::size_t)v] + 1);
    for (int round = 0; round < 3; ++round) {
        std::vector<u64> next((std::size_t)g.n);
        std::vector<u64> nb;
        for (int v = 0; v < g.n; ++v) {
            nb.clear();
            for (int w : g.adj[(std::size_t)v]) nb.push_back(h[(std::size_t)w]);
            std::sort(nb.begin(), nb.end());
            u64 acc = h[(std::size_t)v];
            for (u64 x : nb) acc = detail::hash_combine(acc, x);
            next[(std::size_t)v] = acc;
        }
        h = std::move(next);
    }
    std::vector<u64> all(h.begin() + 1, h.end());
    std::sort(all.begin(), all.end());
    u64 acc = detail::hash_combine((u64)g.n, h[0]);
    for (u64 x : all) acc = detail::hash_combine(acc, x);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)acc);
    return std::string("H:") + buf;
}

/// Empirical distribution of canonical t-ball signatures in the line graph
/// at p = lambda/n: each sample draws a fresh complex and a uniform root.
inline std::map<std::string, double> ball_distribution_line(int n, int d, double lambda, int t,
                                                            std::uint64_t samples, std::uint64_t seed,
                                                            std::uint64_t vertex_cap = 1u << 20) {
    if (samples == 0) throw std::invalid_argument("ball_distribution_line: samples must be > 0");
    double p = lambda / (double)n;
    std::vector<std::string> sigs((std::size_t)samples);
    parallel_for((std::size_t)samples, [&](std::size_t i) {
        std::uint64_t si = derive_seed(seed, 0x6C696E65ULL, i);  // "line"
        ComplexSample sample(n, d, p, mix64(si), SampleMode::lazy);
        Rng rng(si);
        Cell root = cell_unrank(rng.below(sample.dim()), d);
        sigs[i] = canonical_signature(line_graph_ball(sample, root, t, vertex_cap));
    });
    std::map<std::string, double> freq;
    for (const auto& s : sigs) freq[s] += 1.0;
    for (auto& [_, v] : freq) v /= (double)samples;
    return freq;
}

/// Same tally over d-block branching-graph samples.
inline std::map<std::string, double> ball_distribution_dgw(const GWConfig& cfg, std::uint64_t samples) {
    if (samples == 0) throw std::invalid_argument("ball_distribution_dgw: samples must be > 0");
    std::vector<std::string> sigs((std::size_t)samples);
    parallel_for((std::size_t)samples, [&](std::size_t i) {
        GWConfig c = cfg;
        c.seed = derive_seed(cfg.seed, 0x64677720ULL, i);  // "dgw"
        sigs[i] = canonical_signature(sample_dgw(c));
    });
    std::map<std::string, double> freq;
    for (const auto& s : sigs) freq[s] += 1.0;
    for (auto& [_, v] : freq) v /= (double)samples;
    return freq;
}

/// Total variation distance between two signature distributions.
inline double tv_distance(const std::map<std::string, double>& a,
                          const std::map<std::string, double>& b) {
    double acc = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            acc += ia->second;
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            acc += ib->second;
            ++ib;
        } else {
            acc += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return acc / 2.0;
}

struct MassTransportResult {
    double lhs = 0.0;   // mean over samples of sum_v f(G, o, v)
    double rhs = 0.0;   // mean over samples of sum_v f(G, v, o)
    double stderr_ = 0.0;  // paired stderr of the per-sample difference
};

/// Both sides of the mass-transport identity for the built-in family
/// f_k(G,u,v) = 1{(u,v) in E} * 1{deg(v) = k*d}, estimated on depth-2
/// branching-graph samples.
inline MassTransportResult mass_transport_check(int d, double lambda, int k,
                                                std::uint64_t samples, std::uint64_t seed,
                                                OffspringLaw law = OffspringLaw::poisson) {
    if (k < 1) throw std::invalid_argument("mass_transport_check: unknown f_id (k must be >= 1)");
    if (samples == 0) throw std::invalid_argument("mass_transport_check: samples must be > 0");
    std::vector<double> lhs_v((std::size_t)samples), rhs_v((std::size_t)samples);
    parallel_for((std::size_t)samples, [&](std::size_t i) {
        GWConfig cfg;
        cfg.d = d;
        cfg.lambda = lambda;
        cfg.t = 2;
        cfg.vertex_cap = 1u << 22;
        cfg.seed = derive_seed(seed, 0x6D617373ULL, i);  // "mass"
        cfg.law = law;
        RootedGraph g = sample_dgw(cfg);
        int want = k * d;
        double lhs = 0.0;
        for (int v : g.adj[0])
            if ((int)g.adj[(std::size_t)v].size() == want) lhs += 1.0;
        int root_deg = (int)g.adj[0].size();
        lhs_v[i] = lhs;
        rhs_v[i] = root_deg == want ? (double)root_deg : 0.0;
    });
    MassTransportResult r;
    for (std::size_t i = 0; i < samples; ++i) {
        r.lhs += lhs_v[i];
        r.rhs += rhs_v[i];
    }
    r.lhs /= (double)samples;
    r.rhs /= (double)samples;
    double var = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double diff = (lhs_v[i] - rhs_v[i]) - (r.lhs - r.rhs);
        var += diff * diff;
    }
    var = samples > 1 ? var / (double)(samples - 1) : 0.0;
    r.stderr_ = std::sqrt(var / (double)samples);
    return r;
}

/// Fraction of branching-graph samples that die out before reaching the
/// depth cap; a sample aborted at the vertex cap counts as surviving.
inline double die_out_fraction(int d, double lambda, int depth_cap, std::uint64_t vertex_cap,
                               std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) throw std::invalid_argument("die_out_fraction: samples must be > 0");
    std::vector<char> died((std::size_t)samples, 0);
    parallel_for((std::size_t)samples, [&](std::size_t i) {
        GWConfig cfg;
        cfg.d = d;
        cfg.lambda = lambda;
        cfg.t = depth_cap;
        cfg.vertex_cap = vertex_cap;
        cfg.seed = derive_seed(seed, 0x73757276ULL, i);  // "surv"
        RootedGraph g = sample_dgw(cfg);
        int max_depth = 0;
        for (int dep : g.depth) max_depth = std::max(max_depth, dep);
        died[i] = (!g.capped && max_depth < depth_cap) ? 1 : 0;
    });
    std::uint64_t cnt = 0;
    for (char c : died) cnt += (std::uint64_t)c;
    return (double)cnt / (double)samples;
}

/// (A^j)_{oo} for j = 1..k_max by repeated adjacency application.
inline std::vector<double> root_spectral_moments(const RootedGraph& g, int k_max) {
    if (k_max < 1) throw std::invalid_argument("root_spectral_moments: k_max must be >= 1");
    std::vector<double> x((std::size_t)g.n, 0.0), y((std::size_t)g.n, 0.0);
    x[0] = 1.0;
    std::vector<double> out;
    out.reserve((std::size_t)k_max);
    for (int j = 0; j < k_max; ++j) {
        std::fill(y.begin(), y.end(), 0.0);
        for (int v = 0; v < g.n; ++v)
            if (x[(std::size_t)v] != 0.0)
                for (int w : g.adj[(std::size_t)v]) y[(std::size_t)w] += x[(std::size_t)v];
        std::swap(x, y);
        out.push_back(x[0]);
    }
    return out;
}

} // namespace lms

#endif
