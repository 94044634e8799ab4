// Acceptance suite: one line per criterion, exit status = number of
// failures.  Tolerances are pinned here as named constants.
#include <lms/lms.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace lms;

namespace {

// statistical windows
constexpr double kSigma = 3.0;            // z-window for Monte Carlo means
constexpr double kEigTol = 1e-8;          // eigenvalue agreement, closed forms
constexpr double kKsBound = 0.05;         // per-seed KS bound
constexpr int kKsSeedsNeeded = 18;        // out of 20
constexpr double kFrobRelTol = 0.05;      // relative error on the mean
constexpr double kScaledM2Lo = 0.9, kScaledM2Hi = 1.1;
constexpr double kScaledM4Lo = 1.8, kScaledM4Hi = 2.2;
constexpr double kTvBound = 0.08;
constexpr double kDieOutMin = 0.99;
// wall-clock budgets, seconds
constexpr double kTableBudget = 300.0;
constexpr double kDenseMomentBudget = 600.0;
constexpr double kFrobBudget = 60.0;

int g_failures = 0;

void report(int idx, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", idx, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void guarded(int idx, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [pass, detail] = body();
        report(idx, pass, detail);
    } catch (const std::exception& e) {
        report(idx, false, std::string("exception: ") + e.what());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct MeanAccumulator {
    double sum = 0.0, sq = 0.0;
    std::uint64_t count = 0;
    void add(double x) {
        sum += x;
        sq += x * x;
        ++count;
    }
    double mean() const { return sum / (double)count; }
    double se() const {
        double m = mean();
        double var = count > 1 ? (sq / (double)count - m * m) * (double)count / (double)(count - 1)
                               : 0.0;
        return std::sqrt(var / (double)count);
    }
    double sd() const { return se() * std::sqrt((double)count); }
};

// ---------------------------------------------------------------- criterion 1
std::pair<bool, std::string> table_counts() {
    auto t0 = std::chrono::steady_clock::now();
    const std::map<int, std::vector<u64>> wantD2 = {
        {3, {0, 2, 2, 6, 10, 22, 42, 86}},
        {4, {0, 0, 0, 8, 20, 84, 224, 688}},
        {5, {0, 0, 0, 0, 0, 40, 168, 896}},
        {6, {0, 0, 0, 0, 0, 0, 0, 224}},
    };
    const std::map<int, std::vector<u64>> wantD3 = {
        {4, {0, 3, 6, 21, 60, 183, 546, 1641}},
        {5, {0, 0, 0, 18, 90, 486, 2142, 9198}},
        {6, {0, 0, 0, 0, 0, 135, 1134, 8316}},
        {7, {0, 0, 0, 0, 0, 0, 0, 1134}},
    };
    int bad = 0;
    for (int d : {2, 3}) {
        const auto& want = d == 2 ? wantD2 : wantD3;
        for (int k = 1; k <= 8; ++k) {
            WordEnumResult res = enumerate_words(d, k);
            for (const auto& [s, row] : want) {
                u64 got = res.tilde.count(s) ? res.tilde.at(s) : 0;
                if (got != row[(std::size_t)(k - 1)]) ++bad;
            }
        }
    }
    double el = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "mismatches=%d elapsed=%.1fs budget=%.0fs", bad, el,
                  kTableBudget);
    return {bad == 0 && el < kTableBudget, buf};
}

// ---------------------------------------------------------------- criterion 2
std::pair<bool, std::string> beta_identities() {
    int bad = 0;
    for (int d : {2, 3, 4}) {
        MomentPolynomial b2 = enumerate_tilde_W(d, 2);
        MomentPolynomial b3 = enumerate_tilde_W(d, 3);
        for (double lam : {0.25, 0.5, 1.0, 2.0, 5.0}) {
            if (std::fabs(b2(lam) - (double)d * lam) > 1e-12 * (double)d * lam) ++bad;
            if (std::fabs(b3(lam) - (double)(d * (d - 1)) * lam) >
                1e-12 * (double)(d * (d - 1)) * lam)
                ++bad;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "mismatches=%d over d=2,3,4", bad);
    return {bad == 0, buf};
}

// ---------------------------------------------------------------- criterion 3
std::pair<bool, std::string> catalan_coefficients() {
    int bad = 0;
    for (int d : {2, 3})
        for (int k : {2, 4, 6, 8})
            if (!catalan_check(d, k)) ++bad;
    char buf[64];
    std::snprintf(buf, sizeof buf, "mismatches=%d over k=2,4,6,8", bad);
    return {bad == 0, buf};
}

// ---------------------------------------------------------------- criterion 4
std::pair<bool, std::string> sign_alternation() {
    long long checked = 0;
    int bad = 0;
    for (int d : {2, 3}) {
        int kmax = d == 2 ? 6 : 4;
        for (int k = 2; k <= kmax; ++k) {
            int want = k % 2 == 0 ? 1 : -1;
            enumerate_words(d, k, {}, [&](const Word& w, int, bool balanced) {
                if (!balanced) return;
                ++checked;
                if (sign_of_word(w) != want) ++bad;
            });
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "violations=%d over %lld balanced words", bad, checked);
    return {bad == 0, buf};
}

// ---------------------------------------------------------------- criterion 5
std::pair<bool, std::string> complete_spectra() {
    int bad = 0;
    for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 6}, {2, 8}, {3, 7}}) {
        ComplexSample s(n, d, 1.0, 0, SampleMode::materialized);
        for (bool sgn : {false, true}) {
            Esd esd = eigenvalues_dense(
                build_adjacency(s, sgn ? MatrixKind::Signed : MatrixKind::Unsigned));
            EigenSystem want = sgn ? complete_signed_eigs(n, d) : complete_unsigned_eigs(n, d);
            if ((u64)esd.values.size() != eigensystem_dim(want)) {
                ++bad;
                continue;
            }
            std::size_t i = 0;
            for (const auto& [val, mult] : want)
                for (u64 m = 0; m < mult; ++m, ++i)
                    if (std::fabs(esd.values[i] - val) > kEigTol) ++bad;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "eigenvalue mismatches=%d tol=%g", bad, kEigTol);
    return {bad == 0, buf};
}

// shared dense ensemble for criteria 6 and 7: d=2, n=100, lambda=1
struct DenseEnsemble {
    MeanAccumulator m2, m3;
    int ks_hits = 0;
    int seeds = 0;
    double elapsed = 0.0;
    bool ran = false;
};

DenseEnsemble g_dense;

void run_dense_ensemble() {
    if (g_dense.ran) return;
    auto t0 = std::chrono::steady_clock::now();
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        ComplexSample s(100, 2, 0.01, (std::uint64_t)seed, SampleMode::materialized);
        Esd centred_esd = eigenvalues_dense(build_adjacency(s, MatrixKind::CentredUnsigned));
        g_dense.m2.add(esd_moment(centred_esd, 2).value);
        g_dense.m3.add(esd_moment(centred_esd, 3).value);
        Esd uns = eigenvalues_dense(build_adjacency(s, MatrixKind::Unsigned));
        Esd sgn = eigenvalues_dense(build_adjacency(s, MatrixKind::Signed));
        if (ks_distance(uns, reflect(sgn)) <= kKsBound) ++g_dense.ks_hits;
    }
    g_dense.seeds = seeds;
    g_dense.elapsed = seconds_since(t0);
    g_dense.ran = true;
}

// ---------------------------------------------------------------- criterion 6
// exact finite-size means of the centred moments; the exhaustive-enumeration
// unit test pins both formulas
double exact_m2(int n, int d, double p) { return d * (n - d) * p * (1.0 - p); }
double exact_m3(int n, int d, double p) {
    return d * (d - 1) * (n - d) * p * (1.0 - p) * (1.0 - 2.0 * p);
}

std::pair<bool, std::string> centred_moment_limits() {
    run_dense_ensemble();
    double limit2 = beta_value(2, 2, 1.0);  // 2
    double limit3 = beta_value(2, 3, 1.0);  // 2
    // the sampled means must agree with the exact finite-size expectations
    // within 3 standard errors, and the closed-form gap to the limit must
    // halve when n doubles, which together witness the convergence
    double e2 = exact_m2(100, 2, 0.01), e3 = exact_m3(100, 2, 0.01);
    bool ok2 = std::fabs(g_dense.m2.mean() - e2) <= kSigma * g_dense.m2.se();
    bool ok3 = std::fabs(g_dense.m3.mean() - e3) <= kSigma * g_dense.m3.se();
    bool shrink2 = std::fabs(exact_m2(200, 2, 1.0 / 200) - limit2) <= 0.6 * std::fabs(e2 - limit2);
    bool shrink3 = std::fabs(exact_m3(200, 2, 1.0 / 200) - limit3) <= 0.6 * std::fabs(e3 - limit3);
    bool in_budget = g_dense.elapsed < kDenseMomentBudget;
    char buf[224];
    std::snprintf(buf, sizeof buf,
                  "m2=%.4f (se %.4f, exact %.4f, limit %g) m3=%.4f (se %.4f, exact %.4f, limit %g) "
                  "gaps halve at n=200: %s  elapsed=%.0fs",
                  g_dense.m2.mean(), g_dense.m2.se(), e2, limit2, g_dense.m3.mean(),
                  g_dense.m3.se(), e3, limit3, (shrink2 && shrink3) ? "yes" : "no",
                  g_dense.elapsed);
    return {ok2 && ok3 && shrink2 && shrink3 && in_budget, buf};
}

// ---------------------------------------------------------------- criterion 7
std::pair<bool, std::string> reflection_symmetry() {
    run_dense_ensemble();
    char buf[96];
    std::snprintf(buf, sizeof buf, "KS<=%.2f in %d/%d seeds (need %d)", kKsBound,
                  g_dense.ks_hits, g_dense.seeds, kKsSeedsNeeded);
    return {g_dense.ks_hits >= kKsSeedsNeeded, buf};
}

// ---------------------------------------------------------------- criterion 8
std::pair<bool, std::string> frobenius_mean() {
    auto t0 = std::chrono::steady_clock::now();
    MeanAccumulator acc;
    for (int seed = 0; seed < 20; ++seed) {
        ComplexSample s(500, 2, 1.0 / 500.0, (std::uint64_t)seed, SampleMode::materialized);
        acc.add(frobenius_normalized(build_adjacency(s, MatrixKind::CentredUnsigned)));
    }
    double want = std::sqrt(2.0);
    double rel = std::fabs(acc.mean() - want) / want;
    double el = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "mean=%.5f target=%.5f rel=%.4f elapsed=%.1fs", acc.mean(),
                  want, rel, el);
    return {rel <= kFrobRelTol && el < kFrobBudget, buf};
}

// ---------------------------------------------------------------- criterion 9
std::pair<bool, std::string> scaled_moments_high_density() {
    ComplexSample s(3000, 2, 30.0 / 3000.0, 7, SampleMode::lazy);
    double c2 = scaled_moment_check(s, 30.0, 2, 10000, 99);
    double c4 = scaled_moment_check(s, 30.0, 4, 10000, 99);
    bool ok = c2 > kScaledM2Lo && c2 < kScaledM2Hi && c4 > kScaledM4Lo && c4 < kScaledM4Hi;
    char buf[128];
    std::snprintf(buf, sizeof buf, "m2/(ld)=%.4f in (%.1f,%.1f)  m4/(ld)^2=%.4f in (%.1f,%.1f)",
                  c2, kScaledM2Lo, kScaledM2Hi, c4, kScaledM4Lo, kScaledM4Hi);
    return {ok, buf};
}

// --------------------------------------------------------------- criterion 10
std::pair<bool, std::string> local_law_agreement() {
    // 20000 per side: the plug-in TV between two 5000-sample draws of one
    // and the same law already averages 0.086 at this signature granularity,
    // above the 0.08 bound; at 20000 the same bound is the sharper test
    const std::uint64_t samples = 20000;
    auto line = ball_distribution_line(2000, 2, 1.0, 2, samples, 21);
    GWConfig cfg;
    cfg.d = 2;
    cfg.lambda = 1.0;
    cfg.t = 2;
    cfg.seed = 22;
    auto gw = ball_distribution_dgw(cfg, samples);
    double tv = tv_distance(line, gw);

    const std::uint64_t iso_samples = 2000;
    auto iso_freq = ball_distribution_line(2000, 2, 1.0, 1, iso_samples, 23);
    RootedGraph lone;
    lone.add_vertex(0);
    std::string sig = canonical_signature(lone);
    double iso = iso_freq.count(sig) ? iso_freq.at(sig) : 0.0;
    double want = std::exp(-1.0);
    double se = std::sqrt(want * (1.0 - want) / (double)iso_samples);
    bool ok = tv <= kTvBound && std::fabs(iso - want) <= kSigma * se;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "tv=%.4f (bound %.2f, %llu samples/side)  isolation=%.4f target=%.4f se=%.4f",
                  tv, kTvBound, (unsigned long long)samples, iso, want, se);
    return {ok, buf};
}

// --------------------------------------------------------------- criterion 11
std::pair<bool, std::string> tree_projection_bijection() {
    int bad = 0;
    for (int d : {2, 3}) {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            BipartiteRootedGraph tree = sample_poisson_dtree(d, 1.0, 4, seed);
            GWConfig cfg;
            cfg.d = d;
            cfg.lambda = 1.0;
            cfg.t = 2;
            cfg.seed = seed;
            if (canonical_signature(phi(tree)) != canonical_signature(sample_dgw(cfg))) ++bad;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "mismatches=%d over 2000 paired draws", bad);
    return {bad == 0, buf};
}

// --------------------------------------------------------------- criterion 12
std::pair<bool, std::string> mass_transport_identity() {
    const std::uint64_t samples = 100000;
    bool ok = true;
    std::string detail;
    for (int k : {1, 2}) {
        MassTransportResult r = mass_transport_check(2, 1.0, k, samples, 41);
        double z = r.stderr_ > 0.0 ? std::fabs(r.lhs - r.rhs) / r.stderr_ : 0.0;
        if (z > kSigma) ok = false;
        char buf[64];
        std::snprintf(buf, sizeof buf, "f%d z=%.2f  ", k, z);
        detail += buf;
    }
    MassTransportResult v =
        mass_transport_check(2, 1.0, 2, samples, 41, OffspringLaw::deterministic);
    bool violated = std::fabs(v.lhs - v.rhs) > kSigma * v.stderr_;
    if (!violated) ok = false;
    char buf[96];
    std::snprintf(buf, sizeof buf, "deterministic-control gap=%.3f %s", std::fabs(v.lhs - v.rhs),
                  violated ? "(violates as required)" : "(unexpectedly holds)");
    detail += buf;
    return {ok, detail};
}

// --------------------------------------------------------------- criterion 13
std::pair<bool, std::string> subcritical_regime() {
    double die = die_out_fraction(2, 0.4, 60, 100000, 10000, 17);

    const std::uint64_t trials = 10000;
    MeanAccumulator acc;
    GWConfig cfg;
    cfg.d = 2;
    cfg.lambda = 0.4;
    cfg.t = 2;
    for (std::uint64_t i = 0; i < trials; ++i) {
        cfg.seed = derive_seed(19, 0x6D6F6D, i);
        acc.add(root_spectral_moments(sample_dgw(cfg), 2)[1]);
    }
    double want = beta_value(2, 2, 0.4);  // 0.8
    bool ok = die >= kDieOutMin && std::fabs(acc.mean() - want) <= kSigma * acc.se();
    char buf[128];
    std::snprintf(buf, sizeof buf, "die_out=%.4f (min %.2f)  m2=%.4f target=%g se=%.4f", die,
                  kDieOutMin, acc.mean(), want, acc.se());
    return {ok, buf};
}

} // namespace

int main() {
    guarded(1, table_counts);
    guarded(2, beta_identities);
    guarded(3, catalan_coefficients);
    guarded(4, sign_alternation);
    guarded(5, complete_spectra);
    guarded(6, centred_moment_limits);
    guarded(7, reflection_symmetry);
    guarded(8, frobenius_mean);
    guarded(9, scaled_moments_high_density);
    guarded(10, local_law_agreement);
    guarded(11, tree_projection_bijection);
    guarded(12, mass_transport_identity);
    guarded(13, subcritical_regime);
    std::printf("%d of 13 criteria passed\n", 13 - g_failures);
    return g_failures;
}
