// lm-spectra: sampling, spectra, word enumeration and local-limit tools for
// random simplicial complexes, with reproducible seeds and JSON artifacts.
#include <CLI11.hpp>
#include <lms/lms.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

struct Common {
    std::uint64_t seed = kDefaultSeed;
    std::string out;
    std::string format = "json";
    int threads = 0;
    bool deterministic = false;
};

std::string timestamp_utc() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::ordered_json envelope(const std::string& command, const Common& c) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["seed"] = c.seed;
    if (!c.deterministic) j["timestamp"] = timestamp_utc();
    return j;
}

void write_text(const Common& c, const std::string& text, const std::string& what) {
    if (c.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        std::cerr << what << " -> stdout\n";
    } else {
        std::ofstream f(c.out);
        if (!f) throw std::invalid_argument("cannot open output file: " + c.out);
        f << text;
        if (!text.empty() && text.back() != '\n') f << '\n';
        std::cout << what << " -> " << c.out << "\n";
    }
}

void write_json(const Common& c, const nlohmann::ordered_json& j, const std::string& what) {
    write_text(c, j.dump(2), what);
}

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "RNG seed (default 0xC0FFEE)");
    cmd->add_option("--out", c.out, "output path (default stdout)");
    cmd->add_option("--threads", c.threads, "worker thread cap (env LM_SPECTRA_THREADS)");
    cmd->add_flag("--deterministic", c.deterministic, "suppress timestamp for byte-identical output");
}

// exactly one of --p / --lambda; lambda implies p = lambda/n
double resolve_p(CLI::App* cmd, int n, double p, double lambda) {
    bool has_p = cmd->count("--p") > 0, has_l = cmd->count("--lambda") > 0;
    if (has_p == has_l)
        throw std::invalid_argument("exactly one of --p and --lambda is required");
    double out = has_p ? p : lambda / (double)n;
    if (out < 0.0 || out > 1.0) throw std::invalid_argument("presence probability outside [0,1]");
    return out;
}

void apply_threads(const Common& c) {
    int t = c.threads;
    if (t <= 0) {
        if (const char* env = std::getenv("LM_SPECTRA_THREADS")) t = std::atoi(env);
    }
    if (t > 0) lms::set_thread_limit(t);
}

std::string describe(const lms::ComplexSample& s) {
    std::ostringstream os;
    os << "d=" << s.d() << " n=" << s.n() << " p=" << s.p() << " seed=" << s.seed()
       << " dcells=" << s.count_present() << "/" << s.num_dcells();
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linial-Meshulam spectra and local weak limit toolkit"};
    app.require_subcommand(1);

    int d = 2, n = 0, k = 2, depth = 2, bins = 40;
    double p = 0.0, lambda = 0.0;
    std::uint64_t samples = 1000, dense_cap = 6000, vertex_cap = 2000000;
    std::string kind = "unsigned", law = "poisson";
    bool full = false;
    Common c;

    auto* sc = app.add_subcommand("sample-complex", "sample a complex and list present d-cells");
    sc->add_option("--d", d)->required();
    sc->add_option("--n", n)->required();
    sc->add_option("--p", p);
    sc->add_option("--lambda", lambda);
    add_common(sc, c);

    auto* sp = app.add_subcommand("spectrum", "dense ESD of an adjacency matrix");
    sp->add_option("--d", d)->required();
    sp->add_option("--n", n)->required();
    sp->add_option("--p", p);
    sp->add_option("--lambda", lambda);
    sp->add_option("--kind", kind, "unsigned|signed|centred-unsigned|centred-signed");
    sp->add_option("--dense-cap", dense_cap);
    sp->add_option("--bins", bins, "also emit a histogram with this many bins (json only)");
    sp->add_option("--format", c.format, "json|csv");
    add_common(sp, c);

    auto* mo = app.add_subcommand("moments", "ESD moment, dense-exact or root-sampled");
    mo->add_option("--d", d)->required();
    mo->add_option("--n", n)->required();
    mo->add_option("--p", p);
    mo->add_option("--lambda", lambda);
    mo->add_option("--k", k)->required();
    mo->add_option("--kind", kind);
    mo->add_option("--samples", samples, "root count; 0 = dense-exact path");
    mo->add_option("--dense-cap", dense_cap);
    mo->add_option("--vertex-cap", vertex_cap);
    add_common(mo, c);

    auto* ew = app.add_subcommand("enumerate-words", "closed-word class counts by support size");
    ew->add_option("--d", d)->required();
    ew->add_option("--k", k)->required();
    ew->add_flag("--full", full, "include the unrestricted-support counts");
    ew->add_option("--format", c.format, "json|table");
    add_common(ew, c);

    auto* be = app.add_subcommand("beta", "limiting moment beta_k(lambda)");
    be->add_option("--d", d)->required();
    be->add_option("--k", k)->required();
    be->add_option("--lambda", lambda)->required();
    add_common(be, c);

    auto* ce = app.add_subcommand("complete-eigs", "closed-form spectrum of the complete complex");
    ce->add_option("--d", d)->required();
    ce->add_option("--n", n)->required();
    ce->add_option("--kind", kind, "unsigned|signed");
    add_common(ce, c);

    auto* lw = app.add_subcommand("lwc-compare", "line-graph ball law vs d-block branching law");
    lw->add_option("--d", d)->required();
    lw->add_option("--n", n)->required();
    lw->add_option("--lambda", lambda)->required();
    lw->add_option("--depth", depth, "ball radius t");
    lw->add_option("--samples", samples);
    lw->add_option("--vertex-cap", vertex_cap);
    add_common(lw, c);

    auto* dg = app.add_subcommand("dgw-sample", "sample one d-block branching graph");
    dg->add_option("--d", d)->required();
    dg->add_option("--lambda", lambda)->required();
    dg->add_option("--depth", depth);
    dg->add_option("--law", law, "poisson|deterministic");
    dg->add_option("--vertex-cap", vertex_cap);
    dg->add_option("--format", c.format, "json|dot");
    add_common(dg, c);

    auto* mt = app.add_subcommand("mass-transport", "two sides of the mass-transport identity");
    mt->add_option("--d", d)->required();
    mt->add_option("--lambda", lambda)->required();
    mt->add_option("--k", k, "function index: f_k counts neighbours of degree k*d");
    mt->add_option("--samples", samples);
    mt->add_option("--law", law, "poisson|deterministic");
    add_common(mt, c);

    auto* sv = app.add_subcommand("survival", "die-out fraction of the branching graph");
    sv->add_option("--d", d)->required();
    sv->add_option("--lambda", lambda)->required();
    sv->add_option("--depth", depth, "depth cap");
    sv->add_option("--vertex-cap", vertex_cap);
    sv->add_option("--samples", samples);
    add_common(sv, c);

    auto* f1 = app.add_subcommand("figure1", "histogram JSONs for (d=2, n=100, lambda in {1, 0.5})");
    f1->add_option("--bins", bins);
    f1->add_option("--out", c.out, "output directory (default .)");
    f1->add_option("--seed", c.seed);
    f1->add_option("--threads", c.threads);
    f1->add_flag("--deterministic", c.deterministic);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        apply_threads(c);

        if (sc->parsed()) {
            double pp = resolve_p(sc, n, p, lambda);
            lms::ComplexSample s(n, d, pp, c.seed, lms::SampleMode::materialized);
            auto j = envelope("sample-complex", c);
            j.update(lms::complex_to_json(s));
            write_json(c, j, "sample-complex " + describe(s));
        } else if (sp->parsed()) {
            double pp = resolve_p(sp, n, p, lambda);
            lms::MatrixKind mk = lms::kind_from_name(kind);
            lms::ComplexSample s(n, d, pp, c.seed, lms::SampleMode::materialized);
            lms::SparseSymMatrix m = lms::build_adjacency(s, mk);
            lms::Esd esd = lms::eigenvalues_dense(m, dense_cap);
            esd.n = n; esd.d = d; esd.p = pp; esd.seed = c.seed; esd.kind = lms::kind_name(mk);
            if (c.format == "csv") {
                std::ostringstream os;
                lms::esd_to_csv(esd, os);
                write_text(c, os.str(), "spectrum " + describe(s));
            } else {
                auto j = envelope("spectrum", c);
                j.update(lms::esd_to_json(esd));
                if (sp->count("--bins") > 0)
                    j["histogram"] = lms::histogram_to_json(lms::histogram(esd, bins));
                write_json(c, j, "spectrum " + describe(s));
            }
        } else if (mo->parsed()) {
            double pp = resolve_p(mo, n, p, lambda);
            lms::MatrixKind mk = lms::kind_from_name(kind);
            lms::MomentEstimate est;
            if (samples == 0) {
                lms::ComplexSample s(n, d, pp, c.seed, lms::SampleMode::materialized);
                est = lms::esd_moment(lms::eigenvalues_dense(lms::build_adjacency(s, mk), dense_cap), k);
            } else {
                lms::ComplexSample s(n, d, pp, c.seed, lms::SampleMode::lazy);
                est = lms::moment_root_sampled(s, mk, k, samples, c.seed, vertex_cap);
            }
            auto j = envelope("moments", c);
            j["d"] = d; j["n"] = n; j["p"] = pp; j["kind"] = kind;
            j["k"] = est.k;
            j["value"] = est.value;
            j["stderr"] = est.stderr_;
            j["method"] = est.method;
            write_json(c, j, "moments k=" + std::to_string(k) + " " + est.method);
        } else if (ew->parsed()) {
            lms::WordEnumOptions opt;
            lms::WordEnumResult res = lms::enumerate_words(d, k, opt);
            if (c.format == "table") {
                std::ostringstream os;
                os << "d=" << d << " k=" << k << "\n";
                os << "s\t|W~|\t|W|\n";
                for (const auto& [s, cnt] : res.full) {
                    auto it = res.tilde.find(s);
                    os << s << "\t" << (it == res.tilde.end() ? 0 : it->second) << "\t" << cnt << "\n";
                }
                write_text(c, os.str(), "enumerate-words");
            } else {
                auto j = envelope("enumerate-words", c);
                j["d"] = d;
                j["k"] = k;
                nlohmann::ordered_json tl;
                for (const auto& [s, cnt] : res.tilde) tl[std::to_string(s)] = cnt;
                j["tilde"] = tl;
                if (full) {
                    nlohmann::ordered_json fl;
                    for (const auto& [s, cnt] : res.full) fl[std::to_string(s)] = cnt;
                    j["full"] = fl;
                }
                write_json(c, j, "enumerate-words d=" + std::to_string(d) + " k=" + std::to_string(k));
            }
        } else if (be->parsed()) {
            lms::MomentPolynomial poly = lms::enumerate_tilde_W(d, k);
            auto j = envelope("beta", c);
            j.update(lms::moment_polynomial_to_json(poly));
            j["lambda"] = lambda;
            j["beta"] = poly(lambda);
            write_json(c, j, "beta d=" + std::to_string(d) + " k=" + std::to_string(k));
        } else if (ce->parsed()) {
            lms::EigenSystem es = (kind == "signed" || kind == "complete-signed")
                                      ? lms::complete_signed_eigs(n, d)
                                      : lms::complete_unsigned_eigs(n, d);
            auto j = envelope("complete-eigs", c);
            j["d"] = d; j["n"] = n; j["kind"] = kind;
            nlohmann::ordered_json evs = nlohmann::ordered_json::array();
            for (const auto& [val, mult] : es)
                evs.push_back({{"value", val}, {"multiplicity", mult}});
            j["eigenvalues"] = evs;
            write_json(c, j, "complete-eigs");
        } else if (lw->parsed()) {
            auto line = lms::ball_distribution_line(n, d, lambda, depth, samples, c.seed, vertex_cap);
            lms::GWConfig cfg;
            cfg.d = d; cfg.lambda = lambda; cfg.t = depth;
            cfg.vertex_cap = vertex_cap; cfg.seed = c.seed;
            auto gw = lms::ball_distribution_dgw(cfg, samples);
            lms::RootedGraph lone;
            lone.add_vertex(0);
            std::string isolated = lms::canonical_signature(lone);
            auto j = envelope("lwc-compare", c);
            j["d"] = d; j["n"] = n; j["lambda"] = lambda;
            j["t"] = depth;
            j["samples"] = samples;
            j["tv"] = lms::tv_distance(line, gw);
            j["isolation_line"] = line.count(isolated) ? line.at(isolated) : 0.0;
            j["isolation_dgw"] = gw.count(isolated) ? gw.at(isolated) : 0.0;
            j["isolation_limit"] = std::exp(-lambda);
            std::vector<std::pair<std::string, double>> ranked;
            for (const auto& [sig, f] : line) {
                double g2 = gw.count(sig) ? gw.at(sig) : 0.0;
                ranked.emplace_back(sig, std::max(f, g2));
            }
            for (const auto& [sig, f] : gw)
                if (!line.count(sig)) ranked.emplace_back(sig, f);
            std::sort(ranked.begin(), ranked.end(),
                      [](const auto& a, const auto& b) { return a.second > b.second; });
            nlohmann::ordered_json tops = nlohmann::ordered_json::array();
            for (std::size_t i = 0; i < ranked.size() && i < 10; ++i) {
                const std::string& sig = ranked[i].first;
                tops.push_back({{"sig", sig},
                                {"p_line", line.count(sig) ? line.at(sig) : 0.0},
                                {"p_dgw", gw.count(sig) ? gw.at(sig) : 0.0}});
            }
            j["top_signatures"] = tops;
            write_json(c, j, "lwc-compare");
        } else if (dg->parsed()) {
            lms::GWConfig cfg;
            cfg.d = d; cfg.lambda = lambda; cfg.t = depth;
            cfg.vertex_cap = vertex_cap; cfg.seed = c.seed;
            cfg.law = law == "deterministic" ? lms::OffspringLaw::deterministic
                                             : lms::OffspringLaw::poisson;
            lms::RootedGraph g = lms::sample_dgw(cfg);
            if (c.format == "dot") {
                std::ostringstream os;
                lms::graph_to_dot(g, os);
                write_text(c, os.str(), "dgw-sample n=" + std::to_string(g.n));
            } else {
                auto j = envelope("dgw-sample", c);
                j.update(lms::graph_to_json(g));
                write_json(c, j, "dgw-sample n=" + std::to_string(g.n));
            }
        } else if (mt->parsed()) {
            lms::OffspringLaw ol = law == "deterministic" ? lms::OffspringLaw::deterministic
                                                          : lms::OffspringLaw::poisson;
            lms::MassTransportResult r = lms::mass_transport_check(d, lambda, k, samples, c.seed, ol);
            auto j = envelope("mass-transport", c);
            j["d"] = d; j["lambda"] = lambda; j["k"] = k;
            j["samples"] = samples; j["law"] = law;
            j["lhs"] = r.lhs;
            j["rhs"] = r.rhs;
            j["stderr"] = r.stderr_;
            j["z"] = r.stderr_ > 0.0 ? std::fabs(r.lhs - r.rhs) / r.stderr_ : 0.0;
            write_json(c, j, "mass-transport");
        } else if (sv->parsed()) {
            double frac = lms::die_out_fraction(d, lambda, depth, vertex_cap, samples, c.seed);
            auto j = envelope("survival", c);
            j["d"] = d; j["lambda"] = lambda; j["depth_cap"] = depth;
            j["vertex_cap"] = vertex_cap; j["samples"] = samples;
            j["die_out"] = frac;
            j["survive"] = 1.0 - frac;
            write_json(c, j, "survival");
        } else if (f1->parsed()) {
            std::string dir = c.out.empty() ? "." : c.out;
            std::vector<std::string> written;
            for (double lam : {1.0, 0.5}) {
                lms::ComplexSample s(100, 2, lam / 100.0, c.seed, lms::SampleMode::materialized);
                for (lms::MatrixKind mk : {lms::MatrixKind::Unsigned, lms::MatrixKind::Signed}) {
                    lms::Esd esd = lms::eigenvalues_dense(lms::build_adjacency(s, mk));
                    esd.n = 100; esd.d = 2; esd.p = lam / 100.0;
                    esd.seed = c.seed; esd.kind = lms::kind_name(mk);
                    auto j = envelope("figure1", c);
                    j["lambda"] = lam;
                    j["kind"] = lms::kind_name(mk);
                    j["histogram"] = lms::histogram_to_json(lms::histogram(esd, bins));
                    std::ostringstream name;
                    name << dir << "/fig1-" << lms::kind_name(mk) << "-lambda" << lam << ".json";
                    std::ofstream f(name.str());
                    if (!f) throw std::invalid_argument("cannot open output file: " + name.str());
                    f << j.dump(2) << "\n";
                    written.push_back(name.str());
                }
            }
            for (const auto& w : written) std::cout << "figure1 -> " << w << "\n";
        }
        return 0;
    } catch (const lms::CapExceeded& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
