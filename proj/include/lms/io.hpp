#ifndef LMS_IO_HPP
#define LMS_IO_HPP

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "cells.hpp"
#include "limits.hpp"
#include "spectra.hpp"
#include "words.hpp"

namespace lms {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline ordered_json complex_to_json(const ComplexSample& sample) {
    ordered_json j;
    j["n"] = sample.n();
    j["d"] = sample.d();
    j["p"] = sample.p();
    j["seed"] = sample.seed();
    j["num_dcells"] = sample.num_dcells();
    j["present_ranks"] = sample.present_ranks();
    return j;
}

inline ordered_json esd_to_json(const Esd& esd) {
    ordered_json j;
    j["n"] = esd.n;
    j["d"] = esd.d;
    j["p"] = esd.p;
    j["seed"] = esd.seed;
    j["kind"] = esd.kind;
    j["method"] = esd.method;
    j["dim"] = esd.values.size();
    j["values"] = esd.values;
    return j;
}

inline void esd_to_csv(const Esd& esd, std::ostream& os) {
    os << "# n=" << esd.n << " d=" << esd.d << " p=" << esd.p << " seed=" << esd.seed
       << " kind=" << esd.kind << " method=" << esd.method << "\n";
    os << "eigenvalue\n";
    char buf[64];
    for (double v : esd.values) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << "\n";
    }
}

inline ordered_json histogram_to_json(const Histogram& h) {
    ordered_json j;
    j["mode"] = h.mode;
    j["edges"] = h.edges;
    j["counts"] = h.counts;
    j["normalized"] = h.normalized;
    return j;
}

template <class G>
inline ordered_json graph_to_json(const G& g) {
    ordered_json j;
    j["n_vertices"] = g.n;
    ordered_json edges = ordered_json::array();
    for (int v = 0; v < g.n; ++v)
        for (int w : g.adj[(std::size_t)v])
            if (w > v) edges.push_back({v, w});
    j["edges"] = edges;
    j["root"] = 0;
    j["depths"] = g.depth;
    j["capped"] = g.capped;
    return j;
}

template <class G>
inline void graph_to_dot(const G& g, std::ostream& os) {
    os << "graph ball {\n";
    os << "  0 [shape=doublecircle];\n";
    for (int v = 0; v < g.n; ++v)
        for (int w : g.adj[(std::size_t)v])
            if (w > v) os << "  " << v << " -- " << w << ";\n";
    os << "}\n";
}

inline ordered_json moment_polynomial_to_json(const MomentPolynomial& poly) {
    ordered_json j;
    j["d"] = poly.d;
    j["k"] = poly.k;
    ordered_json coeffs = ordered_json::object();
    for (const auto& [s, c] : poly.coefficients) coeffs[std::to_string(s)] = c;
    j["tilde"] = coeffs;
    return j;
}

} // namespace lms

#endif
